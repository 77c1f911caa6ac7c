#include "mctune/model.hpp"

namespace mctune {

int log2_exact(int v) {
    if (!is_pow2(v)) throw ConfigError("not a power of two: " + std::to_string(v));
    int n = 0;
    while ((1 << n) < v) ++n;
    return n;
}

void PlatformConfig::validate() const {
    if (nd < 1 || nu < 1 || np < 1 || gmt < 1)
        throw ConfigError("platform constants nd, nu, np, gmt must all be >= 1");
    if (!is_pow2(np))
        throw ConfigError("np must be a power of two, got " + std::to_string(np));
}

const char* to_string(KernelKind k) {
    return k == KernelKind::Abstract ? "abstract" : "minimum";
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "abstract") return KernelKind::Abstract;
    if (s == "minimum") return KernelKind::Minimum;
    throw ConfigError("unknown kernel kind '" + s + "' (expected abstract or minimum)");
}

ProblemSpec ProblemSpec::abstract(int size) {
    ProblemSpec p;
    p.size = size;
    p.kernel = KernelKind::Abstract;
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::minimum(int size, std::vector<std::int64_t> input) {
    ProblemSpec p;
    p.size = size;
    p.kernel = KernelKind::Minimum;
    if (input.empty()) {
        p.input.resize(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) p.input[static_cast<std::size_t>(i)] = size - i;
    } else {
        p.input = std::move(input);
    }
    p.validate();
    return p;
}

void ProblemSpec::validate() const {
    if (size < 4 || !is_pow2(size))
        throw ConfigError("size must be a power of two >= 4, got " + std::to_string(size));
    if (kernel == KernelKind::Minimum) {
        if (input.size() != static_cast<std::size_t>(size))
            throw ConfigError("minimum kernel needs an input array of length size");
    } else if (!input.empty()) {
        throw ConfigError("abstract kernel takes no input array");
    }
}

void validate_params(int size, const TuningParams& params) {
    const int hi = size / 2;
    if (!is_pow2(params.wg) || params.wg < 2 || params.wg > hi)
        throw ConfigError("wg must be a power of two in [2, size/2], got " +
                          std::to_string(params.wg));
    if (!is_pow2(params.ts) || params.ts < 2 || params.ts > hi)
        throw ConfigError("ts must be a power of two in [2, size/2], got " +
                          std::to_string(params.ts));
}

LaunchPlan derive_launch(const PlatformConfig& platform, int size, const TuningParams& params) {
    platform.validate();
    if (size < 4 || !is_pow2(size)) throw ConfigError("size must be a power of two >= 4");
    validate_params(size, params);

    LaunchPlan plan;
    plan.wgs = size / (params.wg * params.ts);
    if (plan.wgs < 1) plan.wgs = 1;  // oversized wg*ts still runs one group

    plan.nwd = (plan.wgs <= platform.nu * platform.nd) ? (plan.wgs / platform.nu) : platform.nd;
    if (plan.wgs / platform.nu == 0) plan.nwd = 1;

    plan.nwu = (plan.wgs <= platform.nu) ? plan.wgs : platform.nu;
    plan.nwe = (params.wg <= platform.np) ? params.wg : platform.np;
    plan.all_nwe = plan.nwe * plan.nwu * plan.nwd;
    return plan;
}

std::vector<TuningParams> enumerate_configs(int size) {
    if (size < 4 || !is_pow2(size))
        throw ConfigError("size must be a power of two >= 4, got " + std::to_string(size));
    const int n = log2_exact(size);
    std::vector<TuningParams> out;
    out.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (int i = 1; i <= n - 1; ++i)
        for (int j = 1; j <= n - 1; ++j)
            out.push_back(TuningParams{1 << i, 1 << j});
    return out;
}

}  // namespace mctune
