#ifndef MCTUNE_MODEL_HPP
#define MCTUNE_MODEL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mctune {

/// Model time, in clock ticks.
using Tick = std::int64_t;

/// Invalid user input: bad platform constants, bad tuning parameters, bad files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Internal contract violation of the transition system (deadlock, bad apply).
struct ModelBug : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr bool is_pow2(long long v) { return v > 0 && (v & (v - 1)) == 0; }

/// Exact log2 of a power of two.
int log2_exact(int v);

/// Architecture constants of the abstract platform.
///
/// nd/nu/np describe the device/unit/processing-element hierarchy; gmt is the
/// cost of one unit of global-memory work relative to local-memory work.
struct PlatformConfig {
    int nd = 1;
    int nu = 1;
    int np = 4;
    int gmt = 4;

    void validate() const;
};

enum class KernelKind : std::uint8_t { Abstract, Minimum };

const char* to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

/// The problem instance: input length plus, for the minimum kernel, the data.
struct ProblemSpec {
    int size = 8;
    KernelKind kernel = KernelKind::Abstract;
    std::vector<std::int64_t> input;  // minimum kernel only, length == size

    static ProblemSpec abstract(int size);
    /// Minimum kernel; empty input selects the default glob[i] = size - i.
    static ProblemSpec minimum(int size, std::vector<std::int64_t> input = {});

    void validate() const;
};

/// The two tuning parameters: workgroup size and tile size.
struct TuningParams {
    int wg = 0;
    int ts = 0;

    bool operator==(const TuningParams&) const = default;
};

/// Launch shape derived from (platform, size, params).
struct LaunchPlan {
    int wgs = 0;      // number of workgroups
    int nwd = 0;      // working devices
    int nwu = 0;      // working units per device
    int nwe = 0;      // working elements per unit
    int all_nwe = 0;  // simultaneously working elements

    bool operator==(const LaunchPlan&) const = default;
};

/// Validates params for this problem size; throws ConfigError otherwise.
void validate_params(int size, const TuningParams& params);

/// Launch-shape arithmetic.
///
/// wgs uses integer division and is clamped to >= 1 so that oversized
/// (wg * ts > size) configurations still launch one partially filled group.
/// nwd is computed with the two-step conditional (working devices from the
/// group count, then corrected to 1 when the division underflows), nwu and
/// nwe are the usual min() clamps.
LaunchPlan derive_launch(const PlatformConfig& platform, int size, const TuningParams& params);

/// All (wg, ts) with wg = 2^i, ts = 2^j, i,j in [1, n-1] for size = 2^n,
/// in lexicographically increasing (wg, ts) order. Cardinality (n-1)^2.
std::vector<TuningParams> enumerate_configs(int size);

}  // namespace mctune

#endif  // MCTUNE_MODEL_HPP
