#include "mctune/kernel.hpp"

namespace mctune {

Tick KernelProgram::activation_busy_ticks() const {
    Tick total = 0;
    for (const auto& in : per_activation)
        if (in.kind == CostInstr::Kind::Busy) total += in.ticks;
    return total;
}

Tick KernelProgram::epilogue_busy_ticks() const {
    Tick total = 0;
    for (const auto& in : epilogue)
        if (in.kind == CostInstr::Kind::Busy) total += in.ticks;
    return total;
}

int KernelProgram::barriers_per_activation() const {
    int n = 0;
    for (const auto& in : per_activation)
        if (in.kind == CostInstr::Kind::LocalBarrier) ++n;
    return n;
}

KernelProgram build_abstract_kernel(int size, const TuningParams& params,
                                    const PlatformConfig& platform) {
    platform.validate();
    validate_params(size, params);

    KernelProgram prog;
    prog.kind = KernelKind::Abstract;
    const int reps = size / params.ts;
    for (int i = 0; i < reps; ++i) {
        prog.per_activation.push_back(
            CostInstr::busy(static_cast<Tick>(platform.gmt) * params.ts, MemSpace::Global));
        prog.per_activation.push_back(CostInstr::local_barrier());
        prog.per_activation.push_back(CostInstr::busy(params.ts, MemSpace::Local));
        prog.per_activation.push_back(CostInstr::local_barrier());
    }
    // result write
    prog.per_activation.push_back(CostInstr::busy(platform.gmt, MemSpace::Global));
    prog.per_activation.push_back(CostInstr::end());
    prog.epilogue.push_back(CostInstr::end());
    return prog;
}

KernelProgram build_minimum_kernel(int size, const TuningParams& params,
                                   const PlatformConfig& platform,
                                   const std::vector<std::int64_t>& input) {
    platform.validate();
    validate_params(size, params);
    if (input.size() != static_cast<std::size_t>(size))
        throw ConfigError("minimum kernel input length must equal size");

    // Highest global index touched by the map phase is wgs*wg*ts - 1; with
    // the clamped group count that exceeds the array iff wg*ts > size.
    const LaunchPlan plan = derive_launch(platform, size, params);
    const long long top = static_cast<long long>(plan.wgs) * params.wg * params.ts;
    if (top > size)
        throw ConfigError("infeasible (wg, ts): workgroups would index past the input (" +
                          std::to_string(top) + " > " + std::to_string(size) + ")");

    KernelProgram prog;
    prog.kind = KernelKind::Minimum;
    const MemRef self{MemRef::Base::LocalSlot, 0};
    for (int i = 0; i < params.ts; ++i) {
        prog.per_activation.push_back(
            CostInstr::effect(self, MemRef{MemRef::Base::GlobalShifted, i}));
        prog.per_activation.push_back(CostInstr::busy(platform.gmt, MemSpace::Global));
    }
    prog.per_activation.push_back(CostInstr::end());

    for (int i = 1; i < plan.nwe; ++i) {
        prog.epilogue.push_back(CostInstr::effect(self, MemRef{MemRef::Base::LocalSlot, i}));
        prog.epilogue.push_back(CostInstr::busy(1, MemSpace::Local));
    }
    prog.epilogue.push_back(CostInstr::effect(MemRef{MemRef::Base::GlobalAt, 0}, self));
    prog.epilogue.push_back(CostInstr::busy(platform.gmt, MemSpace::Global));
    prog.epilogue.push_back(CostInstr::end());
    return prog;
}

bool config_feasible(const ProblemSpec& problem, const TuningParams& params) {
    if (problem.kernel == KernelKind::Abstract) return true;
    return static_cast<long long>(params.wg) * params.ts <= problem.size;
}

}  // namespace mctune
