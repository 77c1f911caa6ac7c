#ifndef MCTUNE_KERNEL_HPP
#define MCTUNE_KERNEL_HPP

#include <cstdint>
#include <vector>

#include "mctune/model.hpp"

namespace mctune {

enum class MemSpace : std::uint8_t { Global, Local };

/// Symbolic memory operand. Effects are written against the work item that
/// executes them, so operands resolve at run time from the item's tile shift
/// and its local-memory slot.
struct MemRef {
    enum class Base : std::uint8_t {
        GlobalAt,       // glob[offset]
        GlobalShifted,  // glob[shift + offset]
        LocalSlot,      // loc[myloc + offset]
    };
    Base base = Base::GlobalAt;
    int offset = 0;

    MemSpace space() const {
        return base == Base::LocalSlot ? MemSpace::Local : MemSpace::Global;
    }
    int resolve(int shift, int myloc) const {
        switch (base) {
            case Base::GlobalAt: return offset;
            case Base::GlobalShifted: return shift + offset;
            case Base::LocalSlot: return myloc + offset;
        }
        return offset;
    }
};

/// One instruction of a cost-and-effect program.
///
/// Busy consumes clock ticks through the reporting protocol; Effect is a
/// zero-time memory update (dst = min(dst, src)); LocalBarrier synchronizes
/// the workgroup; ActivationEnd terminates the sequence.
struct CostInstr {
    enum class Kind : std::uint8_t { Busy, LocalBarrier, Effect, ActivationEnd };

    Kind kind = Kind::ActivationEnd;
    Tick ticks = 0;                    // Busy
    MemSpace tag = MemSpace::Global;   // Busy
    MemRef dst, src;                   // Effect

    static CostInstr busy(Tick t, MemSpace m) {
        CostInstr c;
        c.kind = Kind::Busy;
        c.ticks = t;
        c.tag = m;
        return c;
    }
    static CostInstr local_barrier() {
        CostInstr c;
        c.kind = Kind::LocalBarrier;
        return c;
    }
    static CostInstr effect(MemRef dst, MemRef src) {
        CostInstr c;
        c.kind = Kind::Effect;
        c.dst = dst;
        c.src = src;
        return c;
    }
    static CostInstr end() { return CostInstr{}; }
};

/// A kernel compiled to instruction sequences.
///
/// per_activation runs once per assigned work item; epilogue runs once per
/// workgroup (by local id 0, after a group-end barrier) and is empty for the
/// abstract kernel. Both sequences are templates: effect operands are bound
/// to a concrete work item by the machine.
struct KernelProgram {
    KernelKind kind = KernelKind::Abstract;
    std::vector<CostInstr> per_activation;
    std::vector<CostInstr> epilogue;

    bool has_epilogue() const { return !epilogue.empty() && epilogue.size() > 1; }

    Tick activation_busy_ticks() const;
    Tick epilogue_busy_ticks() const;
    /// Number of LocalBarrier instructions in per_activation.
    int barriers_per_activation() const;
};

/// Global item id for workgroup nwg, local id me, activation round iter.
inline int global_item_id(const TuningParams& params, int np, int nwg, int me, int iter) {
    return params.wg > np ? nwg * params.wg + me + iter * np : nwg * params.wg + me;
}

/// Tiled compute kernel: size/ts repetitions of a global tile load and a
/// local compute phase, separated by barriers, then one global result write.
/// Both conditional branches of the source kernel cost the same, so the
/// branch is elided.
KernelProgram build_abstract_kernel(int size, const TuningParams& params,
                                    const PlatformConfig& platform);

/// Reduction kernel computing min over the input array. The map phase folds
/// ts global elements into the item's local slot; the epilogue reduces the
/// group's slots and min-combines the result into glob[0].
/// Throws ConfigError when the configuration would index past the input
/// (wg * ts > size), which makes the configuration infeasible.
KernelProgram build_minimum_kernel(int size, const TuningParams& params,
                                   const PlatformConfig& platform,
                                   const std::vector<std::int64_t>& input);

/// True when (wg, ts) is runnable for this problem (always, for the abstract
/// kernel; wg * ts <= size for the minimum kernel).
bool config_feasible(const ProblemSpec& problem, const TuningParams& params);

}  // namespace mctune

#endif  // MCTUNE_KERNEL_HPP
