#ifndef MCTUNE_MACHINE_HPP
#define MCTUNE_MACHINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mctune/kernel.hpp"
#include "mctune/model.hpp"

namespace mctune {

enum class Role : std::uint8_t { Main, Host, Clock, Device, Unit, Barrier, Pex };

const char* to_string(Role r);

// Control locations. Processes exchange launch/finish commands over
// zero-capacity channels; a handshake is a single combined transition, so a
// send location pairs with the peer's receive location.
enum class HostPc : std::uint8_t {
    SendGo,        // initial go to each working device
    WaitDoneReact, // a device round finished, another round remains
    ReactGo,       // re-arm the device: restore all_nwe, send go
    WaitDoneStop,  // final rounds: collect done
    SendStop,      // dismiss a device
    SetFin,        // mark termination of the computation
    Exited,
};
enum class DevicePc : std::uint8_t { WaitGo, SendUnitGo, WaitUnitDone, SendDone, StopUnits, Exited };
enum class UnitPc : std::uint8_t { WaitGo, ActivatePex, Serve, ReactPex, SendUnitDone, StopPexes, StopBarrier, Exited };
enum class BarrierPc : std::uint8_t { Counting, Exited };
enum class PexPc : std::uint8_t {
    WaitGo,
    Run,              // executing the instruction at the cursor
    ArriveBarrier,    // mid-kernel barrier arrival pending
    WaitBarrier,      // counted, waiting for release
    ArriveGroupEnd,   // last work item done, group-end barrier arrival pending
    WaitGroupEnd,
    SendItemDone,
    SendEndDone,
    Exited,
};
enum class ClockPc : std::uint8_t { Run, Exited };
enum class PexPhase : std::uint8_t { Activation, Epilogue };

enum class Op : std::uint8_t {
    ClockTick,
    ClockHalt,
    HostGo,
    HostReactGo,
    HostStop,
    HostSetFin,
    DeviceUnitGo,
    DeviceDone,
    DeviceUnitStop,
    UnitPexGo,
    UnitDone,
    UnitPexStop,
    UnitBarrierStop,
    PexReport,
    PexEffect,
    PexArrive,
    PexItemDone,
    PexEndDone,
    BarrierRelease,
};

enum class TransitionKind : std::uint8_t { ClockTick, ChannelHandshake, LocalStep };

/// One atomic step of the transition system. actor/peer are pids; for
/// handshakes the actor is the sending side. arg carries op-specific data
/// (workgroup number, activation round, instruction cursor) for labeling and
/// replay validation.
struct Transition {
    std::uint16_t actor = 0;
    std::uint16_t peer = 0xffff;
    Op op = Op::ClockTick;
    std::int32_t arg = 0;

    TransitionKind kind() const;
    bool operator==(const Transition&) const = default;
};

struct HostState {
    HostPc pc = HostPc::SendGo;
    std::int32_t k = 0;  // progress counter of the current phase
    bool operator==(const HostState&) const = default;
};
struct DeviceState {
    DevicePc pc = DevicePc::WaitGo;
    std::int32_t k = 0;
    std::int32_t batch_base = 0;  // first workgroup id of the current round
    bool operator==(const DeviceState&) const = default;
};
struct UnitState {
    UnitPc pc = UnitPc::WaitGo;
    std::int32_t k = 0;
    std::int32_t nwg = 0;        // workgroup being served
    std::int32_t sent = 0;       // activations dispatched for this workgroup
    std::int32_t got_items = 0;  // work-item completions received
    std::int32_t got_ends = 0;   // group-end completions received
    bool operator==(const UnitState&) const = default;
};
struct BarrierState {
    BarrierPc pc = BarrierPc::Counting;
    std::int32_t count = 0;
    bool operator==(const BarrierState&) const = default;
};
struct PexState {
    PexPc pc = PexPc::WaitGo;
    PexPhase phase = PexPhase::Activation;
    std::int32_t cursor = 0;
    std::int32_t busy_left = 0;
    bool reported = false;
    std::int32_t nwg = 0;
    std::int32_t iter = 0;
    bool operator==(const PexState&) const = default;
};

/// Full explicit state. Value type: apply() copies, never mutates.
struct MachineState {
    Tick time = 0;
    std::int32_t nrp_work = 0;  // busy elements that reported this tick
    std::int32_t all_nwe = 0;   // elements currently obligated to report
    bool fin = false;
    std::int32_t next_wg = 0;   // workgroup dispatch counter

    HostState host;
    ClockPc clock = ClockPc::Run;
    std::vector<DeviceState> devices;
    std::vector<UnitState> units;
    std::vector<BarrierState> barriers;
    std::vector<PexState> pexes;

    std::vector<std::int64_t> glob;  // minimum kernel only
    std::vector<std::int64_t> loc;   // minimum kernel only

    bool operator==(const MachineState&) const = default;
};

enum class SchedPolicy : std::uint8_t { RoundRobin, SeededRandom };

struct RunOutcome {
    Tick time = 0;
    std::optional<std::int64_t> result;  // glob[0] for the minimum kernel
    long long steps = 0;                 // transitions applied
};

/// The transition system for one (platform, problem, params) choice.
///
/// Semantics in brief: a lock-step clock advances model time by one tick
/// once every currently active processing element has reported a unit of
/// work; handshakes and memory effects take no model time. The host serves
/// workgroup rounds to devices, devices to units, units to elements; a
/// barrier per unit releases its waiters only when all of them arrived.
class Machine {
public:
    Machine(PlatformConfig platform, ProblemSpec problem, TuningParams params);

    const PlatformConfig platform;
    const ProblemSpec problem;
    const TuningParams params;
    const LaunchPlan plan;
    const KernelProgram program;

    int rounds() const { return rounds_; }           // pex activations per workgroup
    int device_rounds() const { return device_rounds_; }  // go rounds over all devices
    int process_count() const { return static_cast<int>(roles_.size()); }

    MachineState initial_state() const;

    /// Every transition permitted by the rules, in ascending actor pid order.
    std::vector<Transition> enabled(const MachineState& s) const;

    /// Successor state. Throws ModelBug when t is not enabled in s.
    MachineState apply(const MachineState& s, const Transition& t) const;

    /// Terminal: computation finished and every process has exited.
    bool is_terminal(const MachineState& s) const;
    /// Final model time; only meaningful on terminal states (throws otherwise).
    Tick final_time(const MachineState& s) const;

    /// Canonical byte serialization covering every state field.
    void serialize(const MachineState& s, std::string& out) const;
    std::string serialize(const MachineState& s) const;
    std::uint64_t fingerprint(const MachineState& s) const;

    /// Structural invariants checked during exhaustive exploration.
    /// Throws ModelBug with a description on violation.
    void check_invariants(const MachineState& s) const;

    std::string process_name(int pid) const;
    Role role_of(int pid) const { return roles_[static_cast<std::size_t>(pid)]; }
    std::string label(const Transition& t) const;

    int pid_main() const { return 0; }
    int pid_host() const { return 1; }
    int pid_clock() const { return 2; }
    int device_pid(int d) const { return device_pids_[static_cast<std::size_t>(d)]; }
    int unit_pid(int g) const { return unit_pids_[static_cast<std::size_t>(g)]; }
    int barrier_pid(int g) const { return barrier_pids_[static_cast<std::size_t>(g)]; }
    int pex_pid(int g, int me) const { return pex_pids_[static_cast<std::size_t>(g * plan.nwe + me)]; }

    int pex_me(int pex_index) const { return pex_index % plan.nwe; }
    int pex_unit(int pex_index) const { return pex_index / plan.nwe; }
    int myloc(int pex_index) const { return pex_unit(pex_index) * platform.np + pex_me(pex_index); }

    /// Picks one enabled transition per policy until terminal.
    RunOutcome run(SchedPolicy policy, std::uint64_t seed = 0,
                   std::vector<Transition>* trace_out = nullptr,
                   long long max_steps = kDefaultMaxRunSteps) const;

    static constexpr long long kDefaultMaxRunSteps = 200'000'000;

private:
    int rounds_ = 1;
    int device_rounds_ = 1;
    int host_reacts_ = 0;

    std::vector<Role> roles_;
    std::vector<int> device_pids_, unit_pids_, barrier_pids_, pex_pids_;
    std::vector<int> ordinal_of_pid_;

    const CostInstr& instr_at(const PexState& px) const;
    void place_pex(MachineState& s, int pex_index) const;
    void start_activation(MachineState& s, int pex_index, int nwg, int iter) const;
    int iter_of_next_send(const UnitState& u) const { return u.sent / plan.nwe; }
    std::int64_t read_ref(const MachineState& s, const MemRef& r, int shift, int slot) const;
    std::int64_t& write_ref(MachineState& s, const MemRef& r, int shift, int slot) const;
    void fail(const std::string& what) const;
};

/// 64-bit FNV-1a with a splitmix finalizer.
std::uint64_t hash64(const std::string& bytes);

}  // namespace mctune

#endif  // MCTUNE_MACHINE_HPP
