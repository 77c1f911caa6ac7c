#include "mctune/machine.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

namespace mctune {

namespace {

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_i32(std::string& out, std::int32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& out, std::int64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

std::uint64_t hash64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    // splitmix finalizer
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

const char* to_string(Role r) {
    switch (r) {
        case Role::Main: return "main";
        case Role::Host: return "host";
        case Role::Clock: return "clock";
        case Role::Device: return "device";
        case Role::Unit: return "unit";
        case Role::Barrier: return "barrier";
        case Role::Pex: return "pex";
    }
    return "?";
}

TransitionKind Transition::kind() const {
    switch (op) {
        case Op::ClockTick: return TransitionKind::ClockTick;
        case Op::ClockHalt:
        case Op::HostSetFin:
        case Op::PexReport:
        case Op::PexEffect: return TransitionKind::LocalStep;
        default: return TransitionKind::ChannelHandshake;
    }
}

Machine::Machine(PlatformConfig platform_in, ProblemSpec problem_in, TuningParams params_in)
    : platform(platform_in),
      problem(problem_in),
      params(params_in),
      plan(derive_launch(platform_in, problem_in.size, params_in)),
      program(problem_in.kernel == KernelKind::Abstract
                  ? build_abstract_kernel(problem_in.size, params_in, platform_in)
                  : build_minimum_kernel(problem_in.size, params_in, platform_in,
                                         problem_in.input)) {
    problem.validate();
    rounds_ = params.wg / plan.nwe;
    device_rounds_ = plan.wgs / plan.nwu;
    if (device_rounds_ < 1) device_rounds_ = 1;
    host_reacts_ = device_rounds_ - plan.nwd;

    roles_.push_back(Role::Main);
    roles_.push_back(Role::Host);
    roles_.push_back(Role::Clock);
    for (int d = 0; d < plan.nwd; ++d) {
        device_pids_.push_back(static_cast<int>(roles_.size()));
        roles_.push_back(Role::Device);
        for (int u = 0; u < plan.nwu; ++u) {
            unit_pids_.push_back(static_cast<int>(roles_.size()));
            roles_.push_back(Role::Unit);
            barrier_pids_.push_back(static_cast<int>(roles_.size()));
            roles_.push_back(Role::Barrier);
            for (int e = 0; e < plan.nwe; ++e) {
                pex_pids_.push_back(static_cast<int>(roles_.size()));
                roles_.push_back(Role::Pex);
            }
        }
    }
    ordinal_of_pid_.assign(roles_.size(), -1);
    for (std::size_t i = 0; i < device_pids_.size(); ++i)
        ordinal_of_pid_[static_cast<std::size_t>(device_pids_[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < unit_pids_.size(); ++i)
        ordinal_of_pid_[static_cast<std::size_t>(unit_pids_[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < barrier_pids_.size(); ++i)
        ordinal_of_pid_[static_cast<std::size_t>(barrier_pids_[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < pex_pids_.size(); ++i)
        ordinal_of_pid_[static_cast<std::size_t>(pex_pids_[i])] = static_cast<int>(i);
}

std::string Machine::process_name(int pid) const {
    Role r = role_of(pid);
    switch (r) {
        case Role::Main: return "main";
        case Role::Host: return "host";
        case Role::Clock: return "clock";
        default: break;
    }
    return std::string(to_string(r)) +
           std::to_string(ordinal_of_pid_[static_cast<std::size_t>(pid)]);
}

MachineState Machine::initial_state() const {
    MachineState s;
    s.all_nwe = plan.all_nwe;
    s.devices.resize(static_cast<std::size_t>(plan.nwd));
    s.units.resize(static_cast<std::size_t>(plan.nwd * plan.nwu));
    s.barriers.resize(static_cast<std::size_t>(plan.nwd * plan.nwu));
    s.pexes.resize(static_cast<std::size_t>(plan.nwd * plan.nwu * plan.nwe));
    if (problem.kernel == KernelKind::Minimum) {
        s.glob = problem.input;
        s.loc.assign(static_cast<std::size_t>(plan.nwd * plan.nwu * platform.np),
                     std::numeric_limits<std::int64_t>::max());
    }
    return s;
}

const CostInstr& Machine::instr_at(const PexState& px) const {
    const auto& seq =
        px.phase == PexPhase::Activation ? program.per_activation : program.epilogue;
    return seq[static_cast<std::size_t>(px.cursor)];
}

void Machine::place_pex(MachineState& s, int pex_index) const {
    PexState& px = s.pexes[static_cast<std::size_t>(pex_index)];
    const CostInstr& in = instr_at(px);
    switch (in.kind) {
        case CostInstr::Kind::Busy:
            px.pc = PexPc::Run;
            px.busy_left = static_cast<std::int32_t>(in.ticks);
            px.reported = false;
            break;
        case CostInstr::Kind::Effect:
            px.pc = PexPc::Run;
            px.busy_left = 0;
            break;
        case CostInstr::Kind::LocalBarrier:
            px.pc = PexPc::ArriveBarrier;
            break;
        case CostInstr::Kind::ActivationEnd:
            if (px.phase == PexPhase::Epilogue) {
                px.pc = PexPc::SendEndDone;
            } else if (program.kind == KernelKind::Minimum && px.iter == rounds_ - 1) {
                px.pc = PexPc::ArriveGroupEnd;
            } else {
                px.pc = PexPc::SendItemDone;
            }
            break;
    }
}

void Machine::start_activation(MachineState& s, int pex_index, int nwg, int iter) const {
    PexState& px = s.pexes[static_cast<std::size_t>(pex_index)];
    px = PexState{};
    px.nwg = nwg;
    px.iter = iter;
    px.phase = PexPhase::Activation;
    px.cursor = 0;
    place_pex(s, pex_index);
}

std::vector<Transition> Machine::enabled(const MachineState& s) const {
    std::vector<Transition> out;
    const auto host_pid = static_cast<std::uint16_t>(pid_host());
    const auto clock_pid = static_cast<std::uint16_t>(pid_clock());

    // host
    switch (s.host.pc) {
        case HostPc::SendGo:
            for (int d = 0; d < plan.nwd; ++d)
                if (s.devices[static_cast<std::size_t>(d)].pc == DevicePc::WaitGo)
                    out.push_back({host_pid, static_cast<std::uint16_t>(device_pid(d)),
                                   Op::HostGo, s.host.k});
            break;
        case HostPc::ReactGo:
            for (int d = 0; d < plan.nwd; ++d)
                if (s.devices[static_cast<std::size_t>(d)].pc == DevicePc::WaitGo)
                    out.push_back({host_pid, static_cast<std::uint16_t>(device_pid(d)),
                                   Op::HostReactGo, s.host.k});
            break;
        case HostPc::SendStop:
            for (int d = 0; d < plan.nwd; ++d)
                if (s.devices[static_cast<std::size_t>(d)].pc == DevicePc::WaitGo)
                    out.push_back({host_pid, static_cast<std::uint16_t>(device_pid(d)),
                                   Op::HostStop, s.host.k});
            break;
        case HostPc::SetFin:
            out.push_back({host_pid, 0xffff, Op::HostSetFin, 0});
            break;
        default:
            break;
    }

    // clock
    if (s.clock == ClockPc::Run) {
        if (s.fin) out.push_back({clock_pid, 0xffff, Op::ClockHalt, 0});
        if (s.all_nwe != 0 && s.nrp_work == s.all_nwe)
            out.push_back({clock_pid, 0xffff, Op::ClockTick, 0});
    }

    // devices
    for (int d = 0; d < plan.nwd; ++d) {
        const DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
        const auto dpid = static_cast<std::uint16_t>(device_pid(d));
        switch (dev.pc) {
            case DevicePc::SendUnitGo:
                for (int u = 0; u < plan.nwu; ++u) {
                    const int g = d * plan.nwu + u;
                    if (s.units[static_cast<std::size_t>(g)].pc == UnitPc::WaitGo)
                        out.push_back({dpid, static_cast<std::uint16_t>(unit_pid(g)),
                                       Op::DeviceUnitGo, dev.batch_base + dev.k});
                }
                break;
            case DevicePc::SendDone:
                if (s.host.pc == HostPc::WaitDoneReact || s.host.pc == HostPc::WaitDoneStop)
                    out.push_back({dpid, host_pid, Op::DeviceDone, 0});
                break;
            case DevicePc::StopUnits:
                for (int u = 0; u < plan.nwu; ++u) {
                    const int g = d * plan.nwu + u;
                    if (s.units[static_cast<std::size_t>(g)].pc == UnitPc::WaitGo)
                        out.push_back({dpid, static_cast<std::uint16_t>(unit_pid(g)),
                                       Op::DeviceUnitStop, 0});
                }
                break;
            default:
                break;
        }
    }

    // units
    const int unit_count = plan.nwd * plan.nwu;
    for (int g = 0; g < unit_count; ++g) {
        const UnitState& un = s.units[static_cast<std::size_t>(g)];
        const auto upid = static_cast<std::uint16_t>(unit_pid(g));
        switch (un.pc) {
            case UnitPc::ActivatePex:
            case UnitPc::ReactPex:
                for (int e = 0; e < plan.nwe; ++e) {
                    const int p = g * plan.nwe + e;
                    if (s.pexes[static_cast<std::size_t>(p)].pc == PexPc::WaitGo)
                        out.push_back({upid, static_cast<std::uint16_t>(pex_pid(g, e)),
                                       Op::UnitPexGo, iter_of_next_send(un)});
                }
                break;
            case UnitPc::SendUnitDone: {
                const int d = g / plan.nwu;
                if (s.devices[static_cast<std::size_t>(d)].pc == DevicePc::WaitUnitDone)
                    out.push_back({upid, static_cast<std::uint16_t>(device_pid(d)),
                                   Op::UnitDone, un.nwg});
                break;
            }
            case UnitPc::StopPexes:
                for (int e = 0; e < plan.nwe; ++e) {
                    const int p = g * plan.nwe + e;
                    if (s.pexes[static_cast<std::size_t>(p)].pc == PexPc::WaitGo)
                        out.push_back({upid, static_cast<std::uint16_t>(pex_pid(g, e)),
                                       Op::UnitPexStop, 0});
                }
                break;
            case UnitPc::StopBarrier:
                if (s.barriers[static_cast<std::size_t>(g)].pc == BarrierPc::Counting &&
                    s.barriers[static_cast<std::size_t>(g)].count == 0)
                    out.push_back({upid, static_cast<std::uint16_t>(barrier_pid(g)),
                                   Op::UnitBarrierStop, 0});
                break;
            default:
                break;
        }
    }

    // barriers
    for (int g = 0; g < unit_count; ++g) {
        const BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
        if (b.pc == BarrierPc::Counting && b.count == plan.nwe)
            out.push_back({static_cast<std::uint16_t>(barrier_pid(g)), 0xffff,
                           Op::BarrierRelease, 0});
    }

    // processing elements
    const int pex_count = unit_count * plan.nwe;
    for (int p = 0; p < pex_count; ++p) {
        const PexState& px = s.pexes[static_cast<std::size_t>(p)];
        const int g = pex_unit(p);
        const auto ppid = static_cast<std::uint16_t>(pex_pid(g, pex_me(p)));
        switch (px.pc) {
            case PexPc::Run: {
                const CostInstr& in = instr_at(px);
                if (in.kind == CostInstr::Kind::Busy) {
                    if (px.busy_left > 0 && !px.reported)
                        out.push_back({ppid, 0xffff, Op::PexReport, 0});
                } else if (in.kind == CostInstr::Kind::Effect) {
                    out.push_back({ppid, 0xffff, Op::PexEffect, px.cursor});
                }
                break;
            }
            case PexPc::ArriveBarrier:
            case PexPc::ArriveGroupEnd: {
                const BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
                if (b.pc == BarrierPc::Counting && b.count < plan.nwe)
                    out.push_back({ppid, static_cast<std::uint16_t>(barrier_pid(g)),
                                   Op::PexArrive, 0});
                break;
            }
            case PexPc::SendItemDone:
                if (s.units[static_cast<std::size_t>(g)].pc == UnitPc::Serve)
                    out.push_back({ppid, static_cast<std::uint16_t>(unit_pid(g)),
                                   Op::PexItemDone, px.iter});
                break;
            case PexPc::SendEndDone:
                if (s.units[static_cast<std::size_t>(g)].pc == UnitPc::Serve)
                    out.push_back({ppid, static_cast<std::uint16_t>(unit_pid(g)),
                                   Op::PexEndDone, 0});
                break;
            default:
                break;
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
        return a.actor < b.actor;
    });
    return out;
}

void Machine::fail(const std::string& what) const {
    throw ModelBug("machine (wg=" + std::to_string(params.wg) +
                   ", ts=" + std::to_string(params.ts) + "): " + what);
}

std::int64_t Machine::read_ref(const MachineState& s, const MemRef& r, int shift,
                               int slot) const {
    const int idx = r.resolve(shift, slot);
    const auto& arr = r.space() == MemSpace::Global ? s.glob : s.loc;
    if (idx < 0 || static_cast<std::size_t>(idx) >= arr.size())
        fail("memory read out of range: index " + std::to_string(idx));
    return arr[static_cast<std::size_t>(idx)];
}

std::int64_t& Machine::write_ref(MachineState& s, const MemRef& r, int shift,
                                 int slot) const {
    const int idx = r.resolve(shift, slot);
    auto& arr = r.space() == MemSpace::Global ? s.glob : s.loc;
    if (idx < 0 || static_cast<std::size_t>(idx) >= arr.size())
        fail("memory write out of range: index " + std::to_string(idx));
    return arr[static_cast<std::size_t>(idx)];
}

MachineState Machine::apply(const MachineState& in, const Transition& t) const {
    MachineState s = in;
    const auto require = [&](bool ok, const char* what) {
        if (!ok) fail(std::string("transition not enabled: ") + what + " [" + label(t) + "]");
    };

    switch (t.op) {
        case Op::ClockTick: {
            require(s.clock == ClockPc::Run && s.all_nwe != 0 && s.nrp_work == s.all_nwe,
                    "clock tick guard");
            s.nrp_work = 0;
            s.time += 1;
            const int pex_count = static_cast<int>(s.pexes.size());
            for (int p = 0; p < pex_count; ++p) {
                PexState& px = s.pexes[static_cast<std::size_t>(p)];
                if (!px.reported) continue;
                require(px.pc == PexPc::Run && px.busy_left > 0, "reported element is busy");
                px.reported = false;
                px.busy_left -= 1;
                if (px.busy_left == 0) {
                    px.cursor += 1;
                    place_pex(s, p);
                }
            }
            break;
        }
        case Op::ClockHalt:
            require(s.clock == ClockPc::Run && s.fin, "clock halt guard");
            s.clock = ClockPc::Exited;
            break;
        case Op::HostGo:
        case Op::HostReactGo: {
            const bool react = t.op == Op::HostReactGo;
            require(s.host.pc == (react ? HostPc::ReactGo : HostPc::SendGo), "host send pc");
            const int d = ordinal_of_pid_[t.peer];
            require(role_of(t.peer) == Role::Device, "peer is a device");
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::WaitGo, "device awaits go");
            if (s.next_wg + plan.nwu > plan.wgs) fail("workgroup dispatch overflow");
            if (react) s.all_nwe += plan.nwe * plan.nwu;
            dev.batch_base = s.next_wg;
            s.next_wg += plan.nwu;
            dev.pc = DevicePc::SendUnitGo;
            dev.k = 0;
            s.host.k += 1;
            if (react) {
                if (s.host.k < host_reacts_) {
                    s.host.pc = HostPc::WaitDoneReact;
                } else {
                    s.host.pc = HostPc::WaitDoneStop;
                    s.host.k = 0;
                }
            } else if (s.host.k == plan.nwd) {
                s.host.pc = host_reacts_ > 0 ? HostPc::WaitDoneReact : HostPc::WaitDoneStop;
                s.host.k = 0;
            }
            break;
        }
        case Op::HostStop: {
            require(s.host.pc == HostPc::SendStop, "host stop pc");
            const int d = ordinal_of_pid_[t.peer];
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::WaitGo, "device awaits stop");
            dev.pc = DevicePc::StopUnits;
            dev.k = 0;
            s.host.k += 1;
            s.host.pc = s.host.k == plan.nwd ? HostPc::SetFin : HostPc::WaitDoneStop;
            break;
        }
        case Op::HostSetFin:
            require(s.host.pc == HostPc::SetFin, "host fin pc");
            s.fin = true;
            s.host.pc = HostPc::Exited;
            break;
        case Op::DeviceUnitGo: {
            const int d = ordinal_of_pid_[t.actor];
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::SendUnitGo, "device go pc");
            const int g = ordinal_of_pid_[t.peer];
            require(g / plan.nwu == d, "unit belongs to device");
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::WaitGo, "unit awaits go");
            const int nwg = dev.batch_base + dev.k;
            require(t.arg == nwg, "workgroup number matches");
            un = UnitState{};
            un.pc = UnitPc::ActivatePex;
            un.nwg = nwg;
            dev.k += 1;
            if (dev.k == plan.nwu) {
                dev.pc = DevicePc::WaitUnitDone;
                dev.k = 0;
            }
            break;
        }
        case Op::DeviceDone: {
            const int d = ordinal_of_pid_[t.actor];
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::SendDone, "device done pc");
            require(s.host.pc == HostPc::WaitDoneReact || s.host.pc == HostPc::WaitDoneStop,
                    "host awaits done");
            s.host.pc = s.host.pc == HostPc::WaitDoneReact ? HostPc::ReactGo : HostPc::SendStop;
            dev = DeviceState{};
            break;
        }
        case Op::DeviceUnitStop: {
            const int d = ordinal_of_pid_[t.actor];
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::StopUnits, "device stop pc");
            const int g = ordinal_of_pid_[t.peer];
            require(g / plan.nwu == d, "unit belongs to device");
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::WaitGo, "unit awaits stop");
            un.pc = UnitPc::StopPexes;
            un.k = 0;
            dev.k += 1;
            if (dev.k == plan.nwu) dev.pc = DevicePc::Exited;
            break;
        }
        case Op::UnitPexGo: {
            const int g = ordinal_of_pid_[t.actor];
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::ActivatePex || un.pc == UnitPc::ReactPex, "unit go pc");
            const int p = ordinal_of_pid_[t.peer];
            require(pex_unit(p) == g, "element belongs to unit");
            require(s.pexes[static_cast<std::size_t>(p)].pc == PexPc::WaitGo,
                    "element awaits go");
            const int iter = iter_of_next_send(un);
            require(t.arg == iter, "round number matches");
            start_activation(s, p, un.nwg, iter);
            un.sent += 1;
            if (un.pc == UnitPc::ActivatePex) {
                un.k += 1;
                if (un.k == plan.nwe) {
                    un.pc = UnitPc::Serve;
                    un.k = 0;
                }
            } else {
                un.pc = UnitPc::Serve;
            }
            break;
        }
        case Op::UnitDone: {
            const int g = ordinal_of_pid_[t.actor];
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::SendUnitDone, "unit done pc");
            const int d = g / plan.nwu;
            DeviceState& dev = s.devices[static_cast<std::size_t>(d)];
            require(dev.pc == DevicePc::WaitUnitDone, "device awaits unit done");
            if (program.kind == KernelKind::Abstract) s.all_nwe -= plan.nwe;
            un = UnitState{};
            dev.k += 1;
            if (dev.k == plan.nwu) {
                dev.pc = DevicePc::SendDone;
                dev.k = 0;
            }
            break;
        }
        case Op::UnitPexStop: {
            const int g = ordinal_of_pid_[t.actor];
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::StopPexes, "unit stop pc");
            const int p = ordinal_of_pid_[t.peer];
            require(pex_unit(p) == g, "element belongs to unit");
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::WaitGo, "element awaits stop");
            px.pc = PexPc::Exited;
            un.k += 1;
            if (un.k == plan.nwe) un.pc = UnitPc::StopBarrier;
            break;
        }
        case Op::UnitBarrierStop: {
            const int g = ordinal_of_pid_[t.actor];
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::StopBarrier, "unit stop-barrier pc");
            BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
            require(b.pc == BarrierPc::Counting && b.count == 0, "barrier is idle");
            b.pc = BarrierPc::Exited;
            un.pc = UnitPc::Exited;
            break;
        }
        case Op::PexReport: {
            const int p = ordinal_of_pid_[t.actor];
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::Run, "element running");
            require(instr_at(px).kind == CostInstr::Kind::Busy && px.busy_left > 0 &&
                        !px.reported,
                    "element has busy work and has not reported");
            px.reported = true;
            s.nrp_work += 1;
            break;
        }
        case Op::PexEffect: {
            const int p = ordinal_of_pid_[t.actor];
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::Run, "element running");
            const CostInstr& instr = instr_at(px);
            require(instr.kind == CostInstr::Kind::Effect, "effect instruction");
            require(t.arg == px.cursor, "cursor matches");
            const int gid = global_item_id(params, platform.np, px.nwg, pex_me(p), px.iter);
            const int shift = gid * params.ts;
            const int slot = myloc(p);
            const std::int64_t v = read_ref(s, instr.src, shift, slot);
            std::int64_t& dst = write_ref(s, instr.dst, shift, slot);
            if (v < dst) dst = v;
            px.cursor += 1;
            place_pex(s, p);
            break;
        }
        case Op::PexArrive: {
            const int p = ordinal_of_pid_[t.actor];
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::ArriveBarrier || px.pc == PexPc::ArriveGroupEnd,
                    "element arriving");
            const int g = pex_unit(p);
            BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
            require(b.pc == BarrierPc::Counting && b.count < plan.nwe, "barrier counting");
            b.count += 1;
            px.pc = px.pc == PexPc::ArriveBarrier ? PexPc::WaitBarrier : PexPc::WaitGroupEnd;
            break;
        }
        case Op::BarrierRelease: {
            const int g = ordinal_of_pid_[t.actor];
            BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
            require(b.pc == BarrierPc::Counting && b.count == plan.nwe, "all arrived");
            int waiting_kernel = 0, waiting_group = 0;
            for (int e = 0; e < plan.nwe; ++e) {
                const PexPc pc = s.pexes[static_cast<std::size_t>(g * plan.nwe + e)].pc;
                waiting_kernel += pc == PexPc::WaitBarrier;
                waiting_group += pc == PexPc::WaitGroupEnd;
            }
            require(waiting_kernel == plan.nwe || waiting_group == plan.nwe,
                    "waiters at one barrier instance");
            b.count = 0;
            if (waiting_kernel == plan.nwe) {
                for (int e = 0; e < plan.nwe; ++e) {
                    const int p = g * plan.nwe + e;
                    PexState& px = s.pexes[static_cast<std::size_t>(p)];
                    px.cursor += 1;
                    place_pex(s, p);
                }
            } else {
                // Group end: only the reducing element stays active.
                s.all_nwe -= plan.nwe - 1;
                for (int e = 0; e < plan.nwe; ++e) {
                    const int p = g * plan.nwe + e;
                    PexState& px = s.pexes[static_cast<std::size_t>(p)];
                    if (pex_me(p) == 0 && program.has_epilogue()) {
                        px.phase = PexPhase::Epilogue;
                        px.cursor = 0;
                        place_pex(s, p);
                    } else {
                        px.pc = PexPc::SendEndDone;
                    }
                }
            }
            break;
        }
        case Op::PexItemDone: {
            const int p = ordinal_of_pid_[t.actor];
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::SendItemDone, "element item-done pc");
            const int g = pex_unit(p);
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::Serve, "unit serving");
            un.got_items += 1;
            px = PexState{};
            if (un.sent < params.wg) {
                un.pc = UnitPc::ReactPex;
            } else if (program.kind == KernelKind::Abstract && un.got_items == params.wg) {
                un.pc = UnitPc::SendUnitDone;
            }
            break;
        }
        case Op::PexEndDone: {
            const int p = ordinal_of_pid_[t.actor];
            PexState& px = s.pexes[static_cast<std::size_t>(p)];
            require(px.pc == PexPc::SendEndDone, "element end-done pc");
            const int g = pex_unit(p);
            UnitState& un = s.units[static_cast<std::size_t>(g)];
            require(un.pc == UnitPc::Serve, "unit serving");
            un.got_ends += 1;
            if (pex_me(p) == 0) s.all_nwe -= 1;
            px = PexState{};
            if (un.got_ends == plan.nwe) un.pc = UnitPc::SendUnitDone;
            break;
        }
    }
    return s;
}

bool Machine::is_terminal(const MachineState& s) const {
    if (!s.fin || s.clock != ClockPc::Exited || s.host.pc != HostPc::Exited) return false;
    for (const auto& d : s.devices)
        if (d.pc != DevicePc::Exited) return false;
    for (const auto& u : s.units)
        if (u.pc != UnitPc::Exited) return false;
    for (const auto& b : s.barriers)
        if (b.pc != BarrierPc::Exited) return false;
    for (const auto& p : s.pexes)
        if (p.pc != PexPc::Exited) return false;
    return true;
}

Tick Machine::final_time(const MachineState& s) const {
    if (!is_terminal(s)) fail("final_time on a non-terminal state");
    return s.time;
}

void Machine::serialize(const MachineState& s, std::string& out) const {
    put_i64(out, s.time);
    put_i32(out, s.nrp_work);
    put_i32(out, s.all_nwe);
    put_u8(out, s.fin);
    put_i32(out, s.next_wg);
    put_u8(out, static_cast<std::uint8_t>(s.host.pc));
    put_i32(out, s.host.k);
    put_u8(out, static_cast<std::uint8_t>(s.clock));
    for (const auto& d : s.devices) {
        put_u8(out, static_cast<std::uint8_t>(d.pc));
        put_i32(out, d.k);
        put_i32(out, d.batch_base);
    }
    for (const auto& u : s.units) {
        put_u8(out, static_cast<std::uint8_t>(u.pc));
        put_i32(out, u.k);
        put_i32(out, u.nwg);
        put_i32(out, u.sent);
        put_i32(out, u.got_items);
        put_i32(out, u.got_ends);
    }
    for (const auto& b : s.barriers) {
        put_u8(out, static_cast<std::uint8_t>(b.pc));
        put_i32(out, b.count);
    }
    for (const auto& p : s.pexes) {
        put_u8(out, static_cast<std::uint8_t>(p.pc));
        put_u8(out, static_cast<std::uint8_t>(p.phase));
        put_i32(out, p.cursor);
        put_i32(out, p.busy_left);
        put_u8(out, p.reported);
        put_i32(out, p.nwg);
        put_i32(out, p.iter);
    }
    for (std::int64_t v : s.glob) put_i64(out, v);
    for (std::int64_t v : s.loc) put_i64(out, v);
}

std::string Machine::serialize(const MachineState& s) const {
    std::string out;
    out.reserve(64 + s.pexes.size() * 19 + (s.glob.size() + s.loc.size()) * 8);
    serialize(s, out);
    return out;
}

std::uint64_t Machine::fingerprint(const MachineState& s) const {
    return hash64(serialize(s));
}

void Machine::check_invariants(const MachineState& s) const {
    if (s.nrp_work < 0 || s.nrp_work > s.all_nwe)
        fail("invariant: nrp_work out of [0, all_nwe]");
    if (s.all_nwe < 0 || s.all_nwe > plan.all_nwe) fail("invariant: all_nwe out of range");
    const int unit_count = plan.nwd * plan.nwu;
    for (int g = 0; g < unit_count; ++g) {
        const BarrierState& b = s.barriers[static_cast<std::size_t>(g)];
        int waiting = 0;
        std::int32_t cursor = -1;
        PexPhase phase = PexPhase::Activation;
        bool mixed = false;
        for (int e = 0; e < plan.nwe; ++e) {
            const PexState& px = s.pexes[static_cast<std::size_t>(g * plan.nwe + e)];
            if (px.pc == PexPc::WaitBarrier || px.pc == PexPc::WaitGroupEnd) {
                if (waiting == 0) {
                    cursor = px.cursor;
                    phase = px.phase;
                } else if (px.cursor != cursor || px.phase != phase) {
                    mixed = true;
                }
                ++waiting;
            }
        }
        if (b.pc == BarrierPc::Counting && b.count != waiting)
            fail("invariant: barrier count disagrees with waiting elements");
        if (b.count > plan.nwe) fail("invariant: barrier over-counted");
        if (mixed) fail("invariant: elements waiting at different barrier instances");
    }
    if (s.fin) {
        for (const auto& u : s.units)
            if (u.pc != UnitPc::WaitGo && u.pc != UnitPc::StopPexes &&
                u.pc != UnitPc::StopBarrier && u.pc != UnitPc::Exited)
                fail("invariant: unit still serving after fin");
        for (const auto& p : s.pexes)
            if (p.pc != PexPc::WaitGo && p.pc != PexPc::Exited)
                fail("invariant: element still working after fin");
    }
}

std::string Machine::label(const Transition& t) const {
    std::ostringstream os;
    switch (t.op) {
        case Op::ClockTick: os << "tick"; break;
        case Op::ClockHalt: os << "halt"; break;
        case Op::HostGo: os << "go -> " << process_name(t.peer); break;
        case Op::HostReactGo: os << "go(react) -> " << process_name(t.peer); break;
        case Op::HostStop: os << "stop -> " << process_name(t.peer); break;
        case Op::HostSetFin: os << "fin"; break;
        case Op::DeviceUnitGo:
            os << "go(wg" << t.arg << ") -> " << process_name(t.peer);
            break;
        case Op::DeviceDone: os << "done -> host"; break;
        case Op::DeviceUnitStop: os << "stop -> " << process_name(t.peer); break;
        case Op::UnitPexGo:
            os << "go(round" << t.arg << ") -> " << process_name(t.peer);
            break;
        case Op::UnitDone: os << "done(wg" << t.arg << ") -> " << process_name(t.peer); break;
        case Op::UnitPexStop: os << "stop -> " << process_name(t.peer); break;
        case Op::UnitBarrierStop: os << "stop -> " << process_name(t.peer); break;
        case Op::PexReport: os << "report"; break;
        case Op::PexEffect: os << "effect[" << t.arg << "]"; break;
        case Op::PexArrive: os << "barrier-arrive -> " << process_name(t.peer); break;
        case Op::PexItemDone: os << "item-done -> " << process_name(t.peer); break;
        case Op::PexEndDone: os << "group-done -> " << process_name(t.peer); break;
        case Op::BarrierRelease: os << "barrier-release"; break;
    }
    return os.str();
}

RunOutcome Machine::run(SchedPolicy policy, std::uint64_t seed,
                        std::vector<Transition>* trace_out, long long max_steps) const {
    MachineState s = initial_state();
    std::mt19937_64 rng(seed);
    RunOutcome out;
    int rr_next = 0;
    while (true) {
        const auto en = enabled(s);
        if (en.empty()) {
            if (is_terminal(s)) {
                out.time = s.time;
                if (problem.kernel == KernelKind::Minimum) out.result = s.glob[0];
                return out;
            }
            fail("deadlock: non-terminal state with no enabled transition at time " +
                 std::to_string(s.time));
        }
        if (out.steps >= max_steps) fail("run exceeded the step limit");
        std::size_t pick = 0;
        if (policy == SchedPolicy::SeededRandom) {
            pick = static_cast<std::size_t>(rng() % en.size());
        } else {
            // rotate priority over pids
            pick = en.size();
            for (std::size_t i = 0; i < en.size(); ++i) {
                if (en[i].actor >= rr_next) {
                    pick = i;
                    break;
                }
            }
            if (pick == en.size()) pick = 0;
            rr_next = (en[pick].actor + 1) % process_count();
        }
        if (trace_out) trace_out->push_back(en[pick]);
        s = apply(s, en[pick]);
        out.steps += 1;
    }
}

}  // namespace mctune
