#include "mctune/search.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <random>
#include <thread>

namespace mctune {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<TuningParams> feasible_configs(const ProblemSpec& problem) {
    std::vector<TuningParams> out;
    for (const auto& cfg : enumerate_configs(problem.size))
        if (config_feasible(problem, cfg)) out.push_back(cfg);
    return out;
}

struct SwarmRound {
    std::vector<Trace> traces;
    double wall_seconds = 0.0;
    ExploreStats stats;
};

SwarmRound run_swarm_round(const PlatformConfig& platform, const ProblemSpec& problem,
                           const Property& property, int workers, double budget_secs,
                           const ExploreLimits& base, std::uint64_t round_seed) {
    SwarmRound round;
    ExploreLimits limits = base;
    limits.mode = ExploreLimits::Mode::Bitstate;
    limits.wall_budget_secs = budget_secs;

    const auto t0 = Clock::now();
    std::atomic<bool> stop{false};
    std::mutex sink_mutex;  // append-only trace sink shared by the workers

    auto work = [&](int w) {
        ExploreStats stats;
        auto traces = swarm_worker(platform, problem, property,
                                   round_seed + static_cast<std::uint64_t>(w), limits,
                                   &stats, &stop);
        std::lock_guard<std::mutex> lock(sink_mutex);
        for (auto& t : traces) round.traces.push_back(std::move(t));
        round.stats.absorb(stats);
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    stop.store(true);
    round.wall_seconds = seconds_since(t0);
    return round;
}

const Trace* pick_preferred(const std::vector<Trace>& traces, Tick best_time) {
    const Trace* best = nullptr;
    for (const auto& t : traces) {
        if (t.final_time != best_time) continue;
        if (!best || t.params.wg > best->params.wg ||
            (t.params.wg == best->params.wg && t.params.ts > best->params.ts))
            best = &t;
    }
    return best;
}

}  // namespace

const char* to_string(TuneMethod m) {
    switch (m) {
        case TuneMethod::Bisect: return "bisect";
        case TuneMethod::Swarm: return "swarm";
        case TuneMethod::Sweep: return "sweep";
    }
    return "?";
}

double TuneResult::first_trail_optimality() const {
    if (first_trail_time <= 0) return 1.0;
    return static_cast<double>(t_min) / static_cast<double>(first_trail_time);
}

Tick estimate_initial_time(const PlatformConfig& platform, const ProblemSpec& problem,
                           std::uint64_t seed) {
    const auto configs = feasible_configs(problem);
    if (configs.empty()) throw ConfigError("no feasible configurations for this problem");
    std::mt19937_64 rng(seed);
    const TuningParams cfg = configs[static_cast<std::size_t>(rng() % configs.size())];
    Machine m(platform, problem, cfg);
    return m.run(SchedPolicy::SeededRandom, seed).time;
}

TuneResult bisect_min_time(const PlatformConfig& platform, const ProblemSpec& problem,
                           Tick t_hi, const ExploreLimits& limits) {
    if (limits.mode != ExploreLimits::Mode::Exact)
        throw ConfigError("bisection needs exact mode");
    if (t_hi < 1) throw ConfigError("t_hi must be >= 1");

    const auto t0 = Clock::now();
    TuneResult res;
    res.method = TuneMethod::Bisect;
    res.t_ini = t_hi;
    res.proven = true;

    Verdict v = check_overtime(platform, problem, t_hi, limits);
    res.stats.checks_run += 1;
    res.stats.states_visited_total += v.stats.states_visited;
    if (!v.violated)
        throw ConfigError("t_hi too small: no run terminates within " + std::to_string(t_hi));
    res.first_trail_time = v.trace->final_time;
    Trace best = std::move(*v.trace);

    Tick lo = 0;  // no run can finish in zero ticks
    Tick hi = t_hi;
    bool lo_checked = false;
    while (hi - lo > 1) {
        const Tick mid = lo + (hi - lo) / 2;
        Verdict vm = check_overtime(platform, problem, mid, limits);
        res.stats.checks_run += 1;
        res.stats.states_visited_total += vm.stats.states_visited;
        if (vm.violated) {
            hi = mid;
            best = std::move(*vm.trace);
        } else {
            if (!vm.exhaustive) res.proven = false;
            lo = mid;
            lo_checked = true;
        }
    }
    if (!lo_checked && lo == 0 && hi == 1) {
        Verdict vz = check_overtime(platform, problem, 0, limits);
        res.stats.checks_run += 1;
        if (vz.violated) throw ModelBug("a run finished in zero ticks");
        if (!vz.exhaustive) res.proven = false;
    }
    res.t_min = hi;

    // The checker scans configurations largest-first, so the counterexample
    // kept from the check at hi == t_min already carries the preferred
    // (largest wg, then ts) configuration among those achieving t_min.
    res.trace = std::move(best);
    res.params = res.trace.params;
    if (res.trace.final_time != res.t_min)
        throw ModelBug("bisection trace time disagrees with t_min");
    res.stats.wall_seconds = seconds_since(t0);
    return res;
}

TuneResult swarm_min_time(const PlatformConfig& platform, const ProblemSpec& problem,
                          int workers, const ExploreLimits& limits, std::uint64_t seed,
                          std::vector<Trace>* trails_out) {
    if (workers < 1) throw ConfigError("swarm needs at least one worker");
    const auto t0 = Clock::now();

    TuneResult res;
    res.method = TuneMethod::Swarm;
    res.proven = false;  // heuristic by construction

    const double first_budget = limits.wall_budget_secs > 0 ? limits.wall_budget_secs : 10.0;
    SwarmRound round = run_swarm_round(platform, problem, Property::non_termination(),
                                       workers, first_budget, limits, seed);
    res.stats.states_visited_total += round.stats.states_visited;
    if (round.traces.empty())
        throw ConfigError("model never terminated within the swarm limits");
    if (trails_out)
        trails_out->insert(trails_out->end(), round.traces.begin(), round.traces.end());

    res.first_trail_time = round.traces.front().final_time;
    Tick best_time = round.traces.front().final_time;
    for (const auto& t : round.traces) best_time = std::min(best_time, t.final_time);
    Trace best = *pick_preferred(round.traces, best_time);
    res.t_ini = best_time;

    double prev_exec = round.wall_seconds;
    std::uint64_t round_seed = seed + 0x9e3779b9u;
    while (best_time > 1) {
        const Tick target = best_time - 1;
        SwarmRound r = run_swarm_round(platform, problem, Property::over_time(target),
                                       workers, prev_exec, limits, round_seed);
        round_seed += static_cast<std::uint64_t>(workers);
        res.stats.checks_run += 1;
        res.stats.states_visited_total += r.stats.states_visited;
        if (r.traces.empty()) break;  // nothing within the previous execution time
        if (trails_out)
            trails_out->insert(trails_out->end(), r.traces.begin(), r.traces.end());
        Tick round_best = r.traces.front().final_time;
        for (const auto& t : r.traces) round_best = std::min(round_best, t.final_time);
        if (round_best >= best_time) break;  // no smaller time found
        best_time = round_best;
        best = *pick_preferred(r.traces, best_time);
        prev_exec = r.wall_seconds;
    }

    res.t_min = best_time;
    res.trace = std::move(best);
    res.params = res.trace.params;
    res.stats.wall_seconds = seconds_since(t0);
    return res;
}

std::vector<SweepRow> exhaustive_sweep(const PlatformConfig& platform,
                                       const ProblemSpec& problem) {
    std::vector<SweepRow> rows;
    for (const auto& cfg : enumerate_configs(problem.size)) {
        SweepRow row;
        row.size = problem.size;
        row.wg = cfg.wg;
        row.ts = cfg.ts;
        if (!config_feasible(problem, cfg)) {
            row.ok = false;
            row.note = "infeasible";
            rows.push_back(row);
            continue;
        }
        try {
            Machine m(platform, problem, cfg);
            const RunOutcome out = m.run(SchedPolicy::RoundRobin);
            row.time = out.time;
            row.transitions = out.steps;
        } catch (const ModelBug& e) {
            row.ok = false;
            row.note = "deadlock";
        }
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.ok != b.ok) return a.ok;  // flagged rows last
        if (!a.ok) return false;
        if (a.time != b.time) return a.time < b.time;
        return a.transitions < b.transitions;
    });
    return rows;
}

ExtractedParams extract_params(const PlatformConfig& platform, const ProblemSpec& problem,
                               const Trace& trace) {
    replay(platform, problem, trace);  // throws CorruptTrace on divergence
    return ExtractedParams{trace.params.wg, trace.params.ts, trace.final_time};
}

std::vector<RankedTrail> rank_trails(const std::vector<Trace>& traces) {
    std::vector<RankedTrail> out;
    out.reserve(traces.size());
    for (const auto& t : traces)
        out.push_back(RankedTrail{t.final_time, t.params.wg, t.params.ts, t.steps});
    std::stable_sort(out.begin(), out.end(), [](const RankedTrail& a, const RankedTrail& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.transitions < b.transitions;
    });
    return out;
}

}  // namespace mctune
