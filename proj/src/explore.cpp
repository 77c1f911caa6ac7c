#include "mctune/explore.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <unordered_set>

namespace mctune {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Visited set over canonical serializations (exact) or 64-bit fingerprints
// (bitstate). Exact mode makes Holds a real proof at desk scale; bitstate
// trades completeness for memory.
class VisitedSet {
public:
    VisitedSet(ExploreLimits::Mode mode, long long capacity)
        : mode_(mode), capacity_(capacity) {}

    // 0 = already present, 1 = inserted, -1 = capacity exhausted
    int insert(const Machine& m, const MachineState& s) {
        if (size() >= capacity_) return -1;
        if (mode_ == ExploreLimits::Mode::Exact)
            return exact_.insert(m.serialize(s)).second ? 1 : 0;
        return hashes_.insert(m.fingerprint(s)).second ? 1 : 0;
    }

    long long size() const {
        return static_cast<long long>(mode_ == ExploreLimits::Mode::Exact ? exact_.size()
                                                                          : hashes_.size());
    }

private:
    ExploreLimits::Mode mode_;
    long long capacity_;
    std::unordered_set<std::string> exact_;
    std::unordered_set<std::uint64_t> hashes_;
};

struct DfsNode {
    MachineState state;
    std::vector<Transition> en;
    std::size_t next = 0;
};

std::vector<TuningParams> feasible_configs(const ProblemSpec& problem, ExploreStats& stats) {
    std::vector<TuningParams> all = enumerate_configs(problem.size);
    std::vector<TuningParams> out;
    for (const auto& cfg : all) {
        if (config_feasible(problem, cfg))
            out.push_back(cfg);
        else
            stats.configs_skipped += 1;
    }
    return out;
}

// Property checks scan parameter choices largest-first so that the first
// counterexample found at the minimal bound carries the preferred (largest
// wg, then largest ts) configuration.
void sort_descending(std::vector<TuningParams>& configs) {
    std::sort(configs.begin(), configs.end(), [](const TuningParams& a, const TuningParams& b) {
        if (a.wg != b.wg) return a.wg > b.wg;
        return a.ts > b.ts;
    });
}

}  // namespace

void ExploreStats::absorb(const ExploreStats& o) {
    states_visited += o.states_visited;
    transitions_applied += o.transitions_applied;
    max_depth_reached = std::max(max_depth_reached, o.max_depth_reached);
    wall_seconds += o.wall_seconds;
    limit_hit = limit_hit || o.limit_hit;
    configs_explored += o.configs_explored;
    configs_skipped += o.configs_skipped;
}

bool explore_machine(const Machine& m, const ExploreLimits& limits, ExploreStats& stats,
                     const ExploreHooks& hooks, std::uint64_t shuffle_seed, bool shuffle,
                     const std::atomic<bool>* stop, double deadline_secs) {
    if (limits.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    const auto t0 = Clock::now();
    std::mt19937_64 rng(shuffle_seed);
    VisitedSet visited(limits.mode, limits.max_states);
    bool complete = true;

    std::vector<DfsNode> stack;
    std::vector<Transition> path;

    MachineState init = m.initial_state();
    visited.insert(m, init);
    stats.states_visited += 1;
    if (hooks.on_state) hooks.on_state(m, init);
    auto en0 = m.enabled(init);
    if (en0.empty()) throw ModelBug("initial state has no enabled transitions");
    if (shuffle) std::shuffle(en0.begin(), en0.end(), rng);
    stack.push_back({std::move(init), std::move(en0), 0});

    long long steps_since_check = 0;
    while (!stack.empty()) {
        if (++steps_since_check >= 512) {
            steps_since_check = 0;
            if ((stop && stop->load(std::memory_order_relaxed)) ||
                (deadline_secs > 0 && seconds_since(t0) >= deadline_secs)) {
                complete = false;
                break;
            }
        }
        DfsNode& node = stack.back();
        if (node.next >= node.en.size()) {
            stack.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        const Transition t = node.en[node.next++];
        if (static_cast<long long>(path.size()) + 1 > limits.max_depth) {
            complete = false;
            continue;
        }
        MachineState succ = m.apply(node.state, t);
        stats.transitions_applied += 1;
        const int ins = visited.insert(m, succ);
        if (ins == 0) continue;
        if (ins < 0) {
            complete = false;
            continue;
        }
        stats.states_visited += 1;
        stats.max_depth_reached =
            std::max(stats.max_depth_reached, static_cast<long long>(path.size()) + 1);
        if (hooks.on_state) hooks.on_state(m, succ);
        auto en = m.enabled(succ);
        if (en.empty()) {
            if (!m.is_terminal(succ)) {
                path.push_back(t);
                std::string dump = "deadlock reached via:";
                for (const auto& tr : path) dump += "\n  " + m.process_name(tr.actor) + " " + m.label(tr);
                throw ModelBug(dump);
            }
            if (hooks.on_terminal) {
                path.push_back(t);
                const bool keep_going = hooks.on_terminal(m, succ, path);
                path.pop_back();
                if (!keep_going) {
                    stats.wall_seconds += seconds_since(t0);
                    return complete;
                }
            }
            continue;
        }
        if (shuffle) std::shuffle(en.begin(), en.end(), rng);
        path.push_back(t);
        stack.push_back({std::move(succ), std::move(en), 0});
    }
    stats.wall_seconds += seconds_since(t0);
    return complete;
}

Verdict check_overtime(const PlatformConfig& platform, const ProblemSpec& problem, Tick T,
                       const ExploreLimits& limits) {
    if (T < 0) throw ConfigError("over-time bound must be >= 0");
    Verdict verdict;
    auto configs = feasible_configs(problem, verdict.stats);
    sort_descending(configs);

    for (const auto& cfg : configs) {
        Machine m(platform, problem, cfg);
        verdict.stats.configs_explored += 1;
        bool found = false;
        ExploreHooks hooks;
        hooks.on_terminal = [&](const Machine& mm, const MachineState& s,
                                const std::vector<Transition>& path) {
            if (s.time <= T) {
                Trace tr;
                tr.transitions = path;
                tr.final_time = mm.final_time(s);
                tr.params = cfg;
                tr.steps = static_cast<long long>(path.size());
                verdict.trace = std::move(tr);
                found = true;
                return false;
            }
            return true;
        };
        const bool complete = explore_machine(m, limits, verdict.stats, hooks);
        if (!complete) verdict.stats.limit_hit = true;
        if (found) {
            verdict.violated = true;
            verdict.exhaustive = false;
            return verdict;
        }
    }
    verdict.violated = false;
    verdict.exhaustive =
        !verdict.stats.limit_hit && limits.mode == ExploreLimits::Mode::Exact;
    return verdict;
}

std::vector<Trace> check_nontermination(const PlatformConfig& platform,
                                        const ProblemSpec& problem,
                                        const ExploreLimits& limits,
                                        ExploreStats* stats_out) {
    ExploreStats stats;
    std::vector<Trace> traces;
    auto configs = feasible_configs(problem, stats);
    sort_descending(configs);
    for (const auto& cfg : configs) {
        Machine m(platform, problem, cfg);
        stats.configs_explored += 1;
        ExploreHooks hooks;
        hooks.on_terminal = [&](const Machine& mm, const MachineState& s,
                                const std::vector<Transition>& path) {
            Trace tr;
            tr.transitions = path;
            tr.final_time = mm.final_time(s);
            tr.params = cfg;
            tr.steps = static_cast<long long>(path.size());
            traces.push_back(std::move(tr));
            return true;
        };
        if (!explore_machine(m, limits, stats, hooks)) stats.limit_hit = true;
    }
    if (stats_out) stats_out->absorb(stats);
    return traces;
}

std::vector<Trace> swarm_worker(const PlatformConfig& platform, const ProblemSpec& problem,
                                const Property& property, std::uint64_t seed,
                                const ExploreLimits& limits, ExploreStats* stats_out,
                                const std::atomic<bool>* stop) {
    if (limits.mode != ExploreLimits::Mode::Bitstate)
        throw ConfigError("swarm workers run in bitstate mode");
    ExploreStats stats;
    std::vector<Trace> traces;
    auto configs = feasible_configs(problem, stats);
    std::mt19937_64 rng(seed);
    std::shuffle(configs.begin(), configs.end(), rng);

    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& cfg : configs) {
        if (stop && stop->load(std::memory_order_relaxed)) break;
        double remaining = 0.0;
        if (limits.wall_budget_secs > 0) {
            remaining = limits.wall_budget_secs -
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
            if (remaining <= 0) {
                stats.limit_hit = true;
                break;
            }
        }
        Machine m(platform, problem, cfg);
        stats.configs_explored += 1;
        ExploreHooks hooks;
        hooks.on_terminal = [&](const Machine& mm, const MachineState& s,
                                const std::vector<Transition>& path) {
            if (property.violated_by(s.time)) {
                Trace tr;
                tr.transitions = path;
                tr.final_time = mm.final_time(s);
                tr.params = cfg;
                tr.steps = static_cast<long long>(path.size());
                traces.push_back(std::move(tr));
            }
            return true;
        };
        if (!explore_machine(m, limits, stats, hooks, rng(), /*shuffle=*/true, stop,
                             remaining))
            stats.limit_hit = true;
    }
    if (stats_out) stats_out->absorb(stats);
    return traces;
}

MachineState replay(const PlatformConfig& platform, const ProblemSpec& problem,
                    const Trace& trace) {
    Machine m(platform, problem, trace.params);
    MachineState s = m.initial_state();
    for (std::size_t i = 0; i < trace.transitions.size(); ++i) {
        try {
            s = m.apply(s, trace.transitions[i]);
        } catch (const ModelBug& e) {
            throw CorruptTrace("replay diverged at step " + std::to_string(i) + ": " +
                               e.what());
        }
    }
    if (!m.is_terminal(s)) throw CorruptTrace("replayed trace does not end terminal");
    if (s.time != trace.final_time)
        throw CorruptTrace("replayed final time " + std::to_string(s.time) +
                           " != recorded " + std::to_string(trace.final_time));
    return s;
}

}  // namespace mctune
