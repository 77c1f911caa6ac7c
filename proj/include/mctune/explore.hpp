#ifndef MCTUNE_EXPLORE_HPP
#define MCTUNE_EXPLORE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mctune/machine.hpp"

namespace mctune {

/// A trace failed to replay against the current engine/model.
struct CorruptTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Checked properties. OverTime(T) is "whenever the computation finishes,
/// model time exceeds T"; NonTermination is "the computation never
/// finishes". Both reduce to predicates on terminal states, so violations
/// are terminating runs.
struct Property {
    enum class Kind : std::uint8_t { OverTime, NonTermination };
    Kind kind = Kind::NonTermination;
    Tick bound = 0;

    static Property over_time(Tick t) { return Property{Kind::OverTime, t}; }
    static Property non_termination() { return Property{Kind::NonTermination, 0}; }

    bool violated_by(Tick final_time) const {
        return kind == Kind::NonTermination || final_time <= bound;
    }
};

struct ExploreLimits {
    long long max_depth = 4'000'000;  // transitions along one path
    long long max_states = 5'000'000; // visited-set capacity
    double wall_budget_secs = 0.0;    // 0 means unlimited
    enum class Mode : std::uint8_t { Exact, Bitstate };
    Mode mode = Mode::Exact;
};

struct ExploreStats {
    long long states_visited = 0;
    long long transitions_applied = 0;
    long long max_depth_reached = 0;
    double wall_seconds = 0.0;
    bool limit_hit = false;
    int configs_explored = 0;
    int configs_skipped = 0;  // infeasible parameter choices (minimum kernel)

    void absorb(const ExploreStats& o);
};

/// A replayable counterexample: the transition sequence from the initial
/// state of the machine built with `params`.
struct Trace {
    std::vector<Transition> transitions;
    Tick final_time = 0;
    TuningParams params{};
    long long steps = 0;
};

struct Verdict {
    bool violated = false;
    bool exhaustive = false;
    std::optional<Trace> trace;
    ExploreStats stats;
};

/// Depth-first exploration of one machine with a visited set.
/// on_state runs on every newly visited state (may throw to abort);
/// on_terminal returns false to stop the whole exploration.
struct ExploreHooks {
    std::function<void(const Machine&, const MachineState&)> on_state;
    std::function<bool(const Machine&, const MachineState&, const std::vector<Transition>&)>
        on_terminal;
};

/// Explores every interleaving of one machine. Returns false when a limit
/// (depth, states, wall budget, stop flag) cut the exploration short.
bool explore_machine(const Machine& m, const ExploreLimits& limits, ExploreStats& stats,
                     const ExploreHooks& hooks, std::uint64_t shuffle_seed = 0,
                     bool shuffle = false, const std::atomic<bool>* stop = nullptr,
                     double deadline_secs = 0.0);

/// Exhaustive check of the over-time property across the whole parameter
/// space (parameter choice is the root nondeterminism). Returns the first
/// counterexample trace reaching a terminal state with time <= T, or Holds;
/// Holds is a proof only when exhaustive is true.
Verdict check_overtime(const PlatformConfig& platform, const ProblemSpec& problem, Tick T,
                       const ExploreLimits& limits);

/// Collects terminating traces (counterexamples to non-termination) up to
/// the limits, one per distinct terminal state.
std::vector<Trace> check_nontermination(const PlatformConfig& platform,
                                        const ProblemSpec& problem,
                                        const ExploreLimits& limits,
                                        ExploreStats* stats_out = nullptr);

/// Randomized bounded worker: seed-permuted DFS with a fingerprint visited
/// set. Returns every violation trace it finds within the limits.
std::vector<Trace> swarm_worker(const PlatformConfig& platform, const ProblemSpec& problem,
                                const Property& property, std::uint64_t seed,
                                const ExploreLimits& limits,
                                ExploreStats* stats_out = nullptr,
                                const std::atomic<bool>* stop = nullptr);

/// Re-applies a trace from the initial state; returns the terminal state.
/// Throws CorruptTrace on divergence or on recorded-value mismatch.
MachineState replay(const PlatformConfig& platform, const ProblemSpec& problem,
                    const Trace& trace);

}  // namespace mctune

#endif  // MCTUNE_EXPLORE_HPP
