#ifndef MCTUNE_SEARCH_HPP
#define MCTUNE_SEARCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mctune/explore.hpp"

namespace mctune {

enum class TuneMethod : std::uint8_t { Bisect, Swarm, Sweep };

const char* to_string(TuneMethod m);

struct TuneStats {
    int checks_run = 0;
    long long states_visited_total = 0;
    double wall_seconds = 0.0;
};

struct TuneResult {
    Tick t_min = 0;
    TuningParams params{};
    Trace trace;
    Tick t_ini = 0;
    TuneStats stats;
    TuneMethod method = TuneMethod::Bisect;
    bool proven = false;           // exhaustive checks backed the boundary
    Tick first_trail_time = 0;     // time of the first counterexample found

    /// t_min / first-trail time, in (0, 1].
    double first_trail_optimality() const;
};

struct SweepRow {
    int size = 0;
    int wg = 0;
    int ts = 0;
    Tick time = 0;
    long long transitions = 0;
    bool ok = true;
    std::string note;  // "infeasible" or "deadlock" when !ok
};

struct RankedTrail {
    Tick time = 0;
    int wg = 0;
    int ts = 0;
    long long transitions = 0;
};

/// Simulates one randomly chosen valid configuration and returns its final
/// time; a safe upper bound to start the bisection from.
Tick estimate_initial_time(const PlatformConfig& platform, const ProblemSpec& problem,
                           std::uint64_t seed);

/// Counterexample-guided binary search for the minimal termination time.
/// Requires that t_hi is achievable (the check at t_hi finds a
/// counterexample) and exact mode. On ties the reported configuration is the
/// one with the largest wg, then the largest ts.
TuneResult bisect_min_time(const PlatformConfig& platform, const ProblemSpec& problem,
                           Tick t_hi, const ExploreLimits& limits);

/// Randomized search: a first swarm collects terminating runs, then repeated
/// swarms chase smaller times until a round finds nothing within the
/// previous round's execution time. Heuristic: the result is not a proof.
/// trails_out, when given, receives every trace the swarms found.
TuneResult swarm_min_time(const PlatformConfig& platform, const ProblemSpec& problem,
                          int workers, const ExploreLimits& limits, std::uint64_t seed,
                          std::vector<Trace>* trails_out = nullptr);

/// Deterministic simulation of every enumerated configuration, sorted
/// ascending by (time, transitions); infeasible or deadlocked rows are
/// flagged and sorted last.
std::vector<SweepRow> exhaustive_sweep(const PlatformConfig& platform,
                                       const ProblemSpec& problem);

struct ExtractedParams {
    int wg = 0;
    int ts = 0;
    Tick time = 0;
};

/// Reads (wg, ts, time) out of a counterexample after replay validation.
ExtractedParams extract_params(const PlatformConfig& platform, const ProblemSpec& problem,
                               const Trace& trace);

/// Sorts trail summaries ascending by (time, transitions), stable.
std::vector<RankedTrail> rank_trails(const std::vector<Trace>& traces);

}  // namespace mctune

#endif  // MCTUNE_SEARCH_HPP
