#include <doctest.h>

#include <cmath>
#include <set>

#include "mctune/search.hpp"
#include "oracles.hpp"

using namespace mctune;

namespace {
const PlatformConfig kPlat{1, 1, 4, 4};
}

TEST_CASE("initial time estimation") {
    const ProblemSpec problem = ProblemSpec::abstract(8);
    std::set<Tick> valid;
    for (const auto& cfg : enumerate_configs(8))
        valid.insert(oracles::abstract_time(8, cfg.wg, cfg.ts, 4, 4));

    for (std::uint64_t seed : {1ull, 2ull, 3ull, 42ull}) {
        const Tick t = estimate_initial_time(kPlat, problem, seed);
        CHECK(valid.count(t) == 1);
        CHECK(t >= 44);  // an upper bound on the minimum by construction
        CHECK(estimate_initial_time(kPlat, problem, seed) == t);
    }
}

TEST_CASE("bisection pins the minimal time and its parameters") {
    const ProblemSpec problem = ProblemSpec::abstract(8);
    ExploreLimits limits;

    SUBCASE("from a loose upper bound") {
        const TuneResult r = bisect_min_time(kPlat, problem, 100, limits);
        CHECK(r.t_min == 44);
        CHECK(r.params == TuningParams{4, 4});
        CHECK(r.proven);
        CHECK(r.trace.final_time == 44);
        CHECK(r.stats.checks_run <=
              static_cast<int>(std::ceil(std::log2(100.0))) + 2);
        CHECK(r.first_trail_optimality() > 0.0);
        CHECK(r.first_trail_optimality() <= 1.0);
    }
    SUBCASE("upper bound exactly at the minimum") {
        const TuneResult r = bisect_min_time(kPlat, problem, 44, limits);
        CHECK(r.t_min == 44);
        CHECK(r.params == TuningParams{4, 4});
    }
    SUBCASE("upper bound below any run is an error") {
        CHECK_THROWS_AS(bisect_min_time(kPlat, problem, 43, limits), ConfigError);
    }
    SUBCASE("bisection boundary checks directly") {
        const TuneResult r = bisect_min_time(kPlat, problem, 100, limits);
        CHECK(check_overtime(kPlat, problem, r.t_min, limits).violated);
        const Verdict below = check_overtime(kPlat, problem, r.t_min - 1, limits);
        CHECK_FALSE(below.violated);
        CHECK(below.exhaustive);
    }
    SUBCASE("bitstate mode is rejected") {
        ExploreLimits bad;
        bad.mode = ExploreLimits::Mode::Bitstate;
        CHECK_THROWS_AS(bisect_min_time(kPlat, problem, 100, bad), ConfigError);
    }
}

TEST_CASE("single-configuration problem bisects to its only run time") {
    const ProblemSpec problem = ProblemSpec::abstract(4);
    const Tick only = oracles::abstract_time(4, 2, 2, 4, 4);
    const TuneResult r = bisect_min_time(kPlat, problem, only, ExploreLimits{});
    CHECK(r.t_min == only);
    CHECK(r.params == TuningParams{2, 2});
}

TEST_CASE("exhaustive sweep") {
    SUBCASE("abstract size 8") {
        const auto rows = exhaustive_sweep(kPlat, ProblemSpec::abstract(8));
        REQUIRE(rows.size() == 4);
        for (const auto& r : rows) CHECK(r.ok);
        CHECK(rows.front().time == 44);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i - 1].time <= rows[i].time);
            if (rows[i - 1].time == rows[i].time)
                CHECK(rows[i - 1].transitions <= rows[i].transitions);
        }
        for (const auto& r : rows)
            CHECK(r.time == oracles::abstract_time(8, r.wg, r.ts, 4, 4));
    }
    SUBCASE("minimum size 16 flags infeasible rows and keeps the count") {
        const auto rows = exhaustive_sweep(kPlat, ProblemSpec::minimum(16));
        REQUIRE(rows.size() == 9);  // one row per enumerated configuration
        int flagged = 0;
        Tick best = -1;
        std::set<std::pair<int, int>> best_params;
        for (const auto& r : rows) {
            if (!r.ok) {
                ++flagged;
                CHECK(r.note == "infeasible");
                continue;
            }
            if (best < 0) best = r.time;  // first row is the optimum
            if (r.time == best) best_params.insert({r.wg, r.ts});
        }
        CHECK(flagged == 3);
        CHECK(best == 23);
        CHECK(best_params.count({8, 2}) == 1);
        CHECK(best_params.count({4, 4}) == 1);
    }
}

TEST_CASE("sweep minimum equals bisection minimum") {
    for (int size : {4, 8, 16}) {
        const ProblemSpec problem = ProblemSpec::abstract(size);
        const auto rows = exhaustive_sweep(kPlat, problem);
        const TuneResult r = bisect_min_time(kPlat, problem, rows.back().time, ExploreLimits{});
        CHECK(r.t_min == rows.front().time);
        bool achieved = false;
        for (const auto& row : rows)
            achieved = achieved ||
                       (row.ok && row.wg == r.params.wg && row.ts == r.params.ts &&
                        row.time == r.t_min);
        CHECK(achieved);
    }
}

TEST_CASE("parameter extraction validates the trace first") {
    const ProblemSpec problem = ProblemSpec::abstract(8);
    const TuneResult r = bisect_min_time(kPlat, problem, 100, ExploreLimits{});
    const ExtractedParams got = extract_params(kPlat, problem, r.trace);
    CHECK(got.wg == r.params.wg);
    CHECK(got.ts == r.params.ts);
    CHECK(got.time == r.t_min);

    Trace corrupt = r.trace;
    corrupt.transitions.pop_back();
    CHECK_THROWS_AS(extract_params(kPlat, problem, corrupt), CorruptTrace);
}

TEST_CASE("trail ranking") {
    CHECK(rank_trails({}).empty());

    auto mk = [](Tick time, int wg, int ts, long long steps) {
        Trace t;
        t.final_time = time;
        t.params = {wg, ts};
        t.steps = steps;
        return t;
    };
    const auto ranked = rank_trails({mk(50, 2, 2, 10), mk(44, 4, 4, 1700), mk(44, 2, 4, 1650)});
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].time == 44);
    CHECK(ranked[0].transitions == 1650);
    CHECK(ranked[1].time == 44);
    CHECK(ranked[1].transitions == 1700);
    CHECK(ranked[2].time == 50);
}

TEST_CASE("swarm search agrees with bisection at desk scale") {
    const ProblemSpec problem = ProblemSpec::abstract(8);
    ExploreLimits limits;
    limits.wall_budget_secs = 20.0;

    const TuneResult bisect = bisect_min_time(kPlat, problem, 100, ExploreLimits{});
    const TuneResult swarm = swarm_min_time(kPlat, problem, 2, limits, 7);
    CHECK(swarm.t_min == bisect.t_min);
    CHECK(swarm.params == TuningParams{4, 4});
    CHECK_FALSE(swarm.proven);
    CHECK(swarm.t_min >= bisect.t_min);
    replay(kPlat, problem, swarm.trace);

    SUBCASE("deterministic given one worker and a fixed seed") {
        const TuneResult a = swarm_min_time(kPlat, problem, 1, limits, 11);
        const TuneResult b = swarm_min_time(kPlat, problem, 1, limits, 11);
        CHECK(a.t_min == b.t_min);
        CHECK(a.params == b.params);
        CHECK(a.trace.transitions == b.trace.transitions);
    }
    SUBCASE("rejects zero workers") {
        CHECK_THROWS_AS(swarm_min_time(kPlat, problem, 0, limits, 1), ConfigError);
    }
}
