#include <doctest.h>

#include "mctune/kernel.hpp"
#include "oracles.hpp"

using namespace mctune;

TEST_CASE("abstract kernel cost totals") {
    // expected values are sums of the instruction ticks
    const PlatformConfig p4{1, 1, 4, 4};
    CHECK(build_abstract_kernel(8, {4, 4}, p4).activation_busy_ticks() == 44);
    CHECK(build_abstract_kernel(16, {8, 4}, p4).activation_busy_ticks() == 84);
    const PlatformConfig p1{1, 1, 4, 1};
    CHECK(build_abstract_kernel(4, {2, 2}, p1).activation_busy_ticks() == 9);
}

TEST_CASE("abstract kernel structure") {
    const PlatformConfig p{1, 1, 4, 4};
    for (int size : {8, 16, 32})
        for (const auto& cfg : enumerate_configs(size)) {
            const KernelProgram prog = build_abstract_kernel(size, cfg, p);
            CHECK(prog.barriers_per_activation() == 2 * size / cfg.ts);
            CHECK_FALSE(prog.has_epilogue());
            CHECK(prog.epilogue_busy_ticks() == 0);
            // cost is a pure function of (size, ts, gmt)
            const Tick expected =
                Tick(size / cfg.ts) * (Tick(p.gmt) * cfg.ts + cfg.ts) + p.gmt;
            CHECK(prog.activation_busy_ticks() == expected);
        }
}

TEST_CASE("minimum kernel global indexing") {
    // wg 8, np 4, me 1, workgroup 0, round 1
    CHECK(global_item_id({8, 2}, 4, 0, 1, 1) == 5);
    CHECK(global_item_id({8, 2}, 4, 0, 1, 1) * 2 == 10);  // shift with ts 2
    // single-round form when wg <= np
    CHECK(global_item_id({4, 2}, 4, 3, 2, 0) == 14);
}

TEST_CASE("minimum kernel construction and costs") {
    const PlatformConfig p{1, 1, 4, 4};
    const auto input16 = ProblemSpec::minimum(16).input;

    const KernelProgram prog = build_minimum_kernel(16, {8, 2}, p, input16);
    CHECK(prog.has_epilogue());
    CHECK(prog.activation_busy_ticks() == 2 * 4);       // ts * gmt
    CHECK(prog.epilogue_busy_ticks() == (4 - 1) + 4);   // (nwe-1) + gmt
    CHECK(prog.barriers_per_activation() == 0);

    SUBCASE("oversized tiles are rejected as infeasible") {
        CHECK_THROWS_AS(build_minimum_kernel(16, {4, 8}, p, input16), ConfigError);
        CHECK_THROWS_AS(build_minimum_kernel(16, {8, 4}, p, input16), ConfigError);
        CHECK(config_feasible(ProblemSpec::minimum(16), {4, 8}) == false);
        CHECK(config_feasible(ProblemSpec::minimum(16), {2, 8}) == true);
        CHECK(config_feasible(ProblemSpec::abstract(16), {8, 8}) == true);
    }
    SUBCASE("input length must match") {
        CHECK_THROWS_AS(build_minimum_kernel(16, {2, 2}, p, {1, 2, 3}), ConfigError);
    }
}

TEST_CASE("cost closure across the parameter space") {
    for (int np : {2, 4})
        for (int gmt : {1, 4}) {
            const PlatformConfig p{1, 1, np, gmt};
            for (int size : {8, 16, 32}) {
                const auto input = ProblemSpec::minimum(size).input;
                for (const auto& cfg : enumerate_configs(size)) {
                    if (cfg.wg * cfg.ts > size) continue;
                    const KernelProgram prog = build_minimum_kernel(size, cfg, p, input);
                    const int nwe = std::min(cfg.wg, np);
                    CHECK(prog.activation_busy_ticks() == Tick(cfg.ts) * gmt);
                    CHECK(prog.epilogue_busy_ticks() == Tick(nwe - 1) + gmt);
                }
            }
        }
}
