#include <doctest.h>

#include "mctune/model.hpp"

using namespace mctune;

TEST_CASE("launch arithmetic on hand-computed shapes") {
    const PlatformConfig p{1, 1, 4, 4};

    SUBCASE("size 1024, wg 16, ts 32") {
        const LaunchPlan plan = derive_launch(p, 1024, {16, 32});
        CHECK(plan.wgs == 2);
        CHECK(plan.nwd == 1);
        CHECK(plan.nwu == 1);
        CHECK(plan.nwe == 4);
        CHECK(plan.all_nwe == 4);
    }
    SUBCASE("oversized wg*ts clamps the group count to one") {
        const LaunchPlan plan = derive_launch(p, 8, {4, 4});
        CHECK(plan.wgs == 1);
        CHECK(plan.nwd == 1);
        CHECK(plan.nwu == 1);
        CHECK(plan.nwe == 4);
        CHECK(plan.all_nwe == 4);
    }
    SUBCASE("wg above np clamps the element count") {
        const LaunchPlan plan = derive_launch(p, 16, {8, 2});
        CHECK(plan.wgs == 1);
        CHECK(plan.nwe == 4);
        CHECK(plan.all_nwe == 4);
    }
    SUBCASE("multi-unit, multi-device shapes") {
        const PlatformConfig q{2, 2, 2, 4};
        LaunchPlan plan = derive_launch(q, 16, {2, 2});
        CHECK(plan.wgs == 4);
        CHECK(plan.nwd == 2);
        CHECK(plan.nwu == 2);
        CHECK(plan.nwe == 2);
        CHECK(plan.all_nwe == 8);

        plan = derive_launch(q, 16, {4, 2});
        CHECK(plan.wgs == 2);
        CHECK(plan.nwd == 1);
        CHECK(plan.nwu == 2);
        CHECK(plan.all_nwe == 4);

        // group count below the unit count underflows the device division
        const PlatformConfig r{1, 4, 4, 4};
        plan = derive_launch(r, 8, {4, 2});
        CHECK(plan.wgs == 1);
        CHECK(plan.nwd == 1);
        CHECK(plan.nwu == 1);
    }
}

TEST_CASE("launch arithmetic rejects bad parameters") {
    const PlatformConfig p{1, 1, 4, 4};
    CHECK_THROWS_AS(derive_launch(p, 8, {3, 2}), ConfigError);
    CHECK_THROWS_AS(derive_launch(p, 8, {1, 2}), ConfigError);
    CHECK_THROWS_AS(derive_launch(p, 8, {2, 8}), ConfigError);  // ts > size/2
    CHECK_THROWS_AS(derive_launch(p, 12, {2, 2}), ConfigError);
    CHECK_THROWS_AS(derive_launch(PlatformConfig{1, 1, 3, 4}, 8, {2, 2}), ConfigError);
    CHECK_THROWS_AS(derive_launch(PlatformConfig{0, 1, 4, 4}, 8, {2, 2}), ConfigError);
}

TEST_CASE("configuration enumeration") {
    SUBCASE("size 8") {
        const auto configs = enumerate_configs(8);
        REQUIRE(configs.size() == 4);
        CHECK(configs[0] == TuningParams{2, 2});
        CHECK(configs[1] == TuningParams{2, 4});
        CHECK(configs[2] == TuningParams{4, 2});
        CHECK(configs[3] == TuningParams{4, 4});
    }
    SUBCASE("size 4 has a single choice") {
        const auto configs = enumerate_configs(4);
        REQUIRE(configs.size() == 1);
        CHECK(configs[0] == TuningParams{2, 2});
    }
    SUBCASE("size 1024 has 81 choices including (16, 32)") {
        const auto configs = enumerate_configs(1024);
        CHECK(configs.size() == 81);
        bool found = false;
        for (const auto& c : configs) found = found || c == TuningParams{16, 32};
        CHECK(found);
    }
    SUBCASE("rejects degenerate sizes") {
        CHECK_THROWS_AS(enumerate_configs(2), ConfigError);
        CHECK_THROWS_AS(enumerate_configs(12), ConfigError);
    }
}

TEST_CASE("every enumerated configuration launches") {
    for (int nd : {1, 2})
        for (int nu : {1, 2})
            for (int np : {1, 2, 4, 8}) {
                const PlatformConfig p{nd, nu, np, 4};
                for (int size : {4, 8, 16, 32, 64}) {
                    const int n_minus_1_sq = [&] {
                        int n = log2_exact(size);
                        return (n - 1) * (n - 1);
                    }();
                    const auto configs = enumerate_configs(size);
                    CHECK(static_cast<int>(configs.size()) == n_minus_1_sq);
                    for (const auto& cfg : configs) {
                        const LaunchPlan plan = derive_launch(p, size, cfg);
                        CHECK(plan.all_nwe >= 1);
                        CHECK(plan.all_nwe <= nd * nu * np);
                        CHECK(plan.wgs >= 1);
                        if (cfg.wg <= np)
                            CHECK(plan.nwe == cfg.wg);
                        else
                            CHECK(plan.nwe == np);
                        // pure function: same inputs, same outputs
                        CHECK(derive_launch(p, size, cfg) == plan);
                    }
                }
            }
}

TEST_CASE("problem construction") {
    const ProblemSpec abs8 = ProblemSpec::abstract(8);
    CHECK(abs8.input.empty());

    const ProblemSpec min16 = ProblemSpec::minimum(16);
    REQUIRE(min16.input.size() == 16);
    CHECK(min16.input.front() == 16);
    CHECK(min16.input.back() == 1);

    CHECK_THROWS_AS(ProblemSpec::minimum(8, {1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(ProblemSpec::abstract(2), ConfigError);
    CHECK_THROWS_AS(kernel_kind_from_string("neither"), ConfigError);
}
