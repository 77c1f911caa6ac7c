#ifndef MCTUNE_TESTS_ORACLES_HPP
#define MCTUNE_TESTS_ORACLES_HPP

#include <algorithm>
#include <vector>

#include "mctune/model.hpp"

// Closed-form expected values derived by summing instruction ticks over the
// lock-step schedule. Kept independent of the transition system on purpose:
// these are the oracles the machine is checked against.
namespace oracles {

using mctune::Tick;

struct Shape {
    int wgs, nwd, nwu, nwe, rounds, waves;
};

inline Shape shape(int size, int wg, int ts, int np, int nu, int nd) {
    Shape s{};
    s.wgs = size / (wg * ts);
    if (s.wgs < 1) s.wgs = 1;
    s.nwd = (s.wgs <= nu * nd) ? (s.wgs / nu) : nd;
    if (s.wgs / nu == 0) s.nwd = 1;
    s.nwu = std::min(s.wgs, nu);
    s.nwe = std::min(wg, np);
    s.rounds = wg / s.nwe;
    s.waves = std::max(s.wgs / (s.nwu * s.nwd), 1);
    return s;
}

/// Tiled kernel: per work item, size/ts iterations of (gmt*ts global +
/// ts local) plus one gmt result write; workgroup waves run back to back.
inline Tick abstract_time(int size, int wg, int ts, int np, int gmt, int nu = 1, int nd = 1) {
    const Shape s = shape(size, wg, ts, np, nu, nd);
    const Tick per_item =
        static_cast<Tick>(size / ts) * (static_cast<Tick>(gmt) * ts + ts) + gmt;
    return static_cast<Tick>(s.waves) * s.rounds * per_item;
}

/// Reduction kernel: per work item, ts global folds at gmt each; per
/// workgroup, a local reduce of nwe-1 slots plus one gmt publish.
inline Tick minimum_time(int size, int wg, int ts, int np, int gmt, int nu = 1, int nd = 1) {
    const Shape s = shape(size, wg, ts, np, nu, nd);
    const Tick map_per_group = static_cast<Tick>(s.rounds) * ts * gmt;
    const Tick epilogue = static_cast<Tick>(s.nwe - 1) + gmt;
    return static_cast<Tick>(s.waves) * (map_per_group + epilogue);
}

inline std::int64_t brute_min(const std::vector<std::int64_t>& v) {
    std::int64_t m = v.front();
    for (std::int64_t x : v) m = std::min(m, x);
    return m;
}

}  // namespace oracles

#endif  // MCTUNE_TESTS_ORACLES_HPP
