// generator.hpp — seeded random model instances for the verification suites.
// The generator draws only rational parameters; the exact engine stays exact.
#pragma once

#include <cstdint>

#include "enlab/random_time.hpp"
#include "enlab/space.hpp"

namespace enlab {

struct SplitMix {
    uint64_t state;
    explicit SplitMix(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
    bool chance(uint64_t num, uint64_t den) { return below(den) < num; }
};

FilteredSpace random_space(SplitMix& rng, int max_atoms = 16, int max_grid = 5);

// random time with atoms on and off the grid, optional density segments,
// optional mass at infinity
RandomTime random_time_on(SplitMix& rng, const FilteredSpace& sp,
                          bool allow_density = true, bool allow_inf = true);

// purely atomic variant (for enlargement-based suites)
RandomTime random_atomic_time_on(SplitMix& rng, const FilteredSpace& sp, bool allow_inf = true);

// honest by construction: the end of a random optional set of (cell, grid) boxes
RandomTime random_honest_time(SplitMix& rng, const FilteredSpace& sp);

PiecewisePath random_martingale(SplitMix& rng, const FilteredSpace& sp);

// predictable step process on a filtered space (used on enlarged chains)
PiecewisePath random_predictable(SplitMix& rng, const FilteredSpace& sp);

// pointwise minimum / maximum of two atomic times under the quantile coupling
RandomTime time_pointwise_min(const RandomTime& x, const RandomTime& y, const FilteredSpace& sp);
RandomTime time_pointwise_max(const RandomTime& x, const RandomTime& y, const FilteredSpace& sp);

} // namespace enlab
