#include "enlab/generator.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace enlab {

namespace {

std::vector<int> compact_labels(std::vector<int> raw) {
    std::map<int, int> remap;
    for (int& v : raw) {
        auto [it, fresh] = remap.try_emplace(v, (int)remap.size());
        v = it->second;
    }
    return raw;
}

} // namespace

FilteredSpace random_space(SplitMix& rng, int max_atoms, int max_grid) {
    int n = 1 + (int)rng.below(max_atoms);
    int g = 1 + (int)rng.below(max_grid);

    std::vector<std::string> ids;
    std::vector<Rational> weights;
    long long total = 0;
    std::vector<long long> units(n);
    for (int a = 0; a < n; ++a) {
        units[a] = 1 + (long long)rng.below(8);
        total += units[a];
        ids.push_back("w" + std::to_string(a));
    }
    for (int a = 0; a < n; ++a) weights.push_back(Rational(units[a], total));

    std::vector<Rational> grid;
    Rational t(0);
    for (int k = 0; k < g; ++k) {
        grid.push_back(t);
        t += Rational(1 + (long long)rng.below(4), 2);
    }

    // refining chain built backward from a random terminal partition
    std::vector<std::vector<int>> chain(g);
    std::vector<int> fin(n);
    int groups = 1 + (int)rng.below(n);
    for (int a = 0; a < n; ++a) fin[a] = (int)rng.below(groups);
    chain[g - 1] = compact_labels(fin);
    for (int k = g - 2; k >= 0; --k) {
        int ncells = 1 + *std::max_element(chain[k + 1].begin(), chain[k + 1].end());
        int coarse = 1 + (int)rng.below(ncells);
        std::vector<int> to(ncells);
        for (int c = 0; c < ncells; ++c) to[c] = (int)rng.below(coarse);
        std::vector<int> cur(n);
        for (int a = 0; a < n; ++a) cur[a] = to[chain[k + 1][a]];
        chain[k] = compact_labels(cur);
    }

    FilteredSpace sp;
    sp.atom_ids = std::move(ids);
    sp.weights = std::move(weights);
    sp.grid = std::move(grid);
    for (int k = 0; k < g; ++k) sp.partitions.push_back(Partition::from_cell_of(chain[k]));
    sp.validate();
    return sp;
}

namespace {

Rational random_time_value(SplitMix& rng, const FilteredSpace& sp) {
    // grid points and half-steps around them, occasionally past the horizon
    Rational last = sp.grid.back();
    long long halves = 2 * (long long)(last * Rational(2)).to_double() + 4;
    return Rational(1 + (long long)rng.below((uint64_t)halves), 2);
}

LeafLaw random_leaf_law(SplitMix& rng, const FilteredSpace& sp,
                        bool allow_density, bool allow_inf) {
    const long long denom = 8;
    long long left = denom;
    std::vector<std::pair<TimePoint, Rational>> atoms;
    std::vector<std::array<Rational, 3>> dens;

    int n_atoms = (int)rng.below(3);
    int n_dens = allow_density ? (int)rng.below(2) : 0;

    std::set<Rational> used;
    for (int i = 0; i < n_atoms && left > 0; ++i) {
        long long units = 1 + (long long)rng.below((uint64_t)left);
        Rational tv = rng.chance(1, 5) ? Rational(0) : random_time_value(rng, sp);
        if (!used.insert(tv).second) continue;
        atoms.emplace_back(TimePoint::at(tv), Rational(units, denom));
        left -= units;
    }
    Rational cursor(0);
    for (int i = 0; i < n_dens && left > 0; ++i) {
        long long units = 1 + (long long)rng.below((uint64_t)left);
        Rational start = cursor + Rational((long long)rng.below(4), 2);
        Rational len = Rational(1 + (long long)rng.below(3), 2);
        dens.push_back({start, start + len, Rational(units, denom) / len});
        cursor = start + len;
        left -= units;
    }
    if (left > 0) {
        if (allow_inf && rng.chance(1, 2)) {
            atoms.emplace_back(TimePoint::inf(), Rational(left, denom));
        } else {
            // park the remainder on one more finite atom (or at infinity if
            // the draw collides with an existing atom time)
            Rational tv = random_time_value(rng, sp);
            if (used.insert(tv).second) atoms.emplace_back(TimePoint::at(tv), Rational(left, denom));
            else atoms.emplace_back(TimePoint::inf(), Rational(left, denom));
        }
    }
    return make_leaf_law(std::move(atoms), std::move(dens));
}

} // namespace

RandomTime random_time_on(SplitMix& rng, const FilteredSpace& sp,
                          bool allow_density, bool allow_inf) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(random_leaf_law(rng, sp, allow_density, allow_inf));
    tau.validate(sp);
    return tau;
}

RandomTime random_atomic_time_on(SplitMix& rng, const FilteredSpace& sp, bool allow_inf) {
    return random_time_on(rng, sp, false, allow_inf);
}

RandomTime random_honest_time(SplitMix& rng, const FilteredSpace& sp) {
    // tau = last switched-on (cell, time) box: the end of an optional set,
    // hence honest; box times may sit strictly inside the grid interval whose
    // partition is in force, or past the final grid point; optionally thinned
    // by an independent escape to infinity
    int n = sp.n_atoms();
    std::vector<std::optional<Rational>> last(n);
    for (int k = 0; k < sp.n_grid(); ++k) {
        const Partition& p = sp.partitions[k];
        for (const auto& cell : p.cells) {
            if (!rng.chance(1, 3)) continue;
            Rational v = sp.grid[k];
            if (rng.chance(1, 3)) {
                if (k + 1 < sp.n_grid()) v = (sp.grid[k] + sp.grid[k + 1]) / Rational(2);
                else v = sp.grid[k] + Rational(1 + (long long)rng.below(3), 2);
            }
            for (int a : cell)
                if (!last[a] || *last[a] < v) last[a] = v;
        }
    }
    RandomTime tau;
    const Partition& leaves = sp.partitions.back();
    for (int c = 0; c < leaves.n_cells(); ++c) {
        int a = leaves.cells[c].front();
        std::vector<std::pair<TimePoint, Rational>> atoms;
        if (last[a]) {
            if (rng.chance(1, 3)) {
                atoms.emplace_back(TimePoint::at(*last[a]), Rational(1, 2));
                atoms.emplace_back(TimePoint::inf(), Rational(1, 2));
            } else {
                atoms.emplace_back(TimePoint::at(*last[a]), Rational(1));
            }
        } else {
            atoms.emplace_back(TimePoint::inf(), Rational(1));
        }
        tau.per_leaf.push_back(make_leaf_law(std::move(atoms), {}));
    }
    tau.validate(sp);
    return tau;
}

PiecewisePath random_martingale(SplitMix& rng, const FilteredSpace& sp) {
    std::vector<Rational> terminal(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a)
        terminal[a] = Rational((long long)rng.below(9) - 4, 1 + (long long)rng.below(3));
    return martingale_from_terminal(terminal, sp, sp.grid);
}

PiecewisePath random_predictable(SplitMix& rng, const FilteredSpace& sp) {
    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int k = 0; k < sp.n_grid(); ++k) {
        TimePoint t = TimePoint::at(sp.grid[k]);
        const Partition& before = sp.partition(sp.index_before(t));
        std::vector<Rational> v(sp.n_atoms());
        for (const auto& cell : before.cells) {
            Rational val((long long)rng.below(7) - 3, 2);
            for (int a : cell) v[a] = val;
        }
        std::vector<Rational> l(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a)
            l[a] = k == 0 ? v[a] : p.atom[a].knots.back().value;
        for (int a = 0; a < sp.n_atoms(); ++a)
            p.atom[a].knots.push_back(PathKnot{sp.grid[k], l[a], v[a], v[a], Rational(0)});
    }
    for (int a = 0; a < sp.n_atoms(); ++a) p.atom[a].at_inf = p.atom[a].knots.back().value;
    p.adapted = true;
    p.cadlag = true;
    p.predictable = true;
    return p;
}

// --- pointwise lattice operations under the quantile coupling -------------------

namespace {

RandomTime pointwise_combine(const RandomTime& x, const RandomTime& y, const FilteredSpace& sp,
                             bool take_min) {
    if (!x.is_atomic() || !y.is_atomic())
        fail("HasContinuousPart", "pointwise combination needs atomic times");
    RandomTime out;
    for (size_t l = 0; l < x.per_leaf.size(); ++l) {
        // refine the two u-layouts and combine piece values
        std::set<Rational> cuts{Rational(0), Rational(1)};
        for (const auto& pc : x.per_leaf[l].pieces) cuts.insert(pc.u1);
        for (const auto& pc : y.per_leaf[l].pieces) cuts.insert(pc.u1);
        std::vector<Rational> edges(cuts.begin(), cuts.end());

        auto value_at = [](const LeafLaw& law, const Rational& u) {
            for (const auto& pc : law.pieces)
                if (pc.u0 <= u && u < pc.u1) return pc.t;
            return law.pieces.back().t;
        };
        std::map<TimePoint, Rational> mass;
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            const Rational& u = edges[i];
            TimePoint vx = value_at(x.per_leaf[l], u);
            TimePoint vy = value_at(y.per_leaf[l], u);
            TimePoint v = take_min ? (vx <= vy ? vx : vy) : (vx >= vy ? vx : vy);
            auto [it, fresh] = mass.try_emplace(v, Rational(0));
            it->second += edges[i + 1] - edges[i];
        }
        std::vector<std::pair<TimePoint, Rational>> atoms(mass.begin(), mass.end());
        out.per_leaf.push_back(make_leaf_law(std::move(atoms), {}));
    }
    out.validate(sp);
    return out;
}

} // namespace

RandomTime time_pointwise_min(const RandomTime& x, const RandomTime& y, const FilteredSpace& sp) {
    return pointwise_combine(x, y, sp, true);
}

RandomTime time_pointwise_max(const RandomTime& x, const RandomTime& y, const FilteredSpace& sp) {
    return pointwise_combine(x, y, sp, false);
}

} // namespace enlab
