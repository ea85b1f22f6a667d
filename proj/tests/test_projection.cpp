// optional/predictable projections and dual projections against brute-force
// enumeration oracles
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "enlab/generator.hpp"
#include "enlab/projection.hpp"
#include "enlab/random_time.hpp"

using namespace enlab;

namespace {

FilteredSpace trivial_space() {
    return build_space({"o"}, {Rational(1)}, {Rational(0)}, {{{0}}});
}

FilteredSpace coin_space() {
    return build_space({"a", "b"}, {rat(1, 2), rat(1, 2)}, {Rational(0), Rational(1)},
                       {{{0, 1}}, {{0}, {1}}});
}

RandomTime uniform_time(const FilteredSpace& sp, const Rational& lo, const Rational& hi) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law({}, {{lo, hi, Rational(1) / (hi - lo)}}));
    return tau;
}

RandomTime atomic_time(const FilteredSpace& sp,
                       std::vector<std::vector<std::pair<TimePoint, Rational>>> per_leaf) {
    RandomTime tau;
    for (auto& atoms : per_leaf) tau.per_leaf.push_back(make_leaf_law(std::move(atoms), {}));
    tau.validate(sp);
    return tau;
}

// independent oracle: dual projections computed directly from the law by
// enumerating (atom x piece) pairs and conditioning cell sums by definition
Rational oracle_dual_jump(const RandomTime& tau, const FilteredSpace& sp, int atom,
                          const Rational& t, bool predictable) {
    int k = predictable ? sp.index_before(TimePoint::at(t)) : sp.index_at(TimePoint::at(t));
    const Partition& p = sp.partition(k);
    Rational num(0), den(0);
    for (int a2 : p.cells[p.cell_of[atom]]) {
        num += sp.weights[a2] * tau.per_leaf[sp.leaf_of(a2)].atom_mass_at(t);
        den += sp.weights[a2];
    }
    return num / den;
}

Rational oracle_dual_slope(const RandomTime& tau, const FilteredSpace& sp, int atom,
                           const Rational& t) {
    int k = sp.index_at(TimePoint::at(t));
    const Partition& p = sp.partition(k);
    Rational num(0), den(0);
    for (int a2 : p.cells[p.cell_of[atom]]) {
        num += sp.weights[a2] * tau.per_leaf[sp.leaf_of(a2)].density_level_at(t);
        den += sp.weights[a2];
    }
    return num / den;
}

} // namespace

TEST_CASE("optional projection fixes adapted paths") {
    FilteredSpace sp = coin_space();
    PiecewisePath x;
    x.atom.resize(2);
    for (int a = 0; a < 2; ++a) {
        x.atom[a].knots.push_back(PathKnot::flat(Rational(0), rat(1, 3)));
        x.atom[a].knots.push_back(PathKnot{Rational(1), rat(1, 3), Rational(a), Rational(a), Rational(0)});
        x.atom[a].at_inf = Rational(a);
    }
    PiecewisePath px = project(x, ProjectionKind::optional_kind, sp);
    CHECK(path_equal(px, x));
}

TEST_CASE("optional projection of a uniform indicator is the running CDF") {
    FilteredSpace sp = trivial_space();
    RandomTime tau = uniform_time(sp, Rational(0), Rational(1));
    PiecewisePath raw = raw_indicator_path(tau, sp);
    PiecewisePath p = project(raw, ProjectionKind::optional_kind, sp);
    // oracle: P(tau <= t) = t ^ 1
    CHECK(p.eval(0, TimePoint::at(rat(1, 4))) == rat(1, 4));
    CHECK(p.eval(0, TimePoint::at(rat(1, 2))) == rat(1, 2));
    CHECK(p.eval(0, TimePoint::at(Rational(2))) == Rational(1));
    CHECK(p.eval(0, TimePoint::inf()) == Rational(1));
}

TEST_CASE("predictable projection conditions one refinement earlier") {
    FilteredSpace sp = coin_space();
    // X_t = 1_{t >= 1} 1_a
    PiecewisePath x;
    x.atom.resize(2);
    for (int a = 0; a < 2; ++a) {
        Rational v = a == 0 ? Rational(1) : Rational(0);
        x.atom[a].knots.push_back(PathKnot::flat(Rational(0), Rational(0)));
        x.atom[a].knots.push_back(PathKnot{Rational(1), Rational(0), v, v, Rational(0)});
        x.atom[a].at_inf = v;
    }
    PiecewisePath p = project(x, ProjectionKind::predictable_kind, sp);
    CHECK(p.eval(0, TimePoint::at(Rational(1))) == rat(1, 2));
    CHECK(p.eval(1, TimePoint::at(Rational(1))) == rat(1, 2));
}

TEST_CASE("adapted increasing processes are their own dual optional projection") {
    FilteredSpace sp = coin_space();
    PiecewisePath v;
    v.atom.resize(2);
    for (int a = 0; a < 2; ++a) {
        v.atom[a].knots.push_back(PathKnot::flat(Rational(0), Rational(0)));
        Rational jump = a == 0 ? rat(1, 2) : rat(1, 4);
        v.atom[a].knots.push_back(PathKnot{Rational(1), Rational(0), jump, jump, Rational(0)});
        v.atom[a].at_inf = jump;
    }
    PiecewisePath d = dual_project(v, ProjectionKind::optional_kind, sp);
    CHECK(path_equal(d, v));
    CHECK(duality_defect(v, d, ProjectionKind::optional_kind, sp).is_zero());
}

TEST_CASE("uniform time has the continuous running compensator") {
    FilteredSpace sp = trivial_space();
    RandomTime tau = uniform_time(sp, Rational(0), Rational(1));
    PiecewisePath raw = raw_indicator_path(tau, sp);
    PiecewisePath ao = dual_project(raw, ProjectionKind::optional_kind, sp);
    CHECK(ao.eval(0, TimePoint::at(rat(1, 2))) == rat(1, 2));
    CHECK(ao.eval(0, TimePoint::at(Rational(3))) == Rational(1));
    for (const auto& k : ao.atom[0].knots) CHECK(k.value == k.left);   // no jumps
    CHECK(duality_defect(raw, ao, ProjectionKind::optional_kind, sp).is_zero());
}

TEST_CASE("revealed atom: optional dual jumps by 1 on its cell, predictable by 1/2") {
    FilteredSpace sp = coin_space();
    RandomTime tau = atomic_time(sp, {{{TimePoint::at(1), Rational(1)}},
                                      {{TimePoint::inf(), Rational(1)}}});
    PiecewisePath raw = raw_indicator_path(tau, sp);
    PiecewisePath ao = dual_project(raw, ProjectionKind::optional_kind, sp);
    PiecewisePath ap = dual_project(raw, ProjectionKind::predictable_kind, sp);
    CHECK(ao.jump(0, TimePoint::at(Rational(1))) == Rational(1));
    CHECK(ao.jump(1, TimePoint::at(Rational(1))) == Rational(0));
    CHECK(ap.jump(0, TimePoint::at(Rational(1))) == rat(1, 2));
    CHECK(ap.jump(1, TimePoint::at(Rational(1))) == rat(1, 2));
    CHECK(oracle_dual_jump(tau, sp, 0, Rational(1), false) == Rational(1));
    CHECK(oracle_dual_jump(tau, sp, 0, Rational(1), true) == rat(1, 2));
    CHECK(duality_defect(raw, ao, ProjectionKind::optional_kind, sp).is_zero());
    CHECK(duality_defect(raw, ap, ProjectionKind::predictable_kind, sp).is_zero());
}

TEST_CASE("dual projections match the enumeration oracle on random instances") {
    for (uint64_t seed = 1; seed <= 40; ++seed) {
        SplitMix rng(seed);
        FilteredSpace sp = random_space(rng);
        RandomTime tau = random_time_on(rng, sp);
        PiecewisePath raw = raw_indicator_path(tau, sp);
        PiecewisePath ao = dual_project(raw, ProjectionKind::optional_kind, sp);
        PiecewisePath ap = dual_project(raw, ProjectionKind::predictable_kind, sp);

        for (int a = 0; a < sp.n_atoms(); ++a)
            for (const auto& k : ao.atom[a].knots) {
                CHECK(ao.jump(a, TimePoint::at(k.t)) == oracle_dual_jump(tau, sp, a, k.t, false));
                CHECK(ap.jump(a, TimePoint::at(k.t)) == oracle_dual_jump(tau, sp, a, k.t, true));
                CHECK(k.slope == oracle_dual_slope(tau, sp, a, k.t));
            }

        CHECK(duality_defect(raw, ao, ProjectionKind::optional_kind, sp).is_zero());
        CHECK(duality_defect(raw, ap, ProjectionKind::predictable_kind, sp).is_zero());

        // the compensator of the dual optional projection is the dual
        // predictable projection
        CHECK(path_equal(dual_project(ao, ProjectionKind::predictable_kind, sp), ap));

        // expected terminal mass is preserved
        Rational lhs(0), rhs(0);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            lhs += sp.weights[a] * raw.atom[a].at_inf;
            rhs += sp.weights[a] * ao.atom[a].at_inf;
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("pointwise projections agree with direct conditioning on random instances") {
    for (uint64_t seed = 50; seed <= 70; ++seed) {
        SplitMix rng(seed);
        FilteredSpace sp = random_space(rng);
        RandomTime tau = random_time_on(rng, sp);
        PiecewisePath raw = raw_indicator_path(tau, sp);
        PiecewisePath opt = project(raw, ProjectionKind::optional_kind, sp);
        PiecewisePath pre = project(raw, ProjectionKind::predictable_kind, sp);
        CHECK(check_adapted(opt, sp));
        for (int a = 0; a < sp.n_atoms(); ++a)
            for (const auto& k : opt.atom[a].knots) {
                TimePoint t = TimePoint::at(k.t);
                std::vector<Rational> vals(sp.n_atoms());
                for (int a2 = 0; a2 < sp.n_atoms(); ++a2) vals[a2] = raw.eval(a2, t);
                CHECK(opt.eval(a, t) == sp.cell_average(vals, sp.index_at(t))[a]);
                CHECK(pre.eval(a, t) == sp.cell_average(vals, sp.index_before(t))[a]);
            }
    }
}
