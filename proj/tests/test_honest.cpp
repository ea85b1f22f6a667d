// honest-time detection, alpha, thin-honest identities, jumping exhaustion
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "enlab/enlargement.hpp"
#include "enlab/generator.hpp"
#include "enlab/honest.hpp"
#include "enlab/verify.hpp"

using namespace enlab;

namespace {

// three-step +-1 walk, eight equally likely paths, filtration by prefixes
FilteredSpace walk_space() {
    std::vector<std::string> ids;
    std::vector<Rational> w;
    for (int p = 0; p < 8; ++p) {
        std::string id;
        for (int s = 0; s < 3; ++s) id += ((p >> s) & 1) ? 'u' : 'd';
        ids.push_back(id);
        w.push_back(rat(1, 8));
    }
    std::vector<std::vector<std::vector<int>>> parts(4);
    for (int k = 0; k <= 3; ++k) {
        std::map<int, std::vector<int>> groups;
        for (int p = 0; p < 8; ++p) groups[p & ((1 << k) - 1)].push_back(p);
        for (auto& [key, cell] : groups) parts[k].push_back(cell);
    }
    return build_space(ids, w, {Rational(0), Rational(1), Rational(2), Rational(3)}, parts);
}

int walk_level(int path, int k) {
    int lvl = 0;
    for (int s = 0; s < k; ++s) lvl += ((path >> s) & 1) ? 1 : -1;
    return lvl;
}

// last visit to the running maximum of the walk
RandomTime walk_max_time(const FilteredSpace& sp) {
    RandomTime tau;
    tau.per_leaf.resize(8);
    for (int p = 0; p < 8; ++p) {
        int best = 0, last = 0;
        for (int k = 0; k <= 3; ++k) {
            int lvl = walk_level(p, k);
            if (lvl >= best) {
                best = lvl;
                last = k;
            }
        }
        int leaf = sp.leaf_of(p);
        tau.per_leaf[leaf] = make_leaf_law({{TimePoint::at(last), Rational(1)}}, {});
    }
    tau.validate(sp);
    return tau;
}

FilteredSpace coin_space() {
    return build_space({"a", "b"}, {rat(1, 2), rat(1, 2)}, {Rational(0), Rational(1)},
                       {{{0, 1}}, {{0}, {1}}});
}

} // namespace

TEST_CASE("stopping times are honest with a flat selection") {
    FilteredSpace sp = coin_space();
    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    HonestCertificate cert = is_honest(stop, sp);
    CHECK(cert.honest);
    CHECK(cert.violation_mass.is_zero());
    CHECK(check_increasing(cert.alpha));
    CHECK(check_adapted(cert.alpha, sp));
    CHECK(cert.alpha.eval(0, TimePoint::at(Rational(1))) == Rational(1));
}

TEST_CASE("the last visit of the walk maximum is a thin honest time") {
    FilteredSpace sp = walk_space();
    RandomTime tau = walk_max_time(sp);
    HonestCertificate cert = is_honest(tau, sp);
    CHECK(cert.honest);
    CHECK(classify(tau, sp).kind == TimeKind::thin);

    // the one-value-per-leaf selection recovers tau after it happens
    for (int a = 0; a < 8; ++a) {
        Rational v = tau.per_leaf[sp.leaf_of(a)].pieces[0].t.t;
        CHECK(cert.alpha.eval(a, TimePoint::at(Rational(3))) == v);
        // tau = sup{t : alpha_t = t}
        bool attained = false;
        for (const auto& k : cert.alpha.atom[a].knots)
            if (k.value == k.t && k.t == v) attained = true;
        CHECK(attained);
    }

    ThinHonestReport th = thin_honest_identities(tau, sp);
    CHECK(th.max_residual.is_zero());
    CHECK(th.checks > 0);

    HonestPartsReport parts = honest_thick_criterion(tau, sp);
    CHECK(parts.thin_part_strict);
    CHECK(parts.thick_part_unit);    // vacuous: no thick mass exists here
    CHECK(parts.parts_honest);
    CHECK(parts.thick_mass.is_zero());
}

TEST_CASE("an external coin time is not honest and is rejected downstream") {
    FilteredSpace sp = coin_space();
    RandomTime coin;
    coin.per_leaf.assign(2, make_leaf_law({{TimePoint::at(rat(1, 2)), rat(1, 2)},
                                           {TimePoint::at(1), rat(1, 2)}}, {}));
    HonestCertificate cert = is_honest(coin, sp);
    CHECK_FALSE(cert.honest);
    CHECK(cert.violation_mass.signum() > 0);
    CHECK_THROWS_AS(thin_honest_identities(coin, sp), Error);
    try {
        jumping_exhaust(coin, sp);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "NotHonest");
    }
}

TEST_CASE("no finite model hosts a mixed honest time: the derived oracle rejects it") {
    // walk-max combined with an independent uniform through a pointwise minimum:
    // the uniform leg charges times where the tilde supermartingale sits below
    // one, so honesty fails with positive violation mass
    FilteredSpace sp = walk_space();
    RandomTime tau = walk_max_time(sp);
    RandomTime mixed;
    for (int l = 0; l < (int)tau.per_leaf.size(); ++l) {
        const LawPiece& pc = tau.per_leaf[l].pieces[0];
        // tau n uniform(0,4): the atom keeps the sub-uniform tail above it
        Rational v = pc.t.t;
        std::vector<std::array<Rational, 3>> dens;
        if (v.signum() > 0) dens.push_back({Rational(0), v, rat(1, 4)});
        Rational atom_mass = Rational(1) - rat(1, 4) * v;
        mixed.per_leaf.push_back(make_leaf_law({{pc.t, atom_mass}}, std::move(dens)));
    }
    mixed.validate(sp);
    Classification cls = classify(mixed, sp);
    if (cls.thick_mass.signum() > 0) {
        HonestCertificate cert = is_honest(mixed, sp);
        CHECK_FALSE(cert.honest);
        CHECK(cert.violation_mass.signum() > 0);
        CHECK_THROWS_AS(honest_thick_criterion(mixed, sp), Error);
    }
}

TEST_CASE("jumping exhaustion rebuilds the honest time from alpha and the grid") {
    FilteredSpace sp = walk_space();
    RandomTime tau = walk_max_time(sp);
    ExhaustingSystem js = jumping_exhaust(tau, sp);
    CHECK(exhausting_defect(js, sp).is_zero());

    // interval times recover tau on their events
    AlphaSelection sel = alpha_selection(tau, sp);
    for (size_t n = 1; n < js.T.size(); ++n) {
        auto cm = event_cond_mass(js.C[n], tau, sp);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            if (cm[a].is_zero()) continue;
            Rational v = tau.per_leaf[sp.leaf_of(a)].pieces[0].t.t;
            CHECK(js.T[n].value[a] == TimePoint::at(v));
        }
    }

    // merging against the canonical constants preserves everything
    ExhaustingSystem canon = exhausting_system(tau, sp);
    ExhaustingSystem merged = merge_exhausting(js, canon, sp);
    CHECK(exhausting_defect(merged, sp).is_zero());
    TimeProcessBundle b = associated_processes(tau, sp);
    CHECK(reconstruction_defect(merged, b, sp).is_zero());

    // a plain stopping time is recovered by its own interval
    FilteredSpace cs = coin_space();
    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    ExhaustingSystem jstop = jumping_exhaust(stop, cs);
    bool recovered = false;
    for (size_t n = 1; n < jstop.T.size(); ++n)
        if (jstop.T[n].value[0] == TimePoint::at(Rational(1))) recovered = true;
    CHECK(recovered);
}

TEST_CASE("honest drift coincides with the thin drift with unit integrand") {
    FilteredSpace sp = walk_space();
    RandomTime tau = walk_max_time(sp);
    EnlargedSpace enl = enlarge_progressive(sp, tau);

    SplitMix rng(7);
    PiecewisePath M = random_martingale(rng, sp);
    HonestDriftReport hr = drift_honest(M, tau, sp, enl);
    CHECK(hr.martingale);
    CHECK(hr.max_residual.is_zero());
    CHECK(hr.coincides_with_thin);

    // tau never occurring: the drift is the all-time pre-tau term and vanishes
    FilteredSpace cs = coin_space();
    RandomTime nv;
    nv.per_leaf.assign(2, make_leaf_law({{TimePoint::inf(), Rational(1)}}, {}));
    EnlargedSpace en = enlarge_progressive(cs, nv);
    PiecewisePath Y = martingale_from_terminal({Rational(1), Rational(-1)}, cs, cs.grid);
    HonestDriftReport h0 = drift_honest(Y, nv, cs, en);
    CHECK(h0.martingale);
    CHECK(path_equal(h0.drift, path_constant(en.space.n_atoms(), Rational(0))));

    // a non-honest time is refused
    RandomTime coin;
    coin.per_leaf.assign(2, make_leaf_law({{TimePoint::at(rat(1, 2)), rat(1, 2)},
                                           {TimePoint::at(1), rat(1, 2)}}, {}));
    EnlargedSpace ec = enlarge_progressive(cs, coin);
    try {
        drift_honest(Y, coin, cs, ec);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "NotHonest");
    }
}

TEST_CASE("randomized honest corpus passes exactly") {
    for (uint64_t seed = 400; seed < 440; ++seed) {
        SuiteReport r = verify_honest_instance(seed);
        for (const auto& c : r.results) {
            INFO(c.tag, " seed=", c.seed, " ", c.detail);
            CHECK(c.pass);
        }
    }
}
