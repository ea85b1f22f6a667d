// random times: associated processes, classification, decomposition,
// exhausting systems, merges, and conditional-law identities
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "enlab/generator.hpp"
#include "enlab/random_time.hpp"
#include "enlab/verify.hpp"

using namespace enlab;

namespace {

FilteredSpace trivial_space() {
    return build_space({"o"}, {Rational(1)}, {Rational(0)}, {{{0}}});
}

FilteredSpace coin_space(const Rational& split_at = Rational(1)) {
    return build_space({"a", "b"}, {rat(1, 2), rat(1, 2)}, {Rational(0), split_at},
                       {{{0, 1}}, {{0}, {1}}});
}

RandomTime never(const FilteredSpace& sp) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law({{TimePoint::inf(), Rational(1)}}, {}));
    return tau;
}

RandomTime deterministic(const FilteredSpace& sp, const Rational& t) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law({{TimePoint::at(t), Rational(1)}}, {}));
    return tau;
}

RandomTime mixture_half_atom_half_uniform(const FilteredSpace& sp) {
    // 1/2 point mass at 1 plus 1/2 uniform on [0,2]
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law({{TimePoint::at(1), rat(1, 2)}},
                                             {{Rational(0), Rational(2), rat(1, 4)}}));
    return tau;
}

} // namespace

TEST_CASE("never-occurring time: Z = 1, Ao = 0, m = 1") {
    FilteredSpace sp = coin_space();
    TimeProcessBundle b = associated_processes(never(sp), sp);
    CHECK(path_equal(b.Z, path_constant(2, Rational(1))));
    CHECK(path_equal(b.Ao, path_constant(2, Rational(0))));
    CHECK(path_equal(b.m, path_constant(2, Rational(1))));
    CHECK(classify(never(sp), sp).kind == TimeKind::infinite);
}

TEST_CASE("deterministic time: indicator supermartingale and unit jump") {
    FilteredSpace sp = coin_space();
    RandomTime tau = deterministic(sp, Rational(1));
    TimeProcessBundle b = associated_processes(tau, sp);
    CHECK(b.Z.eval(0, TimePoint::at(rat(1, 2))) == Rational(1));
    CHECK(b.Z.eval(0, TimePoint::at(Rational(1))) == Rational(0));
    CHECK(b.Ao.jump(0, TimePoint::at(Rational(1))) == Rational(1));
    CHECK(path_equal(b.m, path_constant(2, Rational(1))));
    CHECK(pseudo_stopping_test(tau, sp));
    CHECK(classify(tau, sp).kind == TimeKind::thin);
}

TEST_CASE("independent uniform time: linear decay, continuous compensator, m = 1") {
    FilteredSpace sp = trivial_space();
    RandomTime tau;
    tau.per_leaf.push_back(make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}));
    TimeProcessBundle b = associated_processes(tau, sp);
    CHECK(b.Z.eval(0, TimePoint::at(rat(1, 4))) == rat(3, 4));
    CHECK(b.Z.eval(0, TimePoint::at(Rational(1))) == Rational(0));
    CHECK(b.Ao.eval(0, TimePoint::at(rat(1, 4))) == rat(1, 4));
    CHECK(path_equal(b.m, path_constant(1, Rational(1))));
    CHECK(pseudo_stopping_test(tau, sp));
    CHECK(classify(tau, sp).kind == TimeKind::thick);

    // Ao = Ap for a time avoiding all stopping times
    DualEqualityReport de = dual_equality_test(tau, sp);
    CHECK(de.equal);
}

TEST_CASE("mixture classifies as mixed with exact masses") {
    FilteredSpace sp = trivial_space();
    RandomTime tau = mixture_half_atom_half_uniform(sp);
    Classification c = classify(tau, sp);
    CHECK(c.kind == TimeKind::mixed);
    CHECK(c.thin_mass == rat(1, 2));
    CHECK(c.thick_mass == rat(1, 2));
}

TEST_CASE("thin-thick decomposition splits the mixture along the jump support") {
    FilteredSpace sp = trivial_space();
    RandomTime tau = mixture_half_atom_half_uniform(sp);
    Decomposition d = thin_thick_decompose(tau, sp);
    CHECK(classify(d.thin, sp).kind == TimeKind::thin);
    CHECK(classify(d.thick, sp).kind == TimeKind::thick);
    CHECK(d.thin.per_leaf[0].atom_mass_at(Rational(1)) == rat(1, 2));
    CHECK(d.thin.per_leaf[0].mass_at_inf() == rat(1, 2));
    CHECK(d.thick.per_leaf[0].mass_at_inf() == rat(1, 2));

    // trivial splits
    Decomposition dt = thin_thick_decompose(deterministic(sp, Rational(1)), sp);
    CHECK(classify(dt.thick, sp).kind == TimeKind::infinite);
    RandomTime u;
    u.per_leaf.push_back(make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}));
    Decomposition du = thin_thick_decompose(u, sp);
    CHECK(classify(du.thin, sp).kind == TimeKind::infinite);
}

TEST_CASE("triple decomposition sorts the revealed atom into the accessible part") {
    FilteredSpace sp = coin_space();
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    TripleDecomposition tri = triple_decompose(tau, sp);
    // the predictable dual jumps by 1/2 at t=1, so the atom is accessible
    CHECK(tri.thin_accessible.per_leaf[0].atom_mass_at(Rational(1)) == Rational(1));
    CHECK(classify(tri.thin_inaccessible, sp).kind == TimeKind::infinite);
    CHECK(classify(tri.thick, sp).kind == TimeKind::infinite);

    // a deterministic time is entirely accessible
    TripleDecomposition td = triple_decompose(deterministic(sp, Rational(1)), sp);
    CHECK(td.thin_accessible.per_leaf[0].atom_mass_at(Rational(1)) == Rational(1));

    // a thick time contributes only to the third part
    FilteredSpace tr = trivial_space();
    RandomTime u;
    u.per_leaf.push_back(make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}));
    TripleDecomposition tu = triple_decompose(u, tr);
    CHECK(classify(tu.thin_accessible, tr).kind == TimeKind::infinite);
    CHECK(classify(tu.thick, tr).kind == TimeKind::thick);
}

TEST_CASE("canonical exhausting system and its reconstruction identities") {
    FilteredSpace sp = coin_space();

    // tau1 never occurring: only the infinite tail survives
    ExhaustingSystem s0 = exhausting_system(never(sp), sp);
    CHECK(s0.T.size() == 1);
    CHECK(path_equal(s0.z[0], path_constant(2, Rational(1))));

    // deterministic: one constant stopping time carrying everything
    ExhaustingSystem s1 = exhausting_system(deterministic(sp, Rational(1)), sp);
    CHECK(s1.T.size() == 2);
    CHECK(path_equal(s1.z[1], path_constant(2, Rational(1))));

    // leaf-indexed values 1 on a, 2 on b
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::at(2), Rational(1)}}, {})};
    ExhaustingSystem s2 = exhausting_system(tau, sp);
    CHECK(s2.T.size() == 3);
    CHECK(exhausting_defect(s2, sp).is_zero());
    TimeProcessBundle b = associated_processes(tau, sp);
    CHECK(reconstruction_defect(s2, b, sp).is_zero());
}

TEST_CASE("exhausting system validates user-supplied sequences") {
    FilteredSpace sp = coin_space();
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::at(2), Rational(1)}}, {})};

    // a single leaf-dependent stopping time covers both values
    StoppingTime both;
    both.value = {TimePoint::at(1), TimePoint::at(2)};
    std::vector<StoppingTime> user{both};
    ExhaustingSystem su = exhausting_system(tau, sp, &user);
    CHECK(exhausting_defect(su, sp).is_zero());

    // thick mass is rejected
    FilteredSpace tr = trivial_space();
    RandomTime u;
    u.per_leaf.push_back(make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}));
    CHECK_THROWS_AS(exhausting_system(u, tr), Error);
    try {
        exhausting_system(u, tr);
    } catch (const Error& e) {
        CHECK(e.kind == "NotThin");
    }

    // overlapping graphs are rejected with the offending pair
    StoppingTime dup = both;
    std::vector<StoppingTime> bad{both, dup};
    try {
        exhausting_system(tau, sp, &bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "GraphsNotDisjoint");
    }

    // missing mass is rejected
    StoppingTime partial;
    partial.value = {TimePoint::at(1), TimePoint::inf()};
    std::vector<StoppingTime> miss{partial};
    try {
        exhausting_system(tau, sp, &miss);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "NotCovering");
    }

    // non-stopping times are rejected
    StoppingTime early;
    early.value = {TimePoint::at(0), TimePoint::at(2)};
    std::vector<StoppingTime> ns{early};
    try {
        exhausting_system(tau, sp, &ns);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "NotStoppingTime");
    }
}

TEST_CASE("merging exhausting systems") {
    FilteredSpace sp = coin_space();
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::at(2), Rational(1)}}, {})};
    ExhaustingSystem canon = exhausting_system(tau, sp);

    // self-merge: the diagonal survives, nothing is lost
    ExhaustingSystem self = merge_exhausting(canon, canon, sp);
    CHECK(exhausting_defect(self, sp).is_zero());
    CHECK(self.T.size() == canon.T.size());
    // off-diagonal intersections are empty
    Event off = event_intersect(canon.C[1], canon.C[2], tau);
    CHECK(event_mass(off, tau, sp).is_zero());

    // canonical against an equivalent user system
    StoppingTime both;
    both.value = {TimePoint::at(1), TimePoint::at(2)};
    std::vector<StoppingTime> user{both};
    ExhaustingSystem alt = exhausting_system(tau, sp, &user);
    ExhaustingSystem merged = merge_exhausting(canon, alt, sp);
    CHECK(exhausting_defect(merged, sp).is_zero());
    Rational mass(0);
    for (size_t n = 1; n < merged.C.size(); ++n) mass += event_mass(merged.C[n], tau, sp);
    CHECK(mass == Rational(1));

    // different times are refused
    ExhaustingSystem other = exhausting_system(deterministic(sp, Rational(1)), sp);
    try {
        merge_exhausting(canon, other, sp);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "MismatchedTime");
    }
}

TEST_CASE("dual equality witnesses the revealed atom") {
    FilteredSpace sp = coin_space();
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    DualEqualityReport de = dual_equality_test(tau, sp);
    CHECK_FALSE(de.equal);
    REQUIRE_FALSE(de.witnesses.empty());
    bool at_one = false;
    for (const auto& [t, a] : de.witnesses)
        if (t == Rational(1)) at_one = true;
    CHECK(at_one);
    CHECK(de.inaccessible_condition_vacuous);

    // an atom independent of the terminal field keeps the duals equal
    FilteredSpace tr = trivial_space();
    RandomTime ind;
    ind.per_leaf.push_back(make_leaf_law({{TimePoint::at(1), rat(1, 3)},
                                          {TimePoint::at(2), rat(2, 3)}}, {}));
    CHECK(dual_equality_test(ind, tr).equal);
}

TEST_CASE("pseudo-stopping fails once information about the coin leaks late") {
    // split only at 2: the value 1 is charged before the leaf is revealed
    FilteredSpace sp = build_space({"a", "b"}, {rat(1, 2), rat(1, 2)},
                                   {Rational(0), Rational(1), Rational(2)},
                                   {{{0, 1}}, {{0, 1}}, {{0}, {1}}});
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::at(2), Rational(1)}}, {})};
    CHECK_FALSE(pseudo_stopping_test(tau, sp));

    // any stopping time passes
    FilteredSpace cs = coin_space();
    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    CHECK(pseudo_stopping_test(stop, cs));
}

TEST_CASE("conditional-law identities across the decomposition hold exactly") {
    FilteredSpace sp = coin_space();
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), rat(1, 2)}},
                                  {{Rational(0), Rational(2), rat(1, 4)}}),
                    make_leaf_law({{TimePoint::at(2), rat(1, 4)}},
                                  {{rat(1, 2), rat(3, 2), rat(3, 4)}})};
    for (const auto& t : tau.breakpoints()) {
        CrossConditionalReport r = cross_conditional_check(tau, sp, t);
        CHECK(r.max_residual.is_zero());
        CHECK(r.checks > 0);
    }

    // degenerate halves: a purely thick time and a purely thin one
    FilteredSpace tr = trivial_space();
    RandomTime u;
    u.per_leaf.push_back(make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}));
    CHECK(cross_conditional_check(u, tr, rat(1, 2)).max_residual.is_zero());
    RandomTime d = deterministic(tr, Rational(1));
    CHECK(cross_conditional_check(d, tr, Rational(1)).max_residual.is_zero());
}

TEST_CASE("degenerate denominators are detected defensively") {
    // Z^2 vanishes only where {t < tau2} is null, so the guard never fires on
    // well-formed inputs; this documents the behavior
    FilteredSpace sp = trivial_space();
    RandomTime tau = mixture_half_atom_half_uniform(sp);
    CHECK_NOTHROW(cross_conditional_check(tau, sp, Rational(2)));
    CHECK_NOTHROW(cross_conditional_check(tau, sp, Rational(3)));
}

TEST_CASE("a corrupted bundle fixture trips the matching identity tags") {
    FilteredSpace sp = coin_space();
    RandomTime tau = mixture_half_atom_half_uniform(sp);
    TimeProcessBundle fixture = associated_processes(tau, sp);

    // shift one knot of the compensator path
    AtomPath& ap = fixture.Ao.atom[0];
    ap.knots.back().value += rat(1, 7);
    ap.knots.back().start = ap.knots.back().value;
    ap.at_inf += rat(1, 7);

    SuiteReport rep = verify_bundle(sp, tau, 0, &fixture);
    bool ao_m_z = false, dao = false;
    for (const auto& r : rep.results) {
        if (r.tag == "bundle:Ao=m-Z" && !r.pass) ao_m_z = true;
        if (r.tag == "bundle:dAo=Ztilde-Z" && !r.pass) dao = true;
    }
    CHECK(ao_m_z);
    CHECK(dao);
}

TEST_CASE("randomized corpus: bundle, decomposition and immersion suites all pass") {
    for (uint64_t seed = 100; seed < 130; ++seed) {
        SplitMix rng(seed);
        FilteredSpace sp = random_space(rng);
        RandomTime tau = random_time_on(rng, sp);
        SuiteReport rb = verify_bundle(sp, tau, seed);
        for (const auto& r : rb.results) {
            INFO(r.tag, " seed=", r.seed, " ", r.detail);
            CHECK(r.pass);
        }
        SuiteReport rd = verify_decomposition(sp, tau, seed);
        for (const auto& r : rd.results) {
            INFO(r.tag, " seed=", r.seed, " ", r.detail);
            CHECK(r.pass);
        }
        SuiteReport ri = verify_immersion(sp, tau, seed);
        for (const auto& r : ri.results) {
            INFO(r.tag, " seed=", r.seed, " ", r.detail);
            CHECK(r.pass);
        }
    }
}
