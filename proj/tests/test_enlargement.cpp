// progressive and initial enlargements, key lemma, drift formulas, immersion
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "enlab/enlargement.hpp"
#include "enlab/generator.hpp"
#include "enlab/verify.hpp"

using namespace enlab;

namespace {

FilteredSpace coin_space() {
    return build_space({"a", "b"}, {rat(1, 2), rat(1, 2)}, {Rational(0), Rational(1)},
                       {{{0, 1}}, {{0}, {1}}});
}

RandomTime never(const FilteredSpace& sp) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law({{TimePoint::inf(), Rational(1)}}, {}));
    return tau;
}

// external coin: on every leaf, tau = 1 or infinity with probability 1/2 each
RandomTime external_coin(const FilteredSpace& sp) {
    RandomTime tau;
    int leaves = sp.partitions.back().n_cells();
    for (int l = 0; l < leaves; ++l)
        tau.per_leaf.push_back(make_leaf_law(
            {{TimePoint::at(1), rat(1, 2)}, {TimePoint::inf(), rat(1, 2)}}, {}));
    return tau;
}

// tau reveals the coin before the filtration does
RandomTime revealing(const FilteredSpace& sp) {
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(0), Rational(1)}}, {}),
                    make_leaf_law({{TimePoint::at(1), Rational(1)}}, {})};
    tau.validate(sp);
    return tau;
}

PiecewisePath coin_flip_martingale(const FilteredSpace& sp) {
    return martingale_from_terminal({Rational(1), Rational(-1)}, sp, sp.grid);
}

} // namespace

TEST_CASE("enlarging by a never-occurring or stopping time changes nothing") {
    FilteredSpace sp = coin_space();

    EnlargedSpace e0 = enlarge_progressive(sp, never(sp));
    CHECK(e0.space.n_atoms() == 2);
    for (int k = 0; k < sp.n_grid(); ++k)
        CHECK(e0.space.partitions[k] == sp.partitions[k]);

    // tau equal to a stopping time: partitions stay those of the base space
    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    EnlargedSpace e1 = enlarge_progressive(sp, stop);
    CHECK(e1.space.n_atoms() == 2);
    for (int k = 0; k < e1.space.n_grid(); ++k) {
        std::vector<int> base_cells(e1.space.n_atoms());
        const Partition& bp =
            sp.partition(sp.index_at(TimePoint::at(e1.space.grid[k])));
        for (int e = 0; e < e1.space.n_atoms(); ++e) base_cells[e] = bp.cell_of[e1.base_atom[e]];
        CHECK(e1.space.partitions[k] == Partition::from_cell_of(std::move(base_cells)));
    }
}

TEST_CASE("external coin doubles the atoms and separates {tau = 1} from 1 on") {
    FilteredSpace sp = coin_space();
    EnlargedSpace enl = enlarge_progressive(sp, external_coin(sp));
    CHECK(enl.space.n_atoms() == 4);

    // before 1 the extra coin is invisible
    const Partition& p0 = enl.space.partitions[0];
    for (int e1 = 0; e1 < 4; ++e1)
        for (int e2 = 0; e2 < 4; ++e2)
            CHECK(p0.cell_of[e1] == p0.cell_of[e2]);

    // from 1 on, {tau = 1} splits each base cell
    int k1 = enl.space.index_at(TimePoint::at(Rational(1)));
    const Partition& p1 = enl.space.partitions[k1];
    for (int e1 = 0; e1 < 4; ++e1)
        for (int e2 = 0; e2 < 4; ++e2) {
            bool same_base = enl.base_atom[e1] == enl.base_atom[e2];
            bool same_tau = enl.tau_value[e1] == enl.tau_value[e2];
            CHECK((p1.cell_of[e1] == p1.cell_of[e2]) == (same_base && same_tau));
        }

    CHECK(is_stopping_time(enl.tau_as_stopping_time(), enl.space).stopping);

    // the initial enlargement splits the coin already at time 0
    EnlargedSpace init = enlarge_initial(sp, external_coin(sp));
    const Partition& q0 = init.space.partitions[0];
    CHECK(q0.n_cells() == 2);
    for (int e = 0; e < 4; ++e)
        CHECK(q0.cell_of[e] == (init.tau_value[e].infinite ? q0.cell_of[3] : q0.cell_of[0]));

    // initial enlargement by the whole-space partition is the base chain
    std::vector<Event> whole(1);
    whole[0].part.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a)
        for (int j = 0; j < (int)external_coin(sp).per_leaf[sp.leaf_of(a)].pieces.size(); ++j)
            whole[0].part[a].atom_pieces.push_back(j);
    EnlargedSpace triv = enlarge_initial(sp, external_coin(sp), whole);
    for (int k = 0; k < triv.space.n_grid(); ++k) {
        std::vector<int> base_cells(triv.space.n_atoms());
        const Partition& bp =
            sp.partition(sp.index_at(TimePoint::at(triv.space.grid[k])));
        for (int e = 0; e < triv.space.n_atoms(); ++e)
            base_cells[e] = bp.cell_of[triv.base_atom[e]];
        CHECK(triv.space.partitions[k] == Partition::from_cell_of(std::move(base_cells)));
    }

    // a density part cannot be enlarged exactly
    RandomTime mixed;
    mixed.per_leaf = {make_leaf_law({}, {{Rational(0), Rational(1), Rational(1)}}),
                      make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    CHECK_THROWS_AS(enlarge_progressive(sp, mixed), Error);
    try {
        enlarge_progressive(sp, mixed);
    } catch (const Error& e) {
        CHECK(e.kind == "HasContinuousPart");
    }
}

TEST_CASE("key lemma: measurable integrands and indicator integrands are exact") {
    FilteredSpace sp = coin_space();
    RandomTime tau = external_coin(sp);
    EnlargedSpace enl = enlarge_progressive(sp, tau);

    // X measurable for F_t: both sides equal X itself
    RandomVariable flat = RandomVariable::from_values({rat(2, 3), rat(2, 3)});
    KeyLemmaReport r1 = key_lemma_evaluate(flat, tau, sp, enl, Rational(1));
    CHECK(r1.max_residual.is_zero());

    // X = 1_{C_n}: both sides are one on the matching event
    RandomVariable ind;
    ind.atom.resize(2);
    for (int a = 0; a < 2; ++a)
        ind.atom[a] = {PolyPiece{Rational(0), rat(1, 2), {Rational(1)}},
                       PolyPiece{rat(1, 2), Rational(1), {Rational(0)}}};
    KeyLemmaReport r2 = key_lemma_evaluate(ind, tau, sp, enl, Rational(1));
    CHECK(r2.max_residual.is_zero());

    // a random u-polynomial on a three-step tree with a two-atom time
    FilteredSpace tree = build_space({"uu", "ud", "du", "dd"},
                                     {rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},
                                     {Rational(0), Rational(1), Rational(2)},
                                     {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}});
    RandomTime two;
    for (int l = 0; l < 4; ++l)
        two.per_leaf.push_back(make_leaf_law(
            {{TimePoint::at(1), rat(1, 3)}, {TimePoint::at(2), rat(2, 3)}}, {}));
    EnlargedSpace te = enlarge_progressive(tree, two);
    RandomVariable x;
    x.atom.resize(4);
    for (int a = 0; a < 4; ++a)
        x.atom[a] = {PolyPiece{Rational(0), Rational(1),
                               {rat(a + 1, 3), rat(1, 2), Rational(a)}}};
    for (const auto& g : te.space.grid) {
        KeyLemmaReport r = key_lemma_evaluate(x, two, tree, te, g);
        CHECK(r.max_residual.is_zero());
    }
}

TEST_CASE("thin drift: stopping times and independent times produce zero drift") {
    FilteredSpace sp = coin_space();
    PiecewisePath Y = coin_flip_martingale(sp);

    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    EnlargedSpace es = enlarge_progressive(sp, stop);
    DriftReport rs = drift_thin(Y, path_constant(es.space.n_atoms(), Rational(1)), stop, sp, es);
    CHECK(rs.martingale);
    CHECK(path_equal(rs.drift, path_constant(es.space.n_atoms(), Rational(0))));

    RandomTime coin = external_coin(sp);
    EnlargedSpace ec = enlarge_progressive(sp, coin);
    DriftReport rc = drift_thin(Y, path_constant(ec.space.n_atoms(), Rational(1)), coin, sp, ec);
    CHECK(rc.martingale);
    CHECK(path_equal(rc.drift, path_constant(ec.space.n_atoms(), Rational(0))));
}

TEST_CASE("thin drift: a revealing time forces a nonzero exact compensation") {
    FilteredSpace sp = coin_space();
    PiecewisePath Y = coin_flip_martingale(sp);
    RandomTime tau = revealing(sp);
    EnlargedSpace enl = enlarge_progressive(sp, tau);
    DriftReport r = drift_thin(Y, path_constant(enl.space.n_atoms(), Rational(1)), tau, sp, enl);
    CHECK(r.martingale);
    CHECK(r.max_residual.is_zero());
    CHECK_FALSE(path_equal(r.drift, path_constant(enl.space.n_atoms(), Rational(0))));

    // the same three cases through the initial enlargement
    EnlargedSpace init = enlarge_initial(sp, tau);
    DriftReport rj = drift_jacod(Y, tau, sp, init);
    CHECK(rj.martingale);
    CHECK_FALSE(path_equal(rj.drift, path_constant(init.space.n_atoms(), Rational(0))));

    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    EnlargedSpace is2 = enlarge_initial(sp, stop);
    DriftReport rj2 = drift_jacod(Y, stop, sp, is2);
    CHECK(rj2.martingale);

    // a non-martingale integrator is rejected
    PiecewisePath drifty = path_constant(2, Rational(0));
    for (int a = 0; a < 2; ++a) {
        drifty.atom[a].knots.push_back(PathKnot{Rational(1), Rational(0), Rational(1), Rational(1), Rational(0)});
        drifty.atom[a].at_inf = Rational(1);
    }
    try {
        drift_thin(drifty, path_constant(enl.space.n_atoms(), Rational(1)), tau, sp, enl);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == "NotMartingale");
    }
}

TEST_CASE("is_martingale classifies the bundle residents") {
    FilteredSpace sp = coin_space();
    CHECK(is_martingale(path_constant(2, rat(5, 7)), sp).is_martingale);
    RandomTime tau = external_coin(sp);
    TimeProcessBundle b = associated_processes(tau, sp);
    CHECK(is_martingale(b.m, sp).is_martingale);
    CHECK_FALSE(is_martingale(b.Ao, sp).is_martingale);
    ExhaustingSystem sys = exhausting_system(tau, sp);
    for (const auto& z : sys.z) CHECK(is_martingale(z, sp).is_martingale);
}

TEST_CASE("immersion: independent times pass, revealing times fail") {
    FilteredSpace sp = coin_space();

    ImmersionReport ri = immersion_test(external_coin(sp), sp);
    CHECK(ri.immersed);
    CHECK(ri.has_thin_conditions);
    CHECK(ri.cond_terminal);
    CHECK(ri.cond_stopped);
    CHECK(ri.cond_factorization);
    CHECK(ri.split_consistent);

    // F_infinity-measurable value charged before it is revealed
    FilteredSpace late = build_space({"a", "b"}, {rat(1, 2), rat(1, 2)},
                                     {Rational(0), Rational(1), Rational(2)},
                                     {{{0, 1}}, {{0, 1}}, {{0}, {1}}});
    RandomTime peek;
    peek.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::at(2), Rational(1)}}, {})};
    ImmersionReport rp = immersion_test(peek, late);
    CHECK_FALSE(rp.immersed);
    CHECK_FALSE(rp.cond_terminal);
    CHECK(rp.split_consistent);

    RandomTime stop;
    stop.per_leaf = {make_leaf_law({{TimePoint::at(1), Rational(1)}}, {}),
                     make_leaf_law({{TimePoint::inf(), Rational(1)}}, {})};
    CHECK(immersion_test(stop, sp).immersed);
}

TEST_CASE("after-tau transfer lemma on hand-built processes") {
    FilteredSpace sp = coin_space();
    RandomTime tau = external_coin(sp);
    EnlargedSpace prog = enlarge_progressive(sp, tau);
    EnlargedSpace init = enlarge_initial(sp, tau);

    // the zero process transfers trivially
    PiecewisePath zero = path_constant(prog.space.n_atoms(), Rational(0));
    AfterTimeTransferReport r0 = after_time_transfer_check(zero, prog, init, {});
    CHECK(r0.martingale_initial);
    CHECK(r0.martingale_progressive);
    CHECK(r0.verdicts_agree);

    // a process charged on [0, tau] is rejected up front
    PiecewisePath charged = path_constant(prog.space.n_atoms(), Rational(1));
    CHECK_THROWS_AS(after_time_transfer_check(charged, prog, init, {}), Error);
}

TEST_CASE("drift report serializes with its verdict") {
    FilteredSpace sp = coin_space();
    RandomTime tau = revealing(sp);
    EnlargedSpace enl = enlarge_progressive(sp, tau);
    PiecewisePath Y = coin_flip_martingale(sp);
    DriftReport r = drift_thin(Y, path_constant(enl.space.n_atoms(), Rational(1)), tau, sp, enl);
    std::string j = drift_report_to_json_text(r, enl);
    CHECK(j.find("\"verdict\":\"martingale\"") != std::string::npos);
    CHECK(j.find("\"residual\":\"0\"") != std::string::npos);
    CHECK(j.find("knots") != std::string::npos);

    // enlarged spaces round-trip through the space schema
    FilteredSpace back = space_from_json_text(space_to_json_text(enl.space));
    CHECK(back.n_atoms() == enl.space.n_atoms());
    for (int k = 0; k < back.n_grid(); ++k)
        CHECK(back.partitions[k] == enl.space.partitions[k]);
}

TEST_CASE("iterated enlargement through the decomposition matches the direct one") {
    FilteredSpace sp = coin_space();
    CHECK(iterated_enlargement_consistent(sp, external_coin(sp)));
    CHECK(iterated_enlargement_consistent(sp, revealing(sp)));
    CHECK(iterated_enlargement_consistent(sp, never(sp)));
}

TEST_CASE("immersion implies pseudo-stopping, never the reverse") {
    // immersed instances are pseudo-stopping across the corpus
    for (uint64_t seed = 900; seed < 930; ++seed) {
        SplitMix rng(seed);
        FilteredSpace sp = random_space(rng);
        RandomTime tau = random_time_on(rng, sp);
        if (immersion_test(tau, sp).immersed) CHECK(pseudo_stopping_test(tau, sp));
    }

    // an exact witness for the strictness: the late split exchanges mass
    // between the two finite values, so m stays at one while the family
    // martingales move after their stopping times
    FilteredSpace sp = build_space(
        {"L1", "L2"}, {rat(1, 2), rat(1, 2)},
        {Rational(0), Rational(1), Rational(2), Rational(3)},
        {{{0, 1}}, {{0, 1}}, {{0, 1}}, {{0}, {1}}});
    RandomTime tau;
    tau.per_leaf = {make_leaf_law({{TimePoint::at(1), rat(1, 2)},
                                   {TimePoint::at(2), rat(1, 4)},
                                   {TimePoint::inf(), rat(1, 4)}}, {}),
                    make_leaf_law({{TimePoint::at(1), rat(1, 4)},
                                   {TimePoint::at(2), rat(1, 2)},
                                   {TimePoint::inf(), rat(1, 4)}}, {})};
    tau.validate(sp);
    CHECK(pseudo_stopping_test(tau, sp));
    ImmersionReport rep = immersion_test(tau, sp);
    CHECK_FALSE(rep.immersed);
    CHECK_FALSE(rep.cond_terminal);
    CHECK(rep.split_consistent);
}

TEST_CASE("randomized drift corpus passes exactly") {
    for (uint64_t seed = 200; seed < 230; ++seed) {
        SuiteReport r = verify_drift_instance(seed);
        for (const auto& c : r.results) {
            INFO(c.tag, " seed=", c.seed, " ", c.detail);
            CHECK(c.pass);
        }
    }
}
