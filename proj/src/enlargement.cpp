#include "enlab/enlargement.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace enlab {

// --- construction of the refined atom set ------------------------------------

namespace {

struct PairLayout {
    std::vector<int> base_atom, piece;
    std::vector<TimePoint> tau_value;
    std::vector<Rational> weight;
    std::vector<std::string> ids;
    std::vector<Rational> ext_grid;
    std::vector<Rational> support;   // sorted finite support of tau
};

PairLayout pair_layout(const FilteredSpace& sp, const RandomTime& tau) {
    if (!tau.is_atomic())
        fail("HasContinuousPart", "exact enlargement requires a purely atomic time");
    tau.validate(sp);

    PairLayout pl;
    std::set<Rational> support;
    for (const auto& law : tau.per_leaf)
        for (const auto& pc : law.pieces)
            if (!pc.t.infinite) support.insert(pc.t.t);
    pl.support.assign(support.begin(), support.end());

    std::set<Rational> grid(sp.grid.begin(), sp.grid.end());
    for (const auto& s : pl.support) grid.insert(s);
    pl.ext_grid.assign(grid.begin(), grid.end());

    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int j = 0; j < (int)law.pieces.size(); ++j) {
            const auto& pc = law.pieces[j];
            pl.base_atom.push_back(a);
            pl.piece.push_back(j);
            pl.tau_value.push_back(pc.t);
            pl.weight.push_back(sp.weights[a] * pc.p);
            pl.ids.push_back(sp.atom_ids[a] + "|tau=" + pc.t.to_string());
        }
    }
    return pl;
}

int support_rank(const PairLayout& pl, const TimePoint& t) {
    if (t.infinite) return -1;
    auto it = std::lower_bound(pl.support.begin(), pl.support.end(), t.t);
    return (int)(it - pl.support.begin());
}

EnlargedSpace assemble(const FilteredSpace& sp, PairLayout pl,
                       const std::function<int(int pair_idx, const Rational& g)>& class_key) {
    EnlargedSpace enl;
    enl.base_atom = pl.base_atom;
    enl.piece = pl.piece;
    enl.tau_value = pl.tau_value;

    FilteredSpace& es = enl.space;
    es.atom_ids = pl.ids;
    es.weights = pl.weight;
    es.grid = pl.ext_grid;
    int n = (int)pl.ids.size();
    for (const auto& g : pl.ext_grid) {
        const Partition& base_part = sp.partition(sp.index_at(TimePoint::at(g)));
        std::map<std::pair<int, int>, int> key_to_cell;
        std::vector<int> cell_of(n);
        for (int e = 0; e < n; ++e) {
            std::pair<int, int> key{base_part.cell_of[pl.base_atom[e]], class_key(e, g)};
            auto [it, fresh] = key_to_cell.try_emplace(key, (int)key_to_cell.size());
            cell_of[e] = it->second;
        }
        es.partitions.push_back(Partition::from_cell_of(std::move(cell_of)));
    }
    es.validate();
    return enl;
}

} // namespace

EnlargedSpace enlarge_progressive(const FilteredSpace& sp, const RandomTime& tau) {
    PairLayout pl = pair_layout(sp, tau);
    auto tau_value = pl.tau_value;            // copied: pl is moved into assemble
    PairLayout keyed = pl;
    return assemble(sp, std::move(pl), [tau_value, keyed](int e, const Rational& g) {
        const TimePoint& t = tau_value[e];
        if (t.infinite || g < t.t) return -1;                 // tau not yet revealed
        return support_rank(keyed, t);                        // exact value of tau ^ g
    });
}

EnlargedSpace enlarge_initial(const FilteredSpace& sp, const RandomTime& tau) {
    PairLayout pl = pair_layout(sp, tau);
    auto tau_value = pl.tau_value;
    PairLayout keyed = pl;
    return assemble(sp, std::move(pl), [tau_value, keyed](int e, const Rational&) {
        return support_rank(keyed, tau_value[e]);             // C_n membership, all of time
    });
}

EnlargedSpace enlarge_initial(const FilteredSpace& sp, const RandomTime& tau,
                              const std::vector<Event>& parts) {
    PairLayout pl = pair_layout(sp, tau);
    // membership table (atom, piece) -> part index; must be a partition
    std::map<std::pair<int, int>, int> owner;
    for (int p = 0; p < (int)parts.size(); ++p)
        for (int a = 0; a < sp.n_atoms(); ++a)
            for (int j : parts[p].part[a].atom_pieces) {
                auto [it, fresh] = owner.try_emplace({a, j}, p);
                if (!fresh) fail("BadPartitionEvents", "piece assigned to two events");
            }
    std::vector<int> member(pl.base_atom.size());
    for (size_t e = 0; e < pl.base_atom.size(); ++e) {
        auto it = owner.find({pl.base_atom[e], pl.piece[e]});
        if (it == owner.end()) fail("BadPartitionEvents", "piece missing from every event");
        member[e] = it->second;
    }
    return assemble(sp, std::move(pl), [member](int e, const Rational&) { return member[e]; });
}

PiecewisePath EnlargedSpace::lift(const PiecewisePath& base_path) const {
    PiecewisePath p;
    p.atom.reserve(base_atom.size());
    for (int a : base_atom) p.atom.push_back(base_path.atom[a]);
    p.adapted = base_path.adapted;
    p.cadlag = base_path.cadlag;
    p.increasing = base_path.increasing;
    p.predictable = base_path.predictable;
    return p;
}

std::vector<Rational> EnlargedSpace::lift_values(const std::vector<Rational>& v) const {
    std::vector<Rational> out;
    out.reserve(base_atom.size());
    for (int a : base_atom) out.push_back(v[a]);
    return out;
}

StoppingTime EnlargedSpace::tau_as_stopping_time() const {
    StoppingTime T;
    T.value = tau_value;
    return T;
}

// --- key lemma -----------------------------------------------------------------

KeyLemmaReport key_lemma_evaluate(const RandomVariable& x, const RandomTime& tau,
                                  const FilteredSpace& sp, const EnlargedSpace& enl,
                                  const Rational& t) {
    if (!tau.is_atomic()) fail("HasContinuousPart", "key lemma needs an atomic time");

    // conditional value of X on each refined atom, through the quantile layout
    int n = (int)enl.base_atom.size();
    std::vector<Rational> xe(n);
    for (int e = 0; e < n; ++e) {
        int a = enl.base_atom[e];
        const LawPiece& pc = tau.per_leaf[sp.leaf_of(a)].pieces[enl.piece[e]];
        xe[e] = x.integral(a, pc.u0, pc.u1) / pc.p;
    }

    ExhaustingSystem sys = exhausting_system(tau, sp);

    KeyLemmaReport rep;
    rep.max_residual = Rational(0);
    auto bump = [&](const Rational& r) {
        rep.max_residual = max(rep.max_residual, r.abs());
        ++rep.checks;
    };

    // numerators E[X 1_{C_n} | F_t] on the base space
    std::vector<std::vector<Rational>> numer(sys.C.size());
    for (size_t k = 0; k < sys.C.size(); ++k) {
        std::vector<Rational> raw(sp.n_atoms(), Rational(0));
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const auto& law = tau.per_leaf[sp.leaf_of(a)];
            for (int j : sys.C[k].part[a].atom_pieces)
                raw[a] += x.integral(a, law.pieces[j].u0, law.pieces[j].u1);
        }
        numer[k] = sp.cell_average(raw, sp.index_at(TimePoint::at(t)));
    }

    std::vector<Rational> lhs = enl.space.cell_average(xe, enl.space.index_at(TimePoint::at(t)));

    for (const auto& s : enl.space.grid) {
        if (t < s) break;    // corollary form: 1_{s >= T_n} with s <= t
        for (int e = 0; e < n; ++e) {
            const TimePoint& tv = enl.tau_value[e];
            if (tv.infinite || s < tv.t) continue;
            int a = enl.base_atom[e];
            // canonical system: T_n is the constant at tau's value
            size_t idx = 0;
            for (size_t k = 1; k < sys.T.size(); ++k)
                if (sys.T[k].value[a] == tv) { idx = k; break; }
            Rational zt = sys.z[idx].eval(a, TimePoint::at(t));
            if (zt.is_zero()) fail("InternalInvariant", "vanishing z on its own support");
            bump(lhs[e] - numer[idx][a] / zt);
        }
    }
    return rep;
}

// --- brackets and integrals ------------------------------------------------------

std::vector<std::vector<Rational>> discrete_bracket(const PiecewisePath& u, const PiecewisePath& v,
                                                    const FilteredSpace& sp) {
    std::vector<std::vector<Rational>> out(sp.n_grid());
    for (int k = 0; k < sp.n_grid(); ++k) {
        TimePoint t = TimePoint::at(sp.grid[k]);
        std::vector<Rational> prod(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a)
            prod[a] = u.jump(a, t) * v.jump(a, t);
        out[k] = sp.cell_average(prod, sp.index_before(t));
    }
    return out;
}

namespace {

// pure-jump path on the enlarged space from per-(pair, base-grid-index) increments
PiecewisePath cumulative_path(const std::vector<std::vector<Rational>>& inc,
                              const FilteredSpace& base, const EnlargedSpace& enl) {
    PiecewisePath p;
    int n = (int)enl.base_atom.size();
    p.atom.resize(n);
    for (int e = 0; e < n; ++e) {
        Rational acc(0);
        size_t k = 0;
        for (const auto& g : enl.space.grid) {
            Rational left = acc;
            if (k < base.grid.size() && base.grid[k] == g) {
                acc += inc[k][e];
                ++k;
            }
            p.atom[e].knots.push_back(PathKnot{g, left, acc, acc, Rational(0)});
        }
        p.atom[e].at_inf = acc;
    }
    p.cadlag = true;
    return p;
}

} // namespace

PiecewisePath integrate_against(const PiecewisePath& g, const PiecewisePath& y_lifted,
                                const EnlargedSpace& enl) {
    int n = (int)enl.base_atom.size();
    std::vector<std::vector<Rational>> inc(enl.space.grid.size(),
                                           std::vector<Rational>(n, Rational(0)));
    // jumps of the lifted integrator can sit at any enlarged grid point
    for (size_t k = 0; k < enl.space.grid.size(); ++k) {
        TimePoint t = TimePoint::at(enl.space.grid[k]);
        for (int e = 0; e < n; ++e)
            inc[k][e] = g.eval(e, t) * y_lifted.jump(e, t);
    }
    PiecewisePath p;
    p.atom.resize(n);
    for (int e = 0; e < n; ++e) {
        Rational acc(0);
        for (size_t k = 0; k < enl.space.grid.size(); ++k) {
            Rational left = acc;
            acc += inc[k][e];
            p.atom[e].knots.push_back(PathKnot{enl.space.grid[k], left, acc, acc, Rational(0)});
        }
        p.atom[e].at_inf = acc;
    }
    p.cadlag = true;
    return p;
}

// --- drift formulas ----------------------------------------------------------------

DriftReport drift_thin(const PiecewisePath& Y, const PiecewisePath& G,
                       const RandomTime& tau, const FilteredSpace& sp,
                       const EnlargedSpace& enl) {
    MartingaleVerdict mv = is_martingale(Y, sp);
    if (!mv.is_martingale)
        fail("NotMartingale", "integrator defect " + mv.max_residual.to_string());
    if (!tau.is_atomic()) fail("HasContinuousPart", "thin drift needs an atomic time");
    if (!check_predictable(G, enl.space))
        fail("NotPredictable", "integrand is not predictable for the progressive chain");

    TimeProcessBundle b = associated_processes(tau, sp);
    ExhaustingSystem sys = exhausting_system(tau, sp);

    auto bm = discrete_bracket(Y, b.m, sp);
    std::vector<std::vector<std::vector<Rational>>> bz(sys.z.size());
    for (size_t k = 1; k < sys.z.size(); ++k) bz[k] = discrete_bracket(Y, sys.z[k], sp);

    int n = (int)enl.base_atom.size();
    std::vector<std::vector<Rational>> inc(sp.n_grid(), std::vector<Rational>(n, Rational(0)));
    for (int k = 0; k < sp.n_grid(); ++k) {
        TimePoint s = TimePoint::at(sp.grid[k]);
        for (int e = 0; e < n; ++e) {
            int a = enl.base_atom[e];
            Rational gs = G.eval(e, s);
            if (s <= enl.tau_value[e]) {
                Rational zl = b.Z.left_limit(a, s);
                if (zl.signum() > 0) inc[k][e] += gs * bm[k][a] / zl;
            }
            if (!enl.tau_value[e].infinite) {
                size_t idx = 0;
                for (size_t q = 1; q < sys.T.size(); ++q)
                    if (sys.T[q].value[a] == enl.tau_value[e]) { idx = q; break; }
                if (idx >= 1 && sys.T[idx].value[a] < s) {
                    Rational zl = sys.z[idx].left_limit(a, s);
                    if (zl.signum() > 0) inc[k][e] += gs * bz[idx][k][a] / zl;
                }
            }
        }
    }

    DriftReport rep;
    rep.drift = cumulative_path(inc, sp, enl);
    rep.drift.adapted = true;
    rep.drift.predictable = check_predictable(rep.drift, enl.space);
    rep.compensated = path_sub(integrate_against(G, enl.lift(Y), enl), rep.drift);
    MartingaleVerdict v = is_martingale(rep.compensated, enl.space);
    rep.martingale = v.is_martingale;
    rep.max_residual = v.max_residual;
    return rep;
}

DriftReport drift_jacod(const PiecewisePath& X, const RandomTime& tau,
                        const FilteredSpace& sp, const EnlargedSpace& enl_initial) {
    MartingaleVerdict mv = is_martingale(X, sp);
    if (!mv.is_martingale)
        fail("NotMartingale", "integrator defect " + mv.max_residual.to_string());

    ExhaustingSystem sys = exhausting_system(tau, sp);
    std::vector<std::vector<std::vector<Rational>>> bz(sys.z.size());
    for (size_t k = 0; k < sys.z.size(); ++k) bz[k] = discrete_bracket(X, sys.z[k], sp);

    int n = (int)enl_initial.base_atom.size();
    std::vector<std::vector<Rational>> inc(sp.n_grid(), std::vector<Rational>(n, Rational(0)));
    for (int k = 0; k < sp.n_grid(); ++k) {
        TimePoint s = TimePoint::at(sp.grid[k]);
        for (int e = 0; e < n; ++e) {
            int a = enl_initial.base_atom[e];
            size_t idx = 0;
            if (!enl_initial.tau_value[e].infinite)
                for (size_t q = 1; q < sys.T.size(); ++q)
                    if (sys.T[q].value[a] == enl_initial.tau_value[e]) { idx = q; break; }
            Rational zl = sys.z[idx].left_limit(a, s);
            if (zl.signum() > 0) inc[k][e] += bz[idx][k][a] / zl;
        }
    }

    DriftReport rep;
    rep.drift = cumulative_path(inc, sp, enl_initial);
    rep.drift.adapted = true;
    rep.drift.predictable = check_predictable(rep.drift, enl_initial.space);
    rep.compensated = path_sub(enl_initial.lift(X), rep.drift);
    MartingaleVerdict v = is_martingale(rep.compensated, enl_initial.space);
    rep.martingale = v.is_martingale;
    rep.max_residual = v.max_residual;
    return rep;
}

HonestDriftReport drift_honest(const PiecewisePath& M, const RandomTime& tau,
                               const FilteredSpace& sp, const EnlargedSpace& enl) {
    MartingaleVerdict mv = is_martingale(M, sp);
    if (!mv.is_martingale)
        fail("NotMartingale", "integrator defect " + mv.max_residual.to_string());
    HonestCertificate cert = is_honest(tau, sp);
    if (!cert.honest) fail("NotHonest", "violation mass " + cert.violation_mass.to_string());
    if (!tau.is_atomic()) fail("HasContinuousPart", "honest drift needs an atomic time");

    TimeProcessBundle b = associated_processes(tau, sp);
    auto bm = discrete_bracket(M, b.m, sp);

    int n = (int)enl.base_atom.size();
    std::vector<std::vector<Rational>> inc(sp.n_grid(), std::vector<Rational>(n, Rational(0)));
    for (int k = 0; k < sp.n_grid(); ++k) {
        TimePoint s = TimePoint::at(sp.grid[k]);
        for (int e = 0; e < n; ++e) {
            int a = enl.base_atom[e];
            if (s <= enl.tau_value[e]) {
                Rational zl = b.Z.left_limit(a, s);
                if (zl.signum() > 0) inc[k][e] += bm[k][a] / zl;
            } else {
                Rational ql = Rational(1) - b.Z.left_limit(a, s);
                if (ql.signum() > 0) inc[k][e] -= bm[k][a] / ql;
            }
        }
    }

    HonestDriftReport rep;
    rep.drift = cumulative_path(inc, sp, enl);
    rep.drift.adapted = true;
    rep.drift.predictable = check_predictable(rep.drift, enl.space);
    rep.compensated = path_sub(enl.lift(M), rep.drift);
    MartingaleVerdict v = is_martingale(rep.compensated, enl.space);
    rep.martingale = v.is_martingale;
    rep.max_residual = v.max_residual;

    DriftReport thin = drift_thin(M, path_constant(n, Rational(1)), tau, sp, enl);
    rep.coincides_with_thin = path_equal(rep.drift, thin.drift);
    return rep;
}

std::string drift_report_to_json_text(const DriftReport& rep, const EnlargedSpace& enl) {
    std::string out = "{\"drift\":";
    out += path_to_json_text(rep.drift, enl.space);
    out += ",\"residual\":\"" + rep.max_residual.to_string() + "\"";
    out += ",\"verdict\":\"" + std::string(rep.martingale ? "martingale" : "not-martingale") + "\"}";
    return out;
}

// --- immersion ------------------------------------------------------------------

namespace {

PiecewisePath terminal_survival_path(const RandomTime& tau, const FilteredSpace& sp) {
    std::set<Rational> tset(sp.grid.begin(), sp.grid.end());
    tset.insert(Rational(0));
    for (const auto& bp : tau.breakpoints()) tset.insert(bp);

    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& t : tset) {
            Rational v = law.surv_gt(t);
            Rational l = Rational(1) - law.surv_lt(t);
            p.atom[a].knots.push_back(PathKnot{t, l, v, v, -law.density_level_at(t)});
        }
        p.atom[a].at_inf = law.mass_at_inf();
    }
    p.cadlag = true;
    return p;
}

} // namespace

ImmersionReport immersion_test(const RandomTime& tau, const FilteredSpace& sp) {
    ImmersionReport rep;
    TimeProcessBundle b = associated_processes(tau, sp);
    rep.immersed = path_equal(b.Z, terminal_survival_path(tau, sp));

    Decomposition dec = thin_thick_decompose(tau, sp);
    rep.immersed_thin_part =
        path_equal(associated_processes(dec.thin, sp).Z, terminal_survival_path(dec.thin, sp));
    rep.immersed_thick_part =
        path_equal(associated_processes(dec.thick, sp).Z, terminal_survival_path(dec.thick, sp));
    rep.split_consistent = rep.immersed == (rep.immersed_thin_part && rep.immersed_thick_part);

    if (!tau.is_atomic()) return rep;
    rep.has_thin_conditions = true;
    rep.cond_terminal = rep.cond_stopped = rep.cond_factorization = true;

    ExhaustingSystem sys = exhausting_system(tau, sp);
    for (size_t k = 1; k < sys.T.size(); ++k) {
        const StoppingTime& T = sys.T[k];
        const PiecewisePath& z = sys.z[k];
        for (int a = 0; a < sp.n_atoms(); ++a) {
            if (!(z.atom[a].at_inf == z.eval(a, T.value[a]))) rep.cond_terminal = false;
            for (const auto& kn : z.atom[a].knots) {
                TimePoint t = TimePoint::at(kn.t);
                TimePoint capped = t <= T.value[a] ? t : T.value[a];
                if (!(kn.value == z.eval(a, capped))) rep.cond_stopped = false;
            }
        }
        // conditional independence of C_n and F_infinity given F_{T_n}
        Partition sig = sigma_field_at(T, sp);
        auto cm = event_cond_mass(sys.C[k], tau, sp);
        const Partition& leaves = sp.partitions.back();
        for (const auto& cell : sig.cells) {
            Rational pD(0), pCnD(0);
            for (int a : cell) { pD += sp.weights[a]; pCnD += sp.weights[a] * cm[a]; }
            for (const auto& leaf : leaves.cells) {
                if (sig.cell_of[leaf.front()] != sig.cell_of[cell.front()]) continue;
                Rational pLD(0), pCnLD(0);
                for (int a : leaf) { pLD += sp.weights[a]; pCnLD += sp.weights[a] * cm[a]; }
                if (!(pCnLD * pD == pCnD * pLD)) rep.cond_factorization = false;
            }
        }
    }
    return rep;
}

// --- after-tau equivalence of the two chains --------------------------------------

AfterTimeTransferReport after_time_transfer_check(const PiecewisePath& y,
                                                  const EnlargedSpace& enl_prog,
                                                  const EnlargedSpace& enl_init,
                                                  const std::vector<StoppingTime>& thetas) {
    int n = (int)enl_prog.base_atom.size();
    for (int e = 0; e < n; ++e)
        for (const auto& kn : y.atom[e].knots) {
            if (!(TimePoint::at(kn.t) <= enl_prog.tau_value[e])) continue;
            if (!kn.value.is_zero() || !kn.left.is_zero())
                fail("DoesNotVanishBeforeTau", "path charged on [0, tau]");
        }

    AfterTimeTransferReport rep;
    rep.martingale_initial = is_martingale(y, enl_init.space).is_martingale;
    rep.martingale_progressive = is_martingale(y, enl_prog.space).is_martingale;
    rep.verdicts_agree = rep.martingale_initial == rep.martingale_progressive;

    for (const auto& theta : thetas) {
        if (!is_stopping_time(theta, enl_init.space).stopping)
            fail("NotStoppingTime", "supplied theta is not an initial-chain stopping time");
        StoppingTime join;
        join.value.resize(n);
        for (int e = 0; e < n; ++e)
            join.value[e] = theta.value[e] >= enl_prog.tau_value[e] ? theta.value[e]
                                                                    : enl_prog.tau_value[e];
        if (!is_stopping_time(join, enl_prog.space).stopping) rep.stopping_closure = false;
    }
    return rep;
}

bool iterated_enlargement_consistent(const FilteredSpace& sp, const RandomTime& tau) {
    EnlargedSpace direct = enlarge_progressive(sp, tau);
    Decomposition dec = thin_thick_decompose(sp.n_atoms() ? tau : tau, sp);

    EnlargedSpace first = enlarge_progressive(sp, dec.thin);
    // lift the thick part onto the once-enlarged space; for an atomic time it
    // is identically infinite
    RandomTime thick_lifted;
    const Partition& leaves1 = first.space.partitions.back();
    thick_lifted.per_leaf.resize(leaves1.n_cells());
    for (int c = 0; c < leaves1.n_cells(); ++c)
        thick_lifted.per_leaf[c] = make_leaf_law({{TimePoint::inf(), Rational(1)}}, {});
    EnlargedSpace second = enlarge_progressive(first.space, thick_lifted);

    if ((int)second.base_atom.size() != (int)direct.base_atom.size()) return false;
    // match refined atoms through (base atom, piece)
    std::map<std::pair<int, int>, int> direct_index;
    for (size_t e = 0; e < direct.base_atom.size(); ++e)
        direct_index[{direct.base_atom[e], direct.piece[e]}] = (int)e;
    std::vector<int> to_direct(second.base_atom.size());
    for (size_t e = 0; e < second.base_atom.size(); ++e) {
        int mid = second.base_atom[e];   // atom of `first`
        auto it = direct_index.find({first.base_atom[mid], first.piece[mid]});
        if (it == direct_index.end()) return false;
        to_direct[e] = it->second;
    }

    std::set<Rational> g1(direct.space.grid.begin(), direct.space.grid.end());
    std::set<Rational> g2(second.space.grid.begin(), second.space.grid.end());
    if (g1 != g2) return false;

    for (int k = 0; k < direct.space.n_grid(); ++k) {
        std::vector<int> mapped(second.base_atom.size());
        for (size_t e = 0; e < second.base_atom.size(); ++e)
            mapped[to_direct[e]] = second.space.partitions[k].cell_of[e];
        if (!(Partition::from_cell_of(std::move(mapped)) == direct.space.partitions[k]))
            return false;
    }
    return true;
}

Rational restriction_consistency_defect(const PiecewisePath& X, const RandomTime& tau,
                                        const FilteredSpace& sp) {
    EnlargedSpace prog = enlarge_progressive(sp, tau);
    EnlargedSpace init = enlarge_initial(sp, tau);

    DriftReport jac = drift_jacod(X, tau, sp, init);
    DriftReport thin = drift_thin(X, path_constant((int)prog.base_atom.size(), Rational(1)),
                                  tau, sp, prog);

    PiecewisePath reprojected = project(jac.compensated, ProjectionKind::optional_kind, prog.space);
    PiecewisePath diff = path_sub(reprojected, thin.compensated);
    return is_martingale(diff, prog.space).max_residual;
}

} // namespace enlab
