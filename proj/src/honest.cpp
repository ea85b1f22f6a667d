#include "enlab/honest.hpp"

#include <algorithm>
#include <set>

namespace enlab {

// --- alpha -------------------------------------------------------------------

std::optional<Rational> AlphaSelection::at(int atom, const Rational& t) const {
    std::optional<Rational> out;
    for (size_t i = 0; i < times.size() && times[i] <= t; ++i)
        if (level[i][atom]) out = level[i][atom];
    return out;
}

std::optional<Rational> AlphaSelection::left_at(int atom, const Rational& t) const {
    std::optional<Rational> out;
    for (size_t i = 0; i < times.size() && times[i] < t; ++i)
        if (level[i][atom]) out = level[i][atom];
    return out;
}

std::optional<Rational> AlphaSelection::final_level(int atom) const {
    std::optional<Rational> out;
    for (size_t i = 0; i < times.size(); ++i)
        if (level[i][atom]) out = level[i][atom];
    return out;
}

AlphaSelection alpha_selection(const RandomTime& tau, const FilteredSpace& sp) {
    std::set<Rational> tset(sp.grid.begin(), sp.grid.end());
    for (const auto& bp : tau.breakpoints()) tset.insert(bp);

    AlphaSelection sel;
    sel.times.assign(tset.begin(), tset.end());
    sel.level.assign(sel.times.size(), std::vector<std::optional<Rational>>(sp.n_atoms()));

    std::vector<std::optional<Rational>> running(sp.n_atoms());
    for (size_t i = 0; i < sel.times.size(); ++i) {
        const Rational& t = sel.times[i];
        const Partition& part = sp.partition(sp.index_at(TimePoint::at(t)));
        for (const auto& cell : part.cells) {
            // largest support value revealed in this cell by time t
            std::optional<Rational> vis;
            for (int a : cell) {
                const auto& law = tau.per_leaf[sp.leaf_of(a)];
                for (const auto& pc : law.pieces)
                    if (pc.is_atom && !pc.t.infinite && pc.t.t <= t && pc.p.signum() > 0)
                        if (!vis || *vis < pc.t.t) vis = pc.t.t;
            }
            for (int a : cell) {
                if (vis && (!running[a] || *running[a] < *vis)) running[a] = vis;
                sel.level[i][a] = running[a];
            }
        }
    }
    return sel;
}

static PiecewisePath alpha_path(const AlphaSelection& sel, const FilteredSpace& sp) {
    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        std::optional<Rational> prev;
        for (size_t i = 0; i < sel.times.size(); ++i) {
            Rational l = prev ? *prev : Rational(0);
            Rational v = sel.level[i][a] ? *sel.level[i][a] : Rational(0);
            p.atom[a].knots.push_back(PathKnot{sel.times[i], l, v, v, Rational(0)});
            prev = sel.level[i][a] ? sel.level[i][a] : prev;
        }
        p.atom[a].at_inf = prev ? *prev : Rational(0);
    }
    p.cadlag = true;
    p.increasing = check_increasing(p);
    return p;
}

// --- detection ---------------------------------------------------------------

HonestCertificate is_honest(const RandomTime& tau, const FilteredSpace& sp) {
    TimeProcessBundle b = associated_processes(tau, sp);

    HonestCertificate cert;
    cert.violation_mass = Rational(0);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& pc : law.pieces) {
            if (pc.is_atom) {
                if (pc.t.infinite) continue;
                if (b.Ztilde.eval(a, pc.t) < Rational(1))
                    cert.violation_mass += sp.weights[a] * pc.p;
            } else {
                // measure of {s in (a,b): Ztilde_s < 1} under level * Lebesgue;
                // Ztilde is affine between consecutive knots
                const AtomPath& zt = b.Ztilde.atom[a];
                for (size_t i = 0; i < zt.knots.size(); ++i) {
                    Rational lo = max(pc.a, zt.knots[i].t);
                    Rational hi = i + 1 < zt.knots.size() ? min(pc.b, zt.knots[i + 1].t) : pc.b;
                    if (!(lo < hi)) continue;
                    const PathKnot& k = zt.knots[i];
                    if (k.slope.is_zero()) {
                        if (k.start < Rational(1))
                            cert.violation_mass += sp.weights[a] * pc.level * (hi - lo);
                        continue;
                    }
                    // affine piece f(s) = start + slope (s - knot.t); f < 1 on a sub-interval
                    Rational s_star = k.t + (Rational(1) - k.start) / k.slope;
                    Rational from = lo, to = hi;
                    if (k.slope.signum() > 0) to = min(hi, max(lo, s_star));
                    else from = max(lo, min(hi, s_star));
                    if (from < to)
                        cert.violation_mass += sp.weights[a] * pc.level * (to - from);
                }
            }
        }
    }
    cert.honest = cert.violation_mass.is_zero();
    if (cert.honest) cert.alpha = alpha_path(alpha_selection(tau, sp), sp);
    return cert;
}

HonestPartsReport honest_thick_criterion(const RandomTime& tau, const FilteredSpace& sp) {
    HonestCertificate cert = is_honest(tau, sp);
    if (!cert.honest) fail("NotHonest", "violation mass " + cert.violation_mass.to_string());

    Decomposition dec = thin_thick_decompose(tau, sp);
    TimeProcessBundle b = associated_processes(tau, sp);

    HonestPartsReport rep;
    rep.thick_mass = classify(tau, sp).thick_mass;
    rep.thin_part_strict = true;
    rep.thick_part_unit = true;
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& pc : law.pieces) {
            if (pc.is_atom) {
                if (pc.t.infinite) continue;
                if (!(b.Z.eval(a, pc.t) < Rational(1))) rep.thin_part_strict = false;
            } else {
                // Z must sit at 1 throughout the thick support (a.e.)
                const AtomPath& z = b.Z.atom[a];
                for (size_t i = 0; i < z.knots.size(); ++i) {
                    Rational lo = max(pc.a, z.knots[i].t);
                    Rational hi = i + 1 < z.knots.size() ? min(pc.b, z.knots[i + 1].t) : pc.b;
                    if (!(lo < hi)) continue;
                    if (!z.knots[i].slope.is_zero() || !(z.knots[i].start == Rational(1)))
                        rep.thick_part_unit = false;
                }
            }
        }
    }
    rep.parts_honest = is_honest(dec.thin, sp).honest && is_honest(dec.thick, sp).honest;
    return rep;
}

// --- thin-honest identities ----------------------------------------------------

ThinHonestReport thin_honest_identities(const RandomTime& tau, const FilteredSpace& sp) {
    HonestCertificate cert = is_honest(tau, sp);
    if (!cert.honest) fail("NotHonest", "violation mass " + cert.violation_mass.to_string());
    Classification cls = classify(tau, sp);
    if (cls.thick_mass.signum() > 0) fail("NotThin", "honest time with thick mass");

    TimeProcessBundle b = associated_processes(tau, sp);
    ExhaustingSystem sys = exhausting_system(tau, sp);
    AlphaSelection sel = alpha_selection(tau, sp);

    ThinHonestReport rep;
    rep.max_residual = Rational(0);
    auto bump = [&](const Rational& r) {
        rep.max_residual = max(rep.max_residual, r.abs());
        ++rep.checks;
    };

    for (const auto& t : sel.times) {
        TimePoint tp = TimePoint::at(t);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            auto picked = sel.at(a, t);
            for (size_t n = 1; n < sys.T.size(); ++n) {
                const TimePoint& Tn = sys.T[n].value[a];
                if (Tn.infinite) continue;
                bool on = picked && *picked == Tn.t;
                Rational zt = sys.z[n].eval(a, tp);
                if (on) {
                    bump(zt - (Rational(1) - b.Z.eval(a, tp)));
                    // the compensator is flat on (T_n, t] once the selection
                    // sits at T_n, so only the jump at T_n remains past the
                    // mass accumulated strictly before it
                    Rational ao_before = b.Ao.left_limit(a, Tn);
                    bump((b.Ao.eval(a, tp) - ao_before) - sys.z[n].eval(a, Tn));
                    bump((Rational(1) - b.m.eval(a, tp)) -
                         (zt - sys.z[n].eval(a, Tn) - ao_before));
                }
                if (Tn.t < t) {
                    Rational ind = on ? Rational(1) : Rational(0);
                    bump(zt - ind * (Rational(1) - b.Ztilde.eval(a, tp)));
                    // the left-limit form pairs with the left-continuous
                    // selection, the F_{t-}-measurable choice of tau_t
                    auto picked_left = sel.left_at(a, t);
                    Rational ind_left = picked_left && *picked_left == Tn.t ? Rational(1) : Rational(0);
                    bump(sys.z[n].left_limit(a, tp) -
                         ind_left * (Rational(1) - b.Z.left_limit(a, tp)));
                }
            }
        }
    }
    return rep;
}

// --- jumping-filtration exhausting sequence -------------------------------------

ExhaustingSystem jumping_exhaust(const RandomTime& tau, const FilteredSpace& sp) {
    HonestCertificate cert = is_honest(tau, sp);
    if (!cert.honest) fail("NotHonest", "violation mass " + cert.violation_mass.to_string());
    Classification cls = classify(tau, sp);
    if (cls.thick_mass.signum() > 0)
        fail("ThickHonestOnJumpingFiltration",
             "honest time with thick mass on a piecewise-constant filtration; the model is inconsistent");

    AlphaSelection sel = alpha_selection(tau, sp);

    // jumping sequence = grid points, with one final interval [t_last, inf)
    ExhaustingSystem sys;
    sys.time = tau;
    StoppingTime t0;
    t0.value.assign(sp.n_atoms(), TimePoint::inf());
    sys.T.push_back(t0);
    sys.C.push_back(event_tau_inf(tau, sp));

    auto interval_event = [&](const Rational& lo, const TimePoint& hi) {
        Event e = event_none(sp);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const auto& law = tau.per_leaf[sp.leaf_of(a)];
            for (int i = 0; i < (int)law.pieces.size(); ++i) {
                const auto& pc = law.pieces[i];
                if (!pc.is_atom || pc.t.infinite) continue;
                if (lo <= pc.t.t && TimePoint::at(pc.t.t) < hi) e.part[a].atom_pieces.push_back(i);
            }
        }
        return e;
    };

    int L = sp.n_grid();
    for (int n = 1; n <= L; ++n) {
        Rational lo = sp.grid[n - 1];
        TimePoint hi = n < L ? TimePoint::at(sp.grid[n]) : TimePoint::inf();
        Event C = interval_event(lo, hi);
        if (event_mass(C, tau, sp).is_zero()) continue;

        StoppingTime T;
        T.value.resize(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a) {
            // alpha just before the right end of the interval is known at its
            // left end; the time it names is only charged when it falls inside
            std::optional<Rational> v =
                hi.infinite ? sel.final_level(a) : sel.left_at(a, hi.t);
            if (v && lo <= *v && TimePoint::at(*v) < hi) T.value[a] = TimePoint::at(*v);
            else T.value[a] = TimePoint::inf();
        }
        if (!is_stopping_time(T, sp).stopping)
            fail("InternalInvariant", "jumping-sequence time is not a stopping time");
        sys.T.push_back(std::move(T));
        sys.C.push_back(std::move(C));
    }

    auto times = [&] {
        std::set<Rational> s(sp.grid.begin(), sp.grid.end());
        for (const auto& bp : tau.breakpoints()) s.insert(bp);
        return std::vector<Rational>(s.begin(), s.end());
    }();
    for (size_t n = 0; n < sys.C.size(); ++n)
        sys.z.push_back(martingale_from_terminal(event_cond_mass(sys.C[n], tau, sp), sp, times));

    if (!exhausting_defect(sys, sp).is_zero())
        fail("InternalInvariant", "jumping-sequence system failed validation");
    // reconcile against the canonical constants: the merge must again exhaust
    ExhaustingSystem merged = merge_exhausting(sys, exhausting_system(tau, sp), sp);
    if (!exhausting_defect(merged, sp).is_zero())
        fail("InternalInvariant", "jumping-sequence system disagrees with the canonical one");
    return sys;
}

} // namespace enlab
