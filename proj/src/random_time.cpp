#include "enlab/random_time.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

namespace enlab {

// --- LeafLaw -----------------------------------------------------------------

Rational LeafLaw::surv_gt(const Rational& t) const {
    Rational s(0);
    for (const auto& pc : pieces) {
        if (pc.is_atom) {
            if (pc.t.infinite || pc.t.t > t) s += pc.p;
        } else if (pc.b > t) {
            s += pc.level * (pc.b - max(pc.a, t));
        }
    }
    return s;
}

Rational LeafLaw::surv_lt(const Rational& t) const {
    Rational s(0);
    for (const auto& pc : pieces) {
        if (pc.is_atom) {
            if (!pc.t.infinite && pc.t.t < t) s += pc.p;
        } else if (pc.a < t) {
            s += pc.level * (min(pc.b, t) - pc.a);
        }
    }
    return s;
}

Rational LeafLaw::atom_mass_at(const Rational& t) const {
    for (const auto& pc : pieces)
        if (pc.is_atom && !pc.t.infinite && pc.t.t == t) return pc.p;
    return Rational(0);
}

Rational LeafLaw::density_level_at(const Rational& t) const {
    for (const auto& pc : pieces)
        if (!pc.is_atom && pc.a <= t && t < pc.b) return pc.level;
    return Rational(0);
}

Rational LeafLaw::mass_at_inf() const {
    Rational s(0);
    for (const auto& pc : pieces)
        if (pc.is_atom && pc.t.infinite) s += pc.p;
    return s;
}

Rational LeafLaw::total_mass() const {
    Rational s(0);
    for (const auto& pc : pieces) s += pc.mass();
    return s;
}

LeafLaw make_leaf_law(std::vector<std::pair<TimePoint, Rational>> atoms,
                      std::vector<std::array<Rational, 3>> density) {
    // merge duplicate atom times, drop zero masses
    std::map<TimePoint, Rational> atom_map;
    for (auto& [t, p] : atoms) {
        if (p.signum() < 0) fail("BadRandomTime", "negative atom mass");
        if (p.is_zero()) continue;
        auto [it, fresh] = atom_map.try_emplace(t, Rational(0));
        it->second += p;
    }
    std::vector<std::array<Rational, 3>> segs;
    for (auto& d : density) {
        if (d[2].signum() < 0) fail("BadRandomTime", "negative density level");
        if (!(d[0] < d[1])) fail("BadRandomTime", "density segment with empty interior");
        if (d[0].signum() < 0) fail("BadRandomTime", "density before time 0");
        if (d[2].is_zero()) continue;
        segs.push_back(d);
    }
    std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x[0] < y[0]; });
    for (size_t i = 1; i < segs.size(); ++i)
        if (segs[i][0] < segs[i - 1][1]) fail("BadRandomTime", "overlapping density segments");

    // split segments at interior atom times so the canonical layout is ordered
    std::vector<std::array<Rational, 3>> split;
    for (const auto& s : segs) {
        Rational a = s[0];
        for (const auto& [t, p] : atom_map) {
            if (t.infinite) break;
            if (a < t.t && t.t < s[1]) {
                split.push_back({a, t.t, s[2]});
                a = t.t;
            }
        }
        split.push_back({a, s[1], s[2]});
    }

    // interleave in time order: atoms sort before a segment starting there
    std::vector<LawPiece> out;
    size_t ai = 0, si = 0;
    std::vector<std::pair<TimePoint, Rational>> atom_list(atom_map.begin(), atom_map.end());
    while (ai < atom_list.size() || si < split.size()) {
        bool take_atom;
        if (ai == atom_list.size()) take_atom = false;
        else if (si == split.size()) take_atom = true;
        else if (atom_list[ai].first.infinite) take_atom = false;
        else take_atom = atom_list[ai].first.t <= split[si][0];
        LawPiece pc;
        if (take_atom) {
            pc.is_atom = true;
            pc.t = atom_list[ai].first;
            pc.p = atom_list[ai].second;
            ++ai;
        } else {
            pc.is_atom = false;
            pc.a = split[si][0];
            pc.b = split[si][1];
            pc.level = split[si][2];
            ++si;
        }
        out.push_back(std::move(pc));
    }

    LeafLaw law;
    law.pieces = std::move(out);
    Rational u(0);
    for (auto& pc : law.pieces) {
        pc.u0 = u;
        u += pc.mass();
        pc.u1 = u;
    }
    if (!(u == Rational(1)))
        fail("BadRandomTime", "leaf law has total mass " + u.to_string());
    return law;
}

// --- RandomTime --------------------------------------------------------------

bool RandomTime::is_atomic() const {
    for (const auto& law : per_leaf)
        for (const auto& pc : law.pieces)
            if (!pc.is_atom) return false;
    return true;
}

void RandomTime::validate(const FilteredSpace& sp) const {
    if ((int)per_leaf.size() != sp.partitions.back().n_cells())
        fail("BadRandomTime", "one leaf law required per F_infinity cell");
    for (const auto& law : per_leaf)
        if (!(law.total_mass() == Rational(1)))
            fail("BadRandomTime", "leaf law mass " + law.total_mass().to_string());
}

std::vector<Rational> RandomTime::breakpoints() const {
    std::set<Rational> s;
    for (const auto& law : per_leaf)
        for (const auto& pc : law.pieces) {
            if (pc.is_atom) {
                if (!pc.t.infinite) s.insert(pc.t.t);
            } else {
                s.insert(pc.a);
                s.insert(pc.b);
            }
        }
    return {s.begin(), s.end()};
}

bool RandomTime::operator==(const RandomTime& o) const {
    if (per_leaf.size() != o.per_leaf.size()) return false;
    for (size_t l = 0; l < per_leaf.size(); ++l) {
        const auto& x = per_leaf[l].pieces;
        const auto& y = o.per_leaf[l].pieces;
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i) {
            if (x[i].is_atom != y[i].is_atom) return false;
            if (x[i].is_atom) {
                if (!(x[i].t == y[i].t && x[i].p == y[i].p)) return false;
            } else if (!(x[i].a == y[i].a && x[i].b == y[i].b && x[i].level == y[i].level)) {
                return false;
            }
        }
    }
    return true;
}

// --- Events ------------------------------------------------------------------

Event event_none(const FilteredSpace& sp) {
    Event e;
    e.part.resize(sp.n_atoms());
    return e;
}

Event event_tau_eq(const RandomTime& tau, const FilteredSpace& sp, const StoppingTime& T) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        if (T.value[a].infinite) continue;
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i)
            if (law.pieces[i].is_atom && law.pieces[i].t == T.value[a])
                e.part[a].atom_pieces.push_back(i);
    }
    return e;
}

Event event_tau_inf(const RandomTime& tau, const FilteredSpace& sp) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i)
            if (law.pieces[i].is_atom && law.pieces[i].t.infinite)
                e.part[a].atom_pieces.push_back(i);
    }
    return e;
}

Event event_tau_gt(const RandomTime& tau, const FilteredSpace& sp, const Rational& t) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) {
                if (pc.t.infinite || pc.t.t > t) e.part[a].atom_pieces.push_back(i);
            } else if (pc.b > t) {
                e.part[a].density.emplace_back(max(pc.a, t), pc.b);
            }
        }
    }
    return e;
}

Event event_tau_in(const RandomTime& tau, const FilteredSpace& sp,
                   const Rational& x, const Rational& y) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) {
                if (!pc.t.infinite && x < pc.t.t && pc.t.t <= y) e.part[a].atom_pieces.push_back(i);
            } else {
                Rational lo = max(pc.a, x), hi = min(pc.b, y);
                if (lo < hi) e.part[a].density.emplace_back(lo, hi);
            }
        }
    }
    return e;
}

Event event_intersect(const Event& e1, const Event& e2, const RandomTime&) {
    Event e;
    e.part.resize(e1.part.size());
    for (size_t a = 0; a < e1.part.size(); ++a) {
        std::set<int> s2(e2.part[a].atom_pieces.begin(), e2.part[a].atom_pieces.end());
        for (int i : e1.part[a].atom_pieces)
            if (s2.count(i)) e.part[a].atom_pieces.push_back(i);
        for (const auto& [x1, y1] : e1.part[a].density)
            for (const auto& [x2, y2] : e2.part[a].density) {
                Rational lo = max(x1, x2), hi = min(y1, y2);
                if (lo < hi) e.part[a].density.emplace_back(lo, hi);
            }
    }
    return e;
}

std::vector<Rational> event_cond_mass(const Event& e, const RandomTime& tau, const FilteredSpace& sp) {
    std::vector<Rational> out(sp.n_atoms(), Rational(0));
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        Rational s(0);
        for (int i : e.part[a].atom_pieces) s += law.pieces[i].p;
        for (const auto& [x, y] : e.part[a].density)
            for (const auto& pc : law.pieces) {
                if (pc.is_atom) continue;
                Rational lo = max(pc.a, x), hi = min(pc.b, y);
                if (lo < hi) s += pc.level * (hi - lo);
            }
        out[a] = s;
    }
    return out;
}

Rational event_mass(const Event& e, const RandomTime& tau, const FilteredSpace& sp) {
    auto cm = event_cond_mass(e, tau, sp);
    Rational s(0);
    for (int a = 0; a < sp.n_atoms(); ++a) s += sp.weights[a] * cm[a];
    return s;
}

// --- Associated processes ----------------------------------------------------

static std::vector<Rational> all_times(const RandomTime& tau, const FilteredSpace& sp) {
    std::set<Rational> s(sp.grid.begin(), sp.grid.end());
    s.insert(Rational(0));
    for (const auto& t : tau.breakpoints()) s.insert(t);
    return {s.begin(), s.end()};
}

PiecewisePath raw_indicator_path(const RandomTime& tau, const FilteredSpace& sp) {
    auto times = all_times(tau, sp);
    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& t : times) {
            Rational v = Rational(1) - law.surv_gt(t);
            Rational l = law.surv_lt(t);
            p.atom[a].knots.push_back(PathKnot{t, l, v, v, law.density_level_at(t)});
        }
        p.atom[a].at_inf = Rational(1) - law.mass_at_inf();
    }
    p.cadlag = true;
    p.increasing = true;
    return p;
}

// left-continuous companion t -> P(tau < t | leaf), aggregated over u
static PiecewisePath raw_strict_indicator_path(const RandomTime& tau, const FilteredSpace& sp) {
    auto times = all_times(tau, sp);
    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& t : times) {
            Rational lt = law.surv_lt(t);
            Rational le = Rational(1) - law.surv_gt(t);
            p.atom[a].knots.push_back(PathKnot{t, lt, lt, le, law.density_level_at(t)});
        }
        p.atom[a].at_inf = Rational(1) - law.mass_at_inf();
    }
    p.cadlag = false;
    return p;
}

TimeProcessBundle associated_processes(const RandomTime& tau, const FilteredSpace& sp) {
    tau.validate(sp);
    TimeProcessBundle b;
    PiecewisePath raw = raw_indicator_path(tau, sp);
    PiecewisePath raw_strict = raw_strict_indicator_path(tau, sp);
    PiecewisePath one = path_constant(sp.n_atoms(), Rational(1));

    b.Z = path_sub(one, project(raw, ProjectionKind::optional_kind, sp));
    b.Ztilde = path_sub(one, project(raw_strict, ProjectionKind::optional_kind, sp));
    b.Ao = dual_project(raw, ProjectionKind::optional_kind, sp);
    b.Ap = dual_project(raw, ProjectionKind::predictable_kind, sp);
    b.m = path_add(b.Z, b.Ao);

    b.Z.adapted = b.Ztilde.adapted = b.Ao.adapted = b.Ap.adapted = b.m.adapted = true;
    b.Z.cadlag = b.Ao.cadlag = b.Ap.cadlag = b.m.cadlag = true;
    b.Ztilde.cadlag = check_cadlag(b.Ztilde);
    b.Ao.increasing = b.Ap.increasing = true;
    b.Ap.predictable = true;
    return b;
}

// --- Classification and decomposition ----------------------------------------

Classification classify(const RandomTime& tau, const FilteredSpace& sp) {
    PiecewisePath Ao = dual_project(raw_indicator_path(tau, sp), ProjectionKind::optional_kind, sp);

    Rational thin(0), thick(0), atom_mass(0), density_mass(0), inf_mass(0);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (const auto& pc : law.pieces) {
            if (pc.is_atom) {
                if (pc.t.infinite) { inf_mass += sp.weights[a] * pc.p; continue; }
                atom_mass += sp.weights[a] * pc.p;
                // the criterion: mass where the dual optional projection jumps at tau
                if (Ao.jump(a, pc.t).signum() > 0) thin += sp.weights[a] * pc.p;
                else thick += sp.weights[a] * pc.p;
            } else {
                // the density part meets the (finitely many) jump times of Ao
                // with zero probability
                density_mass += sp.weights[a] * pc.mass();
                thick += sp.weights[a] * pc.mass();
            }
        }
    }
    if (!(thin == atom_mass) || !(thick == density_mass))
        fail("InternalInvariant", "jump-support split disagrees with the atom/density split");

    Classification c{thin, thick, TimeKind::infinite};
    if (thin.is_zero() && thick.is_zero()) c.kind = TimeKind::infinite;
    else if (thick.is_zero()) c.kind = TimeKind::thin;
    else if (thin.is_zero()) c.kind = TimeKind::thick;
    else c.kind = TimeKind::mixed;
    return c;
}

// restriction tau_C = tau on the kept pieces, inf elsewhere, rebuilt per leaf
static RandomTime restrict_time(const RandomTime& tau,
                                const std::function<bool(int leaf, const LawPiece&)>& keep) {
    RandomTime out;
    for (int l = 0; l < (int)tau.per_leaf.size(); ++l) {
        std::vector<std::pair<TimePoint, Rational>> atoms;
        std::vector<std::array<Rational, 3>> dens;
        Rational kept(0);
        for (const auto& pc : tau.per_leaf[l].pieces) {
            if (pc.is_atom && pc.t.infinite) continue;   // folded into the inf atom below
            if (!keep(l, pc)) continue;
            kept += pc.mass();
            if (pc.is_atom) atoms.emplace_back(pc.t, pc.p);
            else dens.push_back({pc.a, pc.b, pc.level});
        }
        Rational at_inf = Rational(1) - kept;
        if (at_inf.signum() > 0) atoms.emplace_back(TimePoint::inf(), at_inf);
        out.per_leaf.push_back(make_leaf_law(std::move(atoms), std::move(dens)));
    }
    return out;
}

Decomposition thin_thick_decompose(const RandomTime& tau, const FilteredSpace& sp) {
    PiecewisePath Ao = dual_project(raw_indicator_path(tau, sp), ProjectionKind::optional_kind, sp);
    // the jump of Ao is adapted, hence constant per leaf: classify by any atom of the leaf
    std::vector<int> rep(tau.per_leaf.size(), -1);
    for (int a = 0; a < sp.n_atoms(); ++a)
        if (rep[sp.leaf_of(a)] < 0) rep[sp.leaf_of(a)] = a;

    auto jumps_at = [&](int leaf, const LawPiece& pc) {
        return pc.is_atom && !pc.t.infinite && Ao.jump(rep[leaf], pc.t).signum() > 0;
    };
    Decomposition d;
    d.thin = restrict_time(tau, jumps_at);
    d.thick = restrict_time(tau, [&](int l, const LawPiece& pc) { return !jumps_at(l, pc); });
    return d;
}

TripleDecomposition triple_decompose(const RandomTime& tau, const FilteredSpace& sp) {
    PiecewisePath Ao = dual_project(raw_indicator_path(tau, sp), ProjectionKind::optional_kind, sp);
    PiecewisePath Ap = dual_project(raw_indicator_path(tau, sp), ProjectionKind::predictable_kind, sp);
    std::vector<int> rep(tau.per_leaf.size(), -1);
    for (int a = 0; a < sp.n_atoms(); ++a)
        if (rep[sp.leaf_of(a)] < 0) rep[sp.leaf_of(a)] = a;

    auto optional_jump = [&](int leaf, const LawPiece& pc) {
        return pc.is_atom && !pc.t.infinite && Ao.jump(rep[leaf], pc.t).signum() > 0;
    };
    auto predictable_jump = [&](int leaf, const LawPiece& pc) {
        return pc.is_atom && !pc.t.infinite && Ap.jump(rep[leaf], pc.t).signum() > 0;
    };
    TripleDecomposition t;
    t.thin_accessible = restrict_time(tau, [&](int l, const LawPiece& pc) {
        return optional_jump(l, pc) && predictable_jump(l, pc);
    });
    t.thin_inaccessible = restrict_time(tau, [&](int l, const LawPiece& pc) {
        return optional_jump(l, pc) && !predictable_jump(l, pc);
    });
    t.thick = restrict_time(tau, [&](int l, const LawPiece& pc) { return !optional_jump(l, pc); });
    return t;
}

// --- Exhausting systems --------------------------------------------------------

ExhaustingSystem exhausting_system(const RandomTime& thin_time, const FilteredSpace& sp,
                                   const std::vector<StoppingTime>* user_T) {
    Classification c = classify(thin_time, sp);
    if (c.thick_mass.signum() > 0)
        fail("NotThin", "time carries thick mass " + c.thick_mass.to_string());

    ExhaustingSystem sys;
    sys.time = thin_time;

    StoppingTime t0;
    t0.value.assign(sp.n_atoms(), TimePoint::inf());
    sys.T.push_back(t0);

    if (user_T) {
        for (size_t n = 0; n < user_T->size(); ++n) {
            if (!is_stopping_time((*user_T)[n], sp).stopping)
                fail("NotStoppingTime", "supplied time " + std::to_string(n + 1) + " is not a stopping time");
            sys.T.push_back((*user_T)[n]);
        }
        for (size_t n = 1; n < sys.T.size(); ++n)
            for (size_t m = n + 1; m < sys.T.size(); ++m)
                for (int a = 0; a < sp.n_atoms(); ++a)
                    if (sys.T[n].value[a].is_finite() && sys.T[n].value[a] == sys.T[m].value[a])
                        fail("GraphsNotDisjoint",
                             "times " + std::to_string(n) + " and " + std::to_string(m) +
                             " share the graph point t=" + sys.T[n].value[a].to_string() +
                             " on atom " + sp.atom_ids[a]);
        // covering: every finite support point of every leaf must lie on a graph
        Rational missing(0);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const auto& law = thin_time.per_leaf[sp.leaf_of(a)];
            for (const auto& pc : law.pieces) {
                if (!pc.is_atom || pc.t.infinite) continue;
                bool hit = false;
                for (size_t n = 1; n < sys.T.size(); ++n)
                    if (sys.T[n].value[a] == pc.t) { hit = true; break; }
                if (!hit) missing += sp.weights[a] * pc.p;
            }
        }
        if (missing.signum() > 0)
            fail("NotCovering", "graphs miss mass " + missing.to_string());
    } else {
        std::set<Rational> support;
        for (const auto& law : thin_time.per_leaf)
            for (const auto& pc : law.pieces)
                if (pc.is_atom && !pc.t.infinite && pc.p.signum() > 0) support.insert(pc.t.t);
        for (const auto& s : support) {
            StoppingTime T;
            T.value.assign(sp.n_atoms(), TimePoint::at(s));
            sys.T.push_back(T);
        }
    }

    auto times = all_times(thin_time, sp);
    sys.C.push_back(event_tau_inf(thin_time, sp));
    sys.z.push_back(martingale_from_terminal(event_cond_mass(sys.C[0], thin_time, sp), sp, times));
    for (size_t n = 1; n < sys.T.size(); ++n) {
        sys.C.push_back(event_tau_eq(thin_time, sp, sys.T[n]));
        sys.z.push_back(martingale_from_terminal(event_cond_mass(sys.C[n], thin_time, sp), sp, times));
    }
    return sys;
}

Rational exhausting_defect(const ExhaustingSystem& sys, const FilteredSpace& sp) {
    Rational defect(0);
    auto bump = [&](const Rational& r) { defect = max(defect, r.abs()); };

    for (size_t n = 1; n < sys.T.size(); ++n)
        for (size_t m = n + 1; m < sys.T.size(); ++m)
            for (int a = 0; a < sp.n_atoms(); ++a)
                if (sys.T[n].value[a].is_finite() && sys.T[n].value[a] == sys.T[m].value[a])
                    bump(Rational(1));

    Rational total(0);
    for (size_t n = 0; n < sys.C.size(); ++n) total += event_mass(sys.C[n], sys.time, sp);
    bump(total - Rational(1));

    // sum of the martingale family is the constant 1
    PiecewisePath sum = path_constant(sp.n_atoms(), Rational(0));
    for (const auto& zn : sys.z) sum = path_add(sum, zn);
    if (!path_equal(sum, path_constant(sp.n_atoms(), Rational(1)))) bump(Rational(1));

    // z^n and its left limits stay positive on the atoms carrying C_n
    for (size_t n = 0; n < sys.z.size(); ++n) {
        auto carrying = event_cond_mass(sys.C[n], sys.time, sp);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            if (carrying[a].signum() <= 0) continue;
            for (const auto& k : sys.z[n].atom[a].knots)
                if (k.value.signum() <= 0 || k.left.signum() <= 0) bump(Rational(1));
        }
    }
    return defect;
}

Rational reconstruction_defect(const ExhaustingSystem& sys, const TimeProcessBundle& b,
                               const FilteredSpace& sp) {
    Rational defect(0);
    auto bump = [&](const Rational& r) { defect = max(defect, r.abs()); };

    std::set<Rational> tset;
    for (const auto& ap : b.Z.atom)
        for (const auto& k : ap.knots) tset.insert(k.t);

    for (int a = 0; a < sp.n_atoms(); ++a) {
        for (const auto& t : tset) {
            TimePoint tp = TimePoint::at(t);
            Rational sZt(0), sZ(0), sAo(0), sm(0);
            for (size_t n = 0; n < sys.T.size(); ++n) {
                const TimePoint& Tn = sys.T[n].value[a];
                Rational zval = sys.z[n].eval(a, tp);
                if (tp <= Tn) sZt += zval;
                if (tp < Tn) sZ += zval;
                if (n >= 1 && Tn.is_finite() && Tn <= tp) sAo += sys.z[n].eval(a, Tn);
                sm += sys.z[n].eval(a, tp <= Tn ? tp : Tn);
            }
            bump(sZt - b.Ztilde.eval(a, tp));
            bump(sZ - b.Z.eval(a, tp));
            bump(sAo - b.Ao.eval(a, tp));
            bump(sm - b.m.eval(a, tp));
        }
        // limits at infinity
        Rational sZt(0), sAo(0), sm(0);
        for (size_t n = 0; n < sys.T.size(); ++n) {
            const TimePoint& Tn = sys.T[n].value[a];
            if (Tn.infinite) sZt += sys.z[n].atom[a].at_inf;
            if (n >= 1 && Tn.is_finite()) sAo += sys.z[n].eval(a, Tn);
            sm += sys.z[n].eval(a, Tn);
        }
        bump(sZt - b.Ztilde.atom[a].at_inf);
        bump(sZt - b.Z.atom[a].at_inf);
        bump(sAo - b.Ao.atom[a].at_inf);
        bump(sm - b.m.atom[a].at_inf);
    }
    return defect;
}

ExhaustingSystem merge_exhausting(const ExhaustingSystem& A, const ExhaustingSystem& B,
                                  const FilteredSpace& sp) {
    if (!(A.time == B.time))
        fail("MismatchedTime", "the two systems exhaust different random times");

    ExhaustingSystem sys;
    sys.time = A.time;
    sys.T.push_back(A.T[0]);
    sys.C.push_back(event_tau_inf(A.time, sp));

    auto times = all_times(A.time, sp);
    sys.z.push_back(martingale_from_terminal(event_cond_mass(sys.C[0], A.time, sp), sp, times));

    for (size_t n = 1; n < A.T.size(); ++n) {
        for (size_t m = 1; m < B.T.size(); ++m) {
            StoppingTime U;
            U.value.resize(sp.n_atoms());
            for (int a = 0; a < sp.n_atoms(); ++a)
                U.value[a] = (A.T[n].value[a] == B.T[m].value[a]) ? A.T[n].value[a] : TimePoint::inf();
            Event D = event_intersect(A.C[n], B.C[m], A.time);
            if (event_mass(D, A.time, sp).is_zero()) continue;
            if (!is_stopping_time(U, sp).stopping)
                fail("InternalInvariant", "merged time is not a stopping time");
            sys.T.push_back(std::move(U));
            sys.C.push_back(std::move(D));
            sys.z.push_back(martingale_from_terminal(event_cond_mass(sys.C.back(), A.time, sp), sp, times));
        }
    }
    return sys;
}

// --- Dual equality, pseudo-stopping -------------------------------------------

DualEqualityReport dual_equality_test(const RandomTime& tau, const FilteredSpace& sp) {
    TimeProcessBundle b = associated_processes(tau, sp);
    DualEqualityReport r;
    r.equal = path_equal(b.Ao, b.Ap);
    if (!r.equal) {
        auto times = merged_knot_times({&b.Ao, &b.Ap});
        for (const auto& t : times)
            for (int a = 0; a < sp.n_atoms(); ++a)
                if (!(b.Ao.jump(a, TimePoint::at(t)) == b.Ap.jump(a, TimePoint::at(t))))
                    r.witnesses.emplace_back(t, a);
    }
    return r;
}

bool pseudo_stopping_test(const RandomTime& tau, const FilteredSpace& sp) {
    TimeProcessBundle b = associated_processes(tau, sp);
    return path_equal(b.m, path_constant(sp.n_atoms(), Rational(1)));
}

// --- Conditional-law identities across the decomposition -----------------------

namespace {

// tau2 = tau on density pieces, inf on atom pieces
Event event_tau2_gt(const RandomTime& tau, const FilteredSpace& sp, const Rational& t) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) e.part[a].atom_pieces.push_back(i);
            else if (pc.b > t) e.part[a].density.emplace_back(max(pc.a, t), pc.b);
        }
    }
    return e;
}

Event event_tau2_in(const RandomTime& tau, const FilteredSpace& sp,
                    const Rational& x, const Rational& y) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) continue;
            Rational lo = max(pc.a, x), hi = min(pc.b, y);
            if (lo < hi) e.part[a].density.emplace_back(lo, hi);
        }
    }
    return e;
}

// tau1 = tau on atom pieces (all finite atoms jump), inf on density pieces
Event event_tau1_gt(const RandomTime& tau, const FilteredSpace& sp, const Rational& t) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) {
                if (pc.t.infinite || pc.t.t > t) e.part[a].atom_pieces.push_back(i);
            } else {
                e.part[a].density.emplace_back(pc.a, pc.b);
            }
        }
    }
    return e;
}

Event event_tau1_eq(const RandomTime& tau, const FilteredSpace& sp, const Rational& s) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom && !pc.t.infinite && pc.t.t == s) e.part[a].atom_pieces.push_back(i);
        }
    }
    return e;
}

Event event_all(const RandomTime& tau, const FilteredSpace& sp) {
    Event e = event_none(sp);
    for (int a = 0; a < sp.n_atoms(); ++a) {
        const auto& law = tau.per_leaf[sp.leaf_of(a)];
        for (int i = 0; i < (int)law.pieces.size(); ++i) {
            const auto& pc = law.pieces[i];
            if (pc.is_atom) e.part[a].atom_pieces.push_back(i);
            else e.part[a].density.emplace_back(pc.a, pc.b);
        }
    }
    return e;
}

} // namespace

CrossConditionalReport cross_conditional_check(const RandomTime& tau, const FilteredSpace& sp,
                                               const Rational& t) {
    CrossConditionalReport rep;
    rep.max_residual = Rational(0);
    auto bump = [&](const Rational& r) {
        rep.max_residual = max(rep.max_residual, r.abs());
        ++rep.checks;
    };

    Decomposition dec = thin_thick_decompose(tau, sp);
    TimeProcessBundle b1 = associated_processes(dec.thin, sp);
    TimeProcessBundle b2 = associated_processes(dec.thick, sp);
    TimePoint tp = TimePoint::at(t);

    // martingale family of the thin part, expressed on the original tau's pieces
    std::set<Rational> support;
    for (const auto& law : dec.thin.per_leaf)
        for (const auto& pc : law.pieces)
            if (pc.is_atom && !pc.t.infinite) support.insert(pc.t.t);

    // C_0 = {tau = inf}: only there do both parts stay away, which is what
    // the before/after-tau2 split of the conditional expectation needs
    std::vector<Event> C;
    C.push_back(event_tau_inf(tau, sp));
    std::vector<Rational> support_list(support.begin(), support.end());
    for (const auto& s : support_list) C.push_back(event_tau1_eq(tau, sp, s));

    auto times = all_times(tau, sp);
    std::vector<PiecewisePath> z;
    for (const auto& cn : C)
        z.push_back(martingale_from_terminal(event_cond_mass(cn, tau, sp), sp, times));

    const Partition& part = sp.partition(sp.index_at(tp));

    Event tau2_gt_t = event_tau2_gt(tau, sp, t);
    Event tau1_gt_t = event_tau1_gt(tau, sp, t);

    // generating family g(tau2 ^ t): everything, the tail, and the
    // breakpoint intervals up to time t
    std::vector<Event> fam2;
    fam2.push_back(event_all(tau, sp));
    fam2.push_back(tau2_gt_t);
    {
        std::set<Rational> bs;
        bs.insert(Rational(0));
        for (const auto& bp : dec.thick.breakpoints())
            if (bp <= t) bs.insert(bp);
        bs.insert(t);
        std::vector<Rational> v(bs.begin(), bs.end());
        for (size_t i = 0; i + 1 < v.size(); ++i)
            fam2.push_back(event_tau2_in(tau, sp, v[i], v[i + 1]));
    }

    auto cm_tau2gt = event_cond_mass(tau2_gt_t, tau, sp);
    auto cm_tau1gt = event_cond_mass(tau1_gt_t, tau, sp);

    auto guard_div = [&](const Rational& num, const Rational& den, const Rational& set_mass) {
        if (den.is_zero()) {
            if (set_mass.signum() > 0)
                fail("DegenerateDenominator", "zero supermartingale on a charged cell");
            return Rational(0);
        }
        return num / den;
    };

    // identity: P(C_n | F^{tau2}_t) = 1_{t < tau2} z^n_t / Z^2_t
    for (size_t n = 0; n < C.size(); ++n) {
        for (const auto& g : fam2) {
            auto cm_lhs = event_cond_mass(event_intersect(C[n], g, tau), tau, sp);
            auto cm_rhs = event_cond_mass(event_intersect(tau2_gt_t, g, tau), tau, sp);
            for (const auto& cell : part.cells) {
                Rational lhs(0), rhs(0);
                for (int a : cell) {
                    lhs += sp.weights[a] * cm_lhs[a];
                    Rational ratio = guard_div(z[n].eval(a, tp), b2.Z.eval(a, tp), cm_tau2gt[a]);
                    rhs += sp.weights[a] * ratio * cm_rhs[a];
                }
                bump(lhs - rhs);
            }
        }
    }

    // identity: P(tau1 > t | F^{tau2}_t) = 1 - 1_{t < tau2} (1 - Z^1_t) / Z^2_t
    for (const auto& g : fam2) {
        auto cm_lhs = event_cond_mass(event_intersect(tau1_gt_t, g, tau), tau, sp);
        auto cm_g = event_cond_mass(g, tau, sp);
        auto cm_rhs = event_cond_mass(event_intersect(tau2_gt_t, g, tau), tau, sp);
        for (const auto& cell : part.cells) {
            Rational lhs(0), rhs(0);
            for (int a : cell) {
                lhs += sp.weights[a] * cm_lhs[a];
                Rational ratio = guard_div(Rational(1) - b1.Z.eval(a, tp), b2.Z.eval(a, tp), cm_tau2gt[a]);
                rhs += sp.weights[a] * (cm_g[a] - ratio * cm_rhs[a]);
            }
            bump(lhs - rhs);
        }
    }

    // identity: P(tau2 > t | F^{tau1}_t) = 1 - 1_{t < tau1} (1 - Z^2_t) / Z^1_t
    std::vector<Event> fam1;
    fam1.push_back(event_all(tau, sp));
    fam1.push_back(tau1_gt_t);
    for (const auto& s : support_list)
        if (s <= t) fam1.push_back(event_tau1_eq(tau, sp, s));
    for (const auto& g : fam1) {
        auto cm_lhs = event_cond_mass(event_intersect(tau2_gt_t, g, tau), tau, sp);
        auto cm_g = event_cond_mass(g, tau, sp);
        auto cm_rhs = event_cond_mass(event_intersect(tau1_gt_t, g, tau), tau, sp);
        for (const auto& cell : part.cells) {
            Rational lhs(0), rhs(0);
            for (int a : cell) {
                lhs += sp.weights[a] * cm_lhs[a];
                Rational ratio = guard_div(Rational(1) - b2.Z.eval(a, tp), b1.Z.eval(a, tp), cm_tau1gt[a]);
                rhs += sp.weights[a] * (cm_g[a] - ratio * cm_rhs[a]);
            }
            bump(lhs - rhs);
        }
    }
    return rep;
}

// --- JSON ----------------------------------------------------------------------

using nlohmann::json;

RandomTime random_time_from_json_text(const std::string& text, const FilteredSpace& sp) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail("BadJson", e.what());
    }
    if (!j.contains("per_leaf")) fail("MissingKey", "random-time file lacks \"per_leaf\"");

    std::map<std::string, int> atom_index;
    for (int a = 0; a < sp.n_atoms(); ++a) atom_index[sp.atom_ids[a]] = a;

    const Partition& leaves = sp.partitions.back();
    RandomTime tau;
    tau.per_leaf.resize(leaves.n_cells());
    std::vector<bool> seen(leaves.n_cells(), false);

    for (const auto& entry : j["per_leaf"]) {
        if (!entry.contains("leaf")) fail("MissingKey", "leaf entry lacks \"leaf\"");
        std::set<int> ids;
        for (const auto& id : entry["leaf"]) {
            auto it = atom_index.find(id.get<std::string>());
            if (it == atom_index.end()) fail("UnknownAtomId", id.get<std::string>());
            ids.insert(it->second);
        }
        int leaf = -1;
        for (int c = 0; c < leaves.n_cells(); ++c) {
            std::set<int> cell(leaves.cells[c].begin(), leaves.cells[c].end());
            if (cell == ids) { leaf = c; break; }
        }
        if (leaf < 0) fail("UnknownLeaf", "listed atoms do not form an F_infinity cell");
        if (seen[leaf]) fail("DuplicateLeaf", "leaf listed twice");
        seen[leaf] = true;

        std::vector<std::pair<TimePoint, Rational>> atoms;
        std::vector<std::array<Rational, 3>> dens;
        if (entry.contains("atoms"))
            for (const auto& a : entry["atoms"])
                atoms.emplace_back(TimePoint::parse(a[0].get<std::string>()),
                                   Rational::parse(a[1].get<std::string>()));
        if (entry.contains("density"))
            for (const auto& d : entry["density"])
                dens.push_back({Rational::parse(d[0].get<std::string>()),
                                Rational::parse(d[1].get<std::string>()),
                                Rational::parse(d[2].get<std::string>())});
        tau.per_leaf[leaf] = make_leaf_law(std::move(atoms), std::move(dens));
    }
    for (int c = 0; c < leaves.n_cells(); ++c)
        if (!seen[c]) fail("MissingLeafLaw", "no law given for one F_infinity cell");
    tau.validate(sp);
    return tau;
}

std::string random_time_to_json_text(const RandomTime& tau, const FilteredSpace& sp) {
    const Partition& leaves = sp.partitions.back();
    json j;
    j["per_leaf"] = json::array();
    for (int c = 0; c < leaves.n_cells(); ++c) {
        json entry;
        entry["leaf"] = json::array();
        for (int a : leaves.cells[c]) entry["leaf"].push_back(sp.atom_ids[a]);
        entry["atoms"] = json::array();
        entry["density"] = json::array();
        for (const auto& pc : tau.per_leaf[c].pieces) {
            if (pc.is_atom)
                entry["atoms"].push_back({pc.t.to_string(), pc.p.to_string()});
            else
                entry["density"].push_back({pc.a.to_string(), pc.b.to_string(), pc.level.to_string()});
        }
        j["per_leaf"].push_back(entry);
    }
    return j.dump(2);
}

} // namespace enlab
