#include "enlab/projection.hpp"

#include <set>

namespace enlab {

namespace {

std::vector<Rational> knots_with_grid(const PiecewisePath& raw, const FilteredSpace& sp) {
    std::set<Rational> s;
    for (const auto& ap : raw.atom)
        for (const auto& k : ap.knots) s.insert(k.t);
    for (const auto& g : sp.grid) s.insert(g);
    s.insert(Rational(0));
    return {s.begin(), s.end()};
}

} // namespace

PiecewisePath project(const PiecewisePath& raw, ProjectionKind kind, const FilteredSpace& sp) {
    auto times = knots_with_grid(raw, sp);
    PiecewisePath r = reknot(raw, times);

    PiecewisePath out;
    out.atom.resize(sp.n_atoms());
    for (size_t i = 0; i < times.size(); ++i) {
        TimePoint tp = TimePoint::at(times[i]);
        int at = sp.index_at(tp);
        int before = sp.index_before(tp);

        std::vector<Rational> value(sp.n_atoms()), left(sp.n_atoms()),
            start(sp.n_atoms()), slope(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const PathKnot& k = r.atom[a].knots[i];
            value[a] = k.value;
            left[a] = k.left;
            start[a] = k.start;
            slope[a] = k.slope;
        }
        // the value at t conditions on F_t (optional) or F_{t-} (predictable);
        // the left limit and everything on the preceding open segment always
        // see the partition strictly before t
        auto cv = sp.cell_average(value, kind == ProjectionKind::optional_kind ? at : before);
        auto cl = sp.cell_average(left, before);
        auto cs = sp.cell_average(start, at);
        auto cg = sp.cell_average(slope, at);
        for (int a = 0; a < sp.n_atoms(); ++a)
            out.atom[a].knots.push_back(PathKnot{times[i], cl[a], cv[a], cs[a], cg[a]});
    }
    std::vector<Rational> tail(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) tail[a] = r.atom[a].at_inf;
    auto ct = sp.cell_average(tail, sp.n_grid() - 1);
    for (int a = 0; a < sp.n_atoms(); ++a) out.atom[a].at_inf = ct[a];

    out.adapted = kind == ProjectionKind::optional_kind;
    out.predictable = kind == ProjectionKind::predictable_kind;
    out.cadlag = check_cadlag(out);
    return out;
}

PiecewisePath dual_project(const PiecewisePath& raw, ProjectionKind kind, const FilteredSpace& sp) {
    for (const auto& ap : raw.atom) {
        if (!ap.knots.front().left.is_zero())
            fail("BadRawProcess", "dual projection requires V_{0-} = 0");
        const PathKnot& lastk = ap.knots.back();
        if (!lastk.slope.is_zero())
            fail("BadRawProcess", "raw process keeps growing past its last knot");
        if (!(ap.at_inf == lastk.start))
            fail("BadRawProcess", "raw process carries mass at infinity");
    }
    auto times = knots_with_grid(raw, sp);
    PiecewisePath r = reknot(raw, times);

    // conditional jump sizes and conditional densities at every knot
    std::vector<std::vector<Rational>> cjump(times.size()), cslope(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        TimePoint tp = TimePoint::at(times[i]);
        int idx = kind == ProjectionKind::optional_kind ? sp.index_at(tp) : sp.index_before(tp);
        std::vector<Rational> jump(sp.n_atoms()), slope(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const PathKnot& k = r.atom[a].knots[i];
            jump[a] = k.value - k.left;
            if (jump[a].signum() < 0 || k.slope.signum() < 0)
                fail("BadRawProcess", "raw process is not increasing");
            slope[a] = k.slope;
        }
        cjump[i] = sp.cell_average(jump, idx);
        cslope[i] = sp.cell_average(slope, sp.index_at(tp));
    }

    PiecewisePath out;
    out.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        Rational acc(0);
        for (size_t i = 0; i < times.size(); ++i) {
            Rational left = acc;
            Rational value = left + cjump[i][a];
            out.atom[a].knots.push_back(PathKnot{times[i], left, value, value, cslope[i][a]});
            acc = value;
            if (i + 1 < times.size()) acc += cslope[i][a] * (times[i + 1] - times[i]);
        }
        out.atom[a].at_inf = acc;
    }
    out.adapted = true;
    out.increasing = true;
    out.cadlag = true;
    out.predictable = kind == ProjectionKind::predictable_kind && check_predictable(out, sp);
    return out;
}

Rational duality_defect(const PiecewisePath& raw, const PiecewisePath& projected,
                        ProjectionKind kind, const FilteredSpace& sp) {
    auto times = knots_with_grid(raw, sp);
    {
        std::set<Rational> s(times.begin(), times.end());
        for (const auto& ap : projected.atom)
            for (const auto& k : ap.knots) s.insert(k.t);
        times.assign(s.begin(), s.end());
    }
    PiecewisePath rv = reknot(raw, times), pv = reknot(projected, times);

    Rational defect(0);
    auto bump = [&](const Rational& r) { defect = max(defect, r.abs()); };

    auto interval_mass = [&](const PiecewisePath& v, int a, size_t i, size_t j) {
        // mass of (times[i], times[j]] under the Stieltjes measure of v
        return v.atom[a].knots[j].value - v.atom[a].knots[i].value;
    };

    for (size_t i = 0; i < times.size(); ++i) {
        TimePoint tp = TimePoint::at(times[i]);
        // point masses H = 1_C 1_{t = times[i]}
        int idx = kind == ProjectionKind::optional_kind ? sp.index_at(tp) : sp.index_before(tp);
        for (const auto& cell : sp.partition(idx).cells) {
            Rational lhs(0), rhs(0);
            for (int a : cell) {
                lhs += sp.weights[a] * (rv.atom[a].knots[i].value - rv.atom[a].knots[i].left);
                rhs += sp.weights[a] * (pv.atom[a].knots[i].value - pv.atom[a].knots[i].left);
            }
            bump(lhs - rhs);
        }
        // interval indicators H = 1_C 1_{(times[i], times[j]]} with C in F_{times[i]}
        for (size_t j = i + 1; j < times.size(); ++j) {
            for (const auto& cell : sp.partition(sp.index_at(tp)).cells) {
                Rational lhs(0), rhs(0);
                for (int a : cell) {
                    lhs += sp.weights[a] * interval_mass(rv, a, i, j);
                    rhs += sp.weights[a] * interval_mass(pv, a, i, j);
                }
                bump(lhs - rhs);
            }
        }
        // unbounded tail H = 1_C 1_{(times[i], inf)}
        for (const auto& cell : sp.partition(sp.index_at(tp)).cells) {
            Rational lhs(0), rhs(0);
            for (int a : cell) {
                lhs += sp.weights[a] * (rv.atom[a].at_inf - rv.atom[a].knots[i].value);
                rhs += sp.weights[a] * (pv.atom[a].at_inf - pv.atom[a].knots[i].value);
            }
            bump(lhs - rhs);
        }
    }
    return defect;
}

} // namespace enlab
