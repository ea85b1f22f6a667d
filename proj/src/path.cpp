#include "enlab/path.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace enlab {

int AtomPath::knot_index(const Rational& t) const {
    int lo = 0, hi = (int)knots.size() - 1, ans = 0;
    while (lo <= hi) {
        int mid = (lo + hi) / 2;
        if (knots[mid].t <= t) { ans = mid; lo = mid + 1; }
        else hi = mid - 1;
    }
    return ans;
}

Rational AtomPath::eval(const TimePoint& tp) const {
    if (tp.infinite) return at_inf;
    const Rational& t = tp.t;
    if (t < knots.front().t) fail("TimeBeforeOrigin", "path evaluated before first knot");
    int i = knot_index(t);
    const PathKnot& k = knots[i];
    if (k.t == t) return k.value;
    return k.start + k.slope * (t - k.t);
}

Rational AtomPath::left_limit(const TimePoint& tp) const {
    if (tp.infinite) return at_inf;
    const Rational& t = tp.t;
    int i = knot_index(t);
    const PathKnot& k = knots[i];
    if (k.t == t) return k.left;
    return k.start + k.slope * (t - k.t);   // continuous inside a segment
}

Rational AtomPath::jump(const TimePoint& tp) const {
    if (tp.infinite) return Rational(0);
    return eval(tp) - left_limit(tp);
}

std::vector<Rational> merged_knot_times(const std::vector<const PiecewisePath*>& paths) {
    std::set<Rational> s;
    for (const auto* p : paths)
        for (const auto& ap : p->atom)
            for (const auto& k : ap.knots) s.insert(k.t);
    return {s.begin(), s.end()};
}

PiecewisePath reknot(const PiecewisePath& p, const std::vector<Rational>& times) {
    PiecewisePath out = p;
    for (size_t a = 0; a < p.atom.size(); ++a) {
        const AtomPath& src = p.atom[a];
        AtomPath dst;
        dst.at_inf = src.at_inf;
        for (const Rational& t : times) {
            int i = src.knot_index(t);
            const PathKnot& k = src.knots[i];
            if (k.t == t) {
                dst.knots.push_back(k);
            } else {
                Rational v = k.start + k.slope * (t - k.t);
                dst.knots.push_back(PathKnot{t, v, v, v, k.slope});
            }
        }
        out.atom[a] = std::move(dst);
    }
    return out;
}

PiecewisePath path_constant(int n_atoms, const Rational& c) {
    PiecewisePath p;
    AtomPath ap;
    ap.knots.push_back(PathKnot::flat(Rational(0), c));
    ap.at_inf = c;
    p.atom.assign(n_atoms, ap);
    p.adapted = true;
    p.predictable = true;
    p.cadlag = true;
    return p;
}

static PiecewisePath combine(const PiecewisePath& a, const PiecewisePath& b,
                             const std::function<Rational(const Rational&, const Rational&)>& f) {
    auto times = merged_knot_times({&a, &b});
    PiecewisePath ra = reknot(a, times), rb = reknot(b, times);
    PiecewisePath out = ra;
    for (size_t i = 0; i < ra.atom.size(); ++i) {
        for (size_t k = 0; k < times.size(); ++k) {
            PathKnot& o = out.atom[i].knots[k];
            const PathKnot& x = ra.atom[i].knots[k];
            const PathKnot& y = rb.atom[i].knots[k];
            o.left = f(x.left, y.left);
            o.value = f(x.value, y.value);
            o.start = f(x.start, y.start);
            o.slope = f(x.slope, y.slope);
        }
        out.atom[i].at_inf = f(ra.atom[i].at_inf, rb.atom[i].at_inf);
    }
    out.adapted = out.predictable = out.increasing = false;
    out.cadlag = check_cadlag(out);
    return out;
}

PiecewisePath path_add(const PiecewisePath& a, const PiecewisePath& b) {
    return combine(a, b, [](const Rational& x, const Rational& y) { return x + y; });
}
PiecewisePath path_sub(const PiecewisePath& a, const PiecewisePath& b) {
    return combine(a, b, [](const Rational& x, const Rational& y) { return x - y; });
}
PiecewisePath path_scale(const PiecewisePath& a, const Rational& c) {
    PiecewisePath out = a;
    for (auto& ap : out.atom) {
        for (auto& k : ap.knots) {
            k.left *= c; k.value *= c; k.start *= c; k.slope *= c;
        }
        ap.at_inf *= c;
    }
    return out;
}

bool path_equal(const PiecewisePath& a, const PiecewisePath& b) {
    if (a.atom.size() != b.atom.size()) return false;
    auto times = merged_knot_times({&a, &b});
    PiecewisePath ra = reknot(a, times), rb = reknot(b, times);
    for (size_t i = 0; i < ra.atom.size(); ++i) {
        if (!(ra.atom[i].at_inf == rb.atom[i].at_inf)) return false;
        for (size_t k = 0; k < times.size(); ++k) {
            const PathKnot& x = ra.atom[i].knots[k];
            const PathKnot& y = rb.atom[i].knots[k];
            if (!(x.left == y.left && x.value == y.value && x.start == y.start && x.slope == y.slope))
                return false;
        }
    }
    return true;
}

bool check_cadlag(const PiecewisePath& p) {
    for (const auto& ap : p.atom)
        for (const auto& k : ap.knots)
            if (!(k.start == k.value)) return false;
    return true;
}

bool check_increasing(const PiecewisePath& p) {
    for (const auto& ap : p.atom)
        for (const auto& k : ap.knots)
            if (k.left > k.value || k.value > k.start || k.slope.signum() < 0) return false;
    return true;
}

// values at the knot (and on the following open segment) must be constant on
// the cells in force at the knot time; the limit at infinity must be constant
// on F_infinity cells
bool check_adapted(const PiecewisePath& p, const FilteredSpace& sp) {
    std::vector<Rational> times = merged_knot_times({&p});
    std::set<Rational> tset(times.begin(), times.end());
    for (const auto& g : sp.grid) tset.insert(g);
    PiecewisePath r = reknot(p, std::vector<Rational>(tset.begin(), tset.end()));

    for (size_t k = 0; k < r.atom[0].knots.size(); ++k) {
        const Partition& part = sp.partition(sp.index_at(TimePoint::at(r.atom[0].knots[k].t)));
        for (const auto& cell : part.cells) {
            const PathKnot& ref = r.atom[cell.front()].knots[k];
            for (int a : cell) {
                const PathKnot& x = r.atom[a].knots[k];
                if (!(x.value == ref.value && x.start == ref.start && x.slope == ref.slope))
                    return false;
            }
        }
    }
    const Partition& leaves = sp.partitions.back();
    for (const auto& cell : leaves.cells)
        for (int a : cell)
            if (!(r.atom[a].at_inf == r.atom[cell.front()].at_inf)) return false;
    return true;
}

bool check_predictable(const PiecewisePath& p, const FilteredSpace& sp) {
    std::vector<Rational> times = merged_knot_times({&p});
    std::set<Rational> tset(times.begin(), times.end());
    for (const auto& g : sp.grid) tset.insert(g);
    PiecewisePath r = reknot(p, std::vector<Rational>(tset.begin(), tset.end()));

    for (size_t k = 0; k < r.atom[0].knots.size(); ++k) {
        TimePoint t = TimePoint::at(r.atom[0].knots[k].t);
        const Partition& before = sp.partition(sp.index_before(t));
        const Partition& at = sp.partition(sp.index_at(t));
        for (const auto& cell : before.cells)
            for (int a : cell)
                if (!(r.atom[a].knots[k].value == r.atom[cell.front()].knots[k].value))
                    return false;
        for (const auto& cell : at.cells) {
            const PathKnot& ref = r.atom[cell.front()].knots[k];
            for (int a : cell) {
                const PathKnot& x = r.atom[a].knots[k];
                if (!(x.start == ref.start && x.slope == ref.slope)) return false;
            }
        }
    }
    const Partition& leaves = sp.partitions.back();
    for (const auto& cell : leaves.cells)
        for (int a : cell)
            if (!(r.atom[a].at_inf == r.atom[cell.front()].at_inf)) return false;
    return true;
}

Rational total_variation(const AtomPath& p) {
    Rational tv(0);
    for (size_t i = 0; i < p.knots.size(); ++i) {
        const PathKnot& k = p.knots[i];
        tv += (k.value - k.left).abs();
        tv += (k.start - k.value).abs();
        if (i + 1 < p.knots.size())
            tv += (k.slope * (p.knots[i + 1].t - k.t)).abs();
    }
    return tv;
}

std::string path_to_csv(const PiecewisePath& p, const FilteredSpace& sp, const std::string& name) {
    std::ostringstream os;
    for (size_t a = 0; a < p.atom.size(); ++a) {
        for (const auto& k : p.atom[a].knots)
            os << name << ',' << sp.atom_ids[a] << ',' << k.t.to_string() << ','
               << k.left.to_string() << ',' << k.value.to_string() << ','
               << k.start.to_string() << ',' << k.slope.to_string() << '\n';
        os << name << ',' << sp.atom_ids[a] << ",inf,"
           << p.atom[a].at_inf.to_string() << ',' << p.atom[a].at_inf.to_string() << ','
           << p.atom[a].at_inf.to_string() << ",0\n";
    }
    return os.str();
}

std::string path_to_json_text(const PiecewisePath& p, const FilteredSpace& sp) {
    std::ostringstream os;
    os << "{\"atoms\":{";
    for (size_t a = 0; a < p.atom.size(); ++a) {
        os << (a ? "," : "") << "\"" << sp.atom_ids[a] << "\":{\"knots\":[";
        for (size_t k = 0; k < p.atom[a].knots.size(); ++k) {
            const PathKnot& kn = p.atom[a].knots[k];
            os << (k ? "," : "") << "[\"" << kn.t.to_string() << "\",\"" << kn.left.to_string()
               << "\",\"" << kn.value.to_string() << "\",\"" << kn.start.to_string() << "\",\""
               << kn.slope.to_string() << "\"]";
        }
        os << "],\"at_inf\":\"" << p.atom[a].at_inf.to_string() << "\"}";
    }
    os << "}}";
    return os.str();
}

PiecewisePath martingale_from_terminal(const std::vector<Rational>& terminal,
                                       const FilteredSpace& sp,
                                       const std::vector<Rational>& times) {
    std::vector<std::vector<Rational>> level(sp.n_grid() + 1);
    level[0] = sp.cell_average(terminal, -1);
    for (int k = 0; k < sp.n_grid(); ++k) level[k + 1] = sp.cell_average(terminal, k);

    std::set<Rational> tset(times.begin(), times.end());
    for (const auto& g : sp.grid) tset.insert(g);

    PiecewisePath p;
    p.atom.resize(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        for (const auto& t : tset) {
            TimePoint tp = TimePoint::at(t);
            Rational v = level[sp.index_at(tp) + 1][a];
            Rational l = level[sp.index_before(tp) + 1][a];
            p.atom[a].knots.push_back(PathKnot{t, l, v, v, Rational(0)});
        }
        p.atom[a].at_inf = level[sp.n_grid()][a];
    }
    p.adapted = true;
    p.cadlag = true;
    return p;
}

MartingaleVerdict is_martingale(const PiecewisePath& x, const FilteredSpace& sp) {
    MartingaleVerdict v;
    v.max_residual = Rational(0);
    auto bump = [&](const Rational& r) { v.max_residual = max(v.max_residual, r.abs()); };

    if (!check_adapted(x, sp)) { v.max_residual = Rational(1); return v; }

    std::vector<Rational> times = merged_knot_times({&x});
    std::set<Rational> tset(times.begin(), times.end());
    for (const auto& g : sp.grid) tset.insert(g);
    PiecewisePath r = reknot(x, std::vector<Rational>(tset.begin(), tset.end()));
    std::vector<Rational> all(tset.begin(), tset.end());

    std::set<Rational> gridset(sp.grid.begin(), sp.grid.end());
    for (size_t k = 0; k < all.size(); ++k) {
        bool on_grid = gridset.count(all[k]) > 0;
        for (int a = 0; a < sp.n_atoms(); ++a) {
            const PathKnot& kn = r.atom[a].knots[k];
            if (!on_grid) bump(kn.value - kn.left);      // no jumps off the grid
            bump(kn.start - kn.value);                   // flat to the right of any knot
            bump(kn.slope);
            if (k + 1 < all.size()) {                    // left limits consistent
                bump(r.atom[a].knots[k + 1].left - (kn.start + kn.slope * (all[k + 1] - kn.t)));
            }
        }
    }

    // one-step conditional expectations along the grid, and the jump at 0
    for (int k = -1; k + 1 < sp.n_grid(); ++k) {
        TimePoint next = TimePoint::at(sp.grid[k + 1]);
        std::vector<Rational> vals(sp.n_atoms());
        for (int a = 0; a < sp.n_atoms(); ++a) vals[a] = r.eval(a, next);
        std::vector<Rational> cond = sp.cell_average(vals, k);
        for (int a = 0; a < sp.n_atoms(); ++a) {
            Rational prev = k >= 0 ? r.eval(a, TimePoint::at(sp.grid[k]))
                                   : r.left_limit(a, TimePoint::at(Rational(0)));
            bump(cond[a] - prev);
        }
    }
    for (int a = 0; a < sp.n_atoms(); ++a)
        bump(r.atom[a].at_inf - r.eval(a, TimePoint::at(sp.grid.back())));

    v.is_martingale = v.max_residual.is_zero();
    return v;
}

} // namespace enlab
