// path.hpp — per-atom piecewise-affine process paths on [0, inf].
//
// A knot at time t records the left limit, the value at t, the starting value
// of the following open segment, and that segment's slope.  Cadlag paths have
// start == value at every knot; the supermartingale Ztilde is the one resident
// that genuinely needs start != value (its value at an atom of tau exceeds the
// right limit).
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "enlab/space.hpp"

namespace enlab {

struct PathKnot {
    Rational t;
    Rational left;     // lim_{s -> t-}
    Rational value;    // X_t
    Rational start;    // right limit at t (intercept of the following segment)
    Rational slope;    // on the open interval up to the next knot

    static PathKnot flat(Rational t, const Rational& v) {
        return PathKnot{std::move(t), v, v, v, Rational(0)};
    }
};

struct AtomPath {
    std::vector<PathKnot> knots;   // strictly increasing times, first at 0
    Rational at_inf;               // limit value at t = inf

    Rational eval(const TimePoint& t) const;
    Rational left_limit(const TimePoint& t) const;
    Rational jump(const TimePoint& t) const;      // eval - left_limit (0 at inf)
    int knot_index(const Rational& t) const;      // last knot with knot.t <= t
};

struct PiecewisePath {
    std::vector<AtomPath> atom;

    // advisory flags; check_* recomputes them from the data
    bool adapted = false;
    bool predictable = false;
    bool increasing = false;
    bool cadlag = true;

    Rational eval(int a, const TimePoint& t) const { return atom[a].eval(t); }
    Rational left_limit(int a, const TimePoint& t) const { return atom[a].left_limit(t); }
    Rational jump(int a, const TimePoint& t) const { return atom[a].jump(t); }
};

// Sorted union of all knot times appearing in the given paths.
std::vector<Rational> merged_knot_times(const std::vector<const PiecewisePath*>& paths);

// Rebuild the path on a knot superset (values unchanged).  `times` must
// contain every existing knot time.
PiecewisePath reknot(const PiecewisePath& p, const std::vector<Rational>& times);

PiecewisePath path_constant(int n_atoms, const Rational& c);
PiecewisePath path_add(const PiecewisePath& a, const PiecewisePath& b);
PiecewisePath path_sub(const PiecewisePath& a, const PiecewisePath& b);
PiecewisePath path_scale(const PiecewisePath& a, const Rational& c);
bool path_equal(const PiecewisePath& a, const PiecewisePath& b);

bool check_cadlag(const PiecewisePath& p);
bool check_increasing(const PiecewisePath& p);
bool check_adapted(const PiecewisePath& p, const FilteredSpace& sp);
bool check_predictable(const PiecewisePath& p, const FilteredSpace& sp);

// Total variation over [0, inf] (jumps plus absolute slope mass).
Rational total_variation(const AtomPath& p);

// CSV rows: atom,time,left,value,start,slope with a final "inf" row per atom.
std::string path_to_csv(const PiecewisePath& p, const FilteredSpace& sp, const std::string& name);

// JSON: {"atoms": {"<id>": {"knots": [[t,left,value,start,slope]...], "at_inf": v}}}
std::string path_to_json_text(const PiecewisePath& p, const FilteredSpace& sp);

// Martingale with the given terminal (F_infinity-conditional) values,
// sampled on `times` (must contain every grid point).
PiecewisePath martingale_from_terminal(const std::vector<Rational>& terminal,
                                       const FilteredSpace& sp,
                                       const std::vector<Rational>& times);

struct MartingaleVerdict {
    bool is_martingale = false;
    Rational max_residual;   // largest absolute one-step conditional defect
};

// Exact martingale test: adapted, flat between grid refinements, one-step
// conditional expectations match, and the terminal value agrees at infinity.
MartingaleVerdict is_martingale(const PiecewisePath& x, const FilteredSpace& sp);

} // namespace enlab
