// projection.hpp — optional/predictable projections and dual projections.
//
// Raw processes arrive here already aggregated over the auxiliary coordinate:
// a raw path per tree atom (so a non-adapted increasing process such as
// 1_{[tau,inf)} is represented by its conditional paths t -> P(tau <= t | atom)).
// Projections then reduce to exact cell averages at the partition in force at
// (or strictly before) each time.
#pragma once

#include "enlab/path.hpp"
#include "enlab/space.hpp"

namespace enlab {

enum class ProjectionKind { optional_kind, predictable_kind };

// Pointwise projection: value at t becomes E[X_t | F_t] (optional) or
// E[X_t | F_{t-}] (predictable).
PiecewisePath project(const PiecewisePath& raw, ProjectionKind kind, const FilteredSpace& sp);

// Dual projection of an increasing raw process with V_{0-} = 0: jumps become
// conditional expectations of the raw jumps (given F_t, resp. F_{t-}), the
// absolutely continuous part keeps its conditional density.  A jump at 0 is
// allowed.
PiecewisePath dual_project(const PiecewisePath& raw, ProjectionKind kind, const FilteredSpace& sp);

// Exhaustive duality audit over the generating family of step processes
// (cell x interval indicators and cell x point masses).  Returns the largest
// absolute defect of E[int H dV] - E[int H dV_proj]; exact zero certifies the
// projection.
Rational duality_defect(const PiecewisePath& raw, const PiecewisePath& projected,
                        ProjectionKind kind, const FilteredSpace& sp);

} // namespace enlab
