// space.hpp — finite filtered probability spaces.
//
// The sample space is a finite set of weighted tree atoms crossed with one
// auxiliary uniform coordinate u in [0,1].  The filtration is piecewise
// constant and right-continuous: F_t equals the partition in force at the
// largest grid point <= t, and it never sees u.  The partition at the last
// grid index is F_infinity.
#pragma once

#include <string>
#include <vector>

#include "enlab/errors.hpp"
#include "enlab/rational.hpp"
#include "enlab/timepoint.hpp"

namespace enlab {

struct Partition {
    std::vector<int> cell_of;                // atom index -> cell id
    std::vector<std::vector<int>> cells;     // cell id -> sorted atom indices

    static Partition from_cell_of(std::vector<int> cell_of);
    int n_cells() const { return (int)cells.size(); }
    bool refines(const Partition& coarser) const;
    bool operator==(const Partition& o) const;   // same grouping, up to cell relabeling
};

// Piecewise-polynomial function of the auxiliary uniform, per atom.
// Plain (u-independent) variables are single constant pieces on [0,1).
struct PolyPiece {
    Rational u0, u1;                 // half-open [u0, u1)
    std::vector<Rational> coef;      // value(u) = sum_k coef[k] * u^k

    Rational value_at(const Rational& u) const;
    Rational integral() const;       // over [u0, u1)
    Rational integral(const Rational& a, const Rational& b) const;  // over [a,b) within the piece
};

struct RandomVariable {
    std::vector<std::vector<PolyPiece>> atom;    // size = n_atoms

    static RandomVariable constant(int n_atoms, const Rational& c);
    static RandomVariable from_values(std::vector<Rational> values);
    bool is_plain() const;                        // u-independent on every atom
    Rational plain_value(int a) const;            // requires single constant piece
    Rational mean(int a) const;                   // integral over [0,1)
    Rational integral(int a, const Rational& u0, const Rational& u1) const;
};

struct StoppingTime {
    std::vector<TimePoint> value;   // per atom
};

struct StoppingClassification {
    bool stopping = false;
    bool predictable = false;
};

class FilteredSpace {
public:
    std::vector<std::string> atom_ids;
    std::vector<Rational> weights;
    std::vector<Rational> grid;           // strictly increasing, grid[0] == 0
    std::vector<Partition> partitions;    // one per grid index; last is F_infinity

    int n_atoms() const { return (int)atom_ids.size(); }
    int n_grid() const { return (int)grid.size(); }

    // Partition index in force at time t; Infinity and t >= last grid point
    // both map to the last index.
    int index_at(const TimePoint& t) const;
    // Index for F_{t-}: grid point t_k (k >= 1) -> k-1, t == 0 -> -1 (trivial
    // sigma-field), interior t -> index_at(t), Infinity -> last.
    int index_before(const TimePoint& t) const;

    // k may be -1 (trivial partition with a single cell).
    const Partition& partition(int k) const;

    int leaf_of(int a) const { return partitions.back().cell_of[a]; }
    Rational cell_weight(int k, int cell) const;

    // Exact conditional expectation onto partition k (k = -1 allowed):
    // result is constant on every cell.
    std::vector<Rational> cell_average(const std::vector<Rational>& per_atom, int k) const;

    void validate() const;      // throws Error on any invariant violation

private:
    mutable Partition trivial_;  // lazily sized single-cell partition
};

FilteredSpace build_space(std::vector<std::string> atom_ids,
                          std::vector<Rational> weights,
                          std::vector<Rational> grid,
                          std::vector<std::vector<std::vector<int>>> partition_cells);

// E[X | F_{grid k}] as a RandomVariable (constant per cell, u-independent).
RandomVariable condition(const RandomVariable& x, const FilteredSpace& sp, int k);

StoppingClassification is_stopping_time(const StoppingTime& T, const FilteredSpace& sp);

// Atoms of the sigma-field F_T at a stopping time T, as a partition of the
// tree atoms.  Requires T to be a stopping time.
Partition sigma_field_at(const StoppingTime& T, const FilteredSpace& sp);

// JSON space schema: {"grid":[...], "atoms":[{"id","p"}], "partitions":[[[ids]]]}
FilteredSpace space_from_json_text(const std::string& text);
std::string space_to_json_text(const FilteredSpace& sp);

} // namespace enlab
