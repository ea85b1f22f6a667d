// honest.hpp — honest-time detection, the running-selection process alpha,
// the thin-honest identities, and the jumping-filtration exhausting sequence.
#pragma once

#include <optional>

#include "enlab/random_time.hpp"

namespace enlab {

// Per-cell selection of the largest tau-support value revealed so far; the
// constructive tau_t.  Levels are nullopt until a value becomes visible.
struct AlphaSelection {
    std::vector<Rational> times;
    std::vector<std::vector<std::optional<Rational>>> level;   // [time index][atom]

    std::optional<Rational> at(int atom, const Rational& t) const;
    std::optional<Rational> left_at(int atom, const Rational& t) const;   // strictly before t
    std::optional<Rational> final_level(int atom) const;
};

AlphaSelection alpha_selection(const RandomTime& tau, const FilteredSpace& sp);

struct HonestCertificate {
    bool honest = false;
    Rational violation_mass;    // P(Ztilde_tau < 1, tau < inf), exact
    PiecewisePath alpha;        // increasing adapted selection path (0 until a value shows)
};

HonestCertificate is_honest(const RandomTime& tau, const FilteredSpace& sp);

struct HonestPartsReport {
    bool thin_part_strict = false;   // Z_tau < 1 everywhere on the thin event
    bool thick_part_unit = false;    // Z_tau = 1 a.e. on the thick event (vacuous when empty)
    bool parts_honest = false;       // both decomposition parts pass is_honest
    Rational thick_mass;
};

HonestPartsReport honest_thick_criterion(const RandomTime& tau, const FilteredSpace& sp);

struct ThinHonestReport {
    Rational max_residual;
    int checks = 0;
};

// On {T_n = tau_t}: z^n = 1 - Z, Ao = z^n_{T_n}, 1 - m = z^n - z^n_{T_n};
// on {T_n < t}: z^n_t = 1_{tau_t = T_n} (1 - Ztilde_t) and the left-limit
// version with 1 - Z_{t-}.  All exact.
ThinHonestReport thin_honest_identities(const RandomTime& tau, const FilteredSpace& sp);

// The exhausting sequence read off alpha and the grid jumping sequence; its
// stopping times live inside the grid intervals and need not be constants.
ExhaustingSystem jumping_exhaust(const RandomTime& tau, const FilteredSpace& sp);

} // namespace enlab
