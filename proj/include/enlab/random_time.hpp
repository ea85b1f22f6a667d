// random_time.hpp — random times on a finite filtered space, their associated
// processes, thin/thick classification and decomposition, and exhausting
// systems for the thin part.
//
// A random time is specified per F_infinity-leaf as a finite list of time
// atoms (possibly one at infinity) plus disjoint step-density segments; the
// auxiliary uniform realizes the law through its quantile coupling, laid out
// in time order.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "enlab/path.hpp"
#include "enlab/projection.hpp"
#include "enlab/space.hpp"

namespace enlab {

struct LawPiece {
    bool is_atom = true;
    TimePoint t;                  // atom location (finite or inf)
    Rational p;                   // atom mass
    Rational a, b, level;         // density segment (a,b) with constant level
    Rational u0, u1;              // canonical quantile layout

    Rational mass() const { return is_atom ? p : level * (b - a); }
};

struct LeafLaw {
    std::vector<LawPiece> pieces;   // canonical: time-ordered, split at atoms

    Rational surv_gt(const Rational& t) const;    // P(tau > t)
    Rational surv_lt(const Rational& t) const;    // P(tau < t)
    Rational atom_mass_at(const Rational& t) const;
    Rational density_level_at(const Rational& t) const;   // level in force just after t
    Rational mass_at_inf() const;
    Rational total_mass() const;
};

// builds the canonical layout; throws on overlaps, negative masses, bad totals
LeafLaw make_leaf_law(std::vector<std::pair<TimePoint, Rational>> atoms,
                      std::vector<std::array<Rational, 3>> density);

struct RandomTime {
    std::vector<LeafLaw> per_leaf;    // indexed by F_infinity cell id

    bool is_atomic() const;
    void validate(const FilteredSpace& sp) const;
    // all finite atom times and density endpoints, sorted, deduplicated
    std::vector<Rational> breakpoints() const;
    bool operator==(const RandomTime& o) const;
};

// measurable subset of (atom x law-piece x u), up to null sets
struct Event {
    struct Part {
        std::vector<int> atom_pieces;                          // law piece indices (atoms only)
        std::vector<std::pair<Rational, Rational>> density;    // sub-intervals (x,y]
    };
    std::vector<Part> part;   // per tree atom
};

Event event_none(const FilteredSpace& sp);
Event event_tau_eq(const RandomTime& tau, const FilteredSpace& sp, const StoppingTime& T);   // {tau = T < inf}
Event event_tau_inf(const RandomTime& tau, const FilteredSpace& sp);                          // {tau = inf}
Event event_tau_gt(const RandomTime& tau, const FilteredSpace& sp, const Rational& t);        // {tau > t}
Event event_tau_in(const RandomTime& tau, const FilteredSpace& sp,
                   const Rational& x, const Rational& y);                                     // {x < tau <= y}
Event event_intersect(const Event& e1, const Event& e2, const RandomTime& tau);
std::vector<Rational> event_cond_mass(const Event& e, const RandomTime& tau, const FilteredSpace& sp);
Rational event_mass(const Event& e, const RandomTime& tau, const FilteredSpace& sp);

struct TimeProcessBundle {
    PiecewisePath Z;        // P(tau >  t | F_t)
    PiecewisePath Ztilde;   // P(tau >= t | F_t)
    PiecewisePath Ao;       // dual optional projection of 1_{[tau, inf)}
    PiecewisePath Ap;       // dual predictable projection
    PiecewisePath m;        // Z + Ao
};

TimeProcessBundle associated_processes(const RandomTime& tau, const FilteredSpace& sp);

// raw (non-adapted) conditional CDF path of tau, aggregated over u
PiecewisePath raw_indicator_path(const RandomTime& tau, const FilteredSpace& sp);

enum class TimeKind { thin, thick, mixed, infinite };

struct Classification {
    Rational thin_mass;     // P(jump of Ao at tau > 0)
    Rational thick_mass;    // P(jump of Ao at tau = 0, tau < inf)
    TimeKind kind;
};

Classification classify(const RandomTime& tau, const FilteredSpace& sp);

struct Decomposition {
    RandomTime thin;    // tau on {dAo_tau > 0}, inf elsewhere
    RandomTime thick;   // tau on {dAo_tau = 0}, inf elsewhere
};

Decomposition thin_thick_decompose(const RandomTime& tau, const FilteredSpace& sp);

struct TripleDecomposition {
    RandomTime thin_accessible;     // dAo_tau > 0 and dAp_tau > 0
    RandomTime thin_inaccessible;   // dAo_tau > 0 and dAp_tau = 0
    RandomTime thick;
};

TripleDecomposition triple_decompose(const RandomTime& tau, const FilteredSpace& sp);

struct ExhaustingSystem {
    std::vector<StoppingTime> T;       // T[0] identically infinite
    std::vector<Event> C;              // C[0] = {tau = inf}
    std::vector<PiecewisePath> z;      // z[n]_t = P(C_n | F_t)
    RandomTime time;                   // the exhausted thin time
};

// canonical system (constant stopping times at the support) or validation of
// a user-supplied sequence; throws NotThin / NotStoppingTime /
// GraphsNotDisjoint / NotCovering
ExhaustingSystem exhausting_system(const RandomTime& thin_time, const FilteredSpace& sp,
                                   const std::vector<StoppingTime>* user_T = nullptr);

// internal consistency: disjoint graphs, covering, sum z == 1, positivity on
// the carrying cells; returns largest defect (exact 0 when valid)
Rational exhausting_defect(const ExhaustingSystem& sys, const FilteredSpace& sp);

// reconstruction identities for Ztilde, Z, Ao, m from the system
Rational reconstruction_defect(const ExhaustingSystem& sys, const TimeProcessBundle& b,
                               const FilteredSpace& sp);

ExhaustingSystem merge_exhausting(const ExhaustingSystem& A, const ExhaustingSystem& B,
                                  const FilteredSpace& sp);

struct DualEqualityReport {
    bool equal;
    // (time, atom) where the optional and predictable dual jumps differ
    std::vector<std::pair<Rational, int>> witnesses;
    bool inaccessible_condition_vacuous = true;   // no totally inaccessible stopping times here
};

DualEqualityReport dual_equality_test(const RandomTime& tau, const FilteredSpace& sp);

bool pseudo_stopping_test(const RandomTime& tau, const FilteredSpace& sp);

struct CrossConditionalReport {
    Rational max_residual;
    int checks = 0;
};

// conditional-law identities linking the thin and thick parts at time t,
// verified against the generating family of test events
CrossConditionalReport cross_conditional_check(const RandomTime& tau, const FilteredSpace& sp,
                                               const Rational& t);

// JSON schema: {"per_leaf":[{"leaf":[ids],"atoms":[["t","p"]],"density":[["a","b","level"]]}]}
RandomTime random_time_from_json_text(const std::string& text, const FilteredSpace& sp);
std::string random_time_to_json_text(const RandomTime& tau, const FilteredSpace& sp);

} // namespace enlab
