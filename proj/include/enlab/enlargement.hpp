// enlargement.hpp — progressive and initial enlargements for purely atomic
// random times, the key lemma, semimartingale drifts, and immersion tests.
//
// Both enlargements share one refined atom set: pairs (base atom, law piece).
// The progressive chain adjoins sigma(tau ^ t); the initial chain adjoins the
// partition (C_n) from time 0.  Times with a density part are rejected; they
// are handled distribution-wise elsewhere.
#pragma once

#include "enlab/honest.hpp"
#include "enlab/random_time.hpp"

namespace enlab {

struct EnlargedSpace {
    FilteredSpace space;              // the enlarged filtered space
    std::vector<int> base_atom;       // enlarged atom -> base atom
    std::vector<int> piece;           // enlarged atom -> leaf-law piece index
    std::vector<TimePoint> tau_value; // enlarged atom -> value of tau

    PiecewisePath lift(const PiecewisePath& base_path) const;
    std::vector<Rational> lift_values(const std::vector<Rational>& v) const;
    StoppingTime tau_as_stopping_time() const;
};

EnlargedSpace enlarge_progressive(const FilteredSpace& sp, const RandomTime& tau);

// initial enlargement by the atomic sigma-field of the given partition events
// (canonical overload: the partition of tau's own exhausting system)
EnlargedSpace enlarge_initial(const FilteredSpace& sp, const RandomTime& tau);
EnlargedSpace enlarge_initial(const FilteredSpace& sp, const RandomTime& tau,
                              const std::vector<Event>& parts);

// E[X | F^tau_t] evaluated two ways: directly on the enlarged space, and via
// E[X 1_{C_n} | F_t] / z^n_t on {t >= T_n} n C_n.  Exact residual.
struct KeyLemmaReport {
    Rational max_residual;
    int checks = 0;
};
KeyLemmaReport key_lemma_evaluate(const RandomVariable& x, const RandomTime& tau,
                                  const FilteredSpace& sp, const EnlargedSpace& enl,
                                  const Rational& t);

struct DriftReport {
    PiecewisePath drift;          // predictable finite-variation part, on the enlarged space
    PiecewisePath compensated;
    bool martingale = false;
    Rational max_residual;
};

// one-step predictable covariation Delta<U,V>_t = E[dU_t dV_t | F_{t-}] at
// every grid point (index 0 conditions on the trivial sigma-field)
std::vector<std::vector<Rational>> discrete_bracket(const PiecewisePath& u, const PiecewisePath& v,
                                                    const FilteredSpace& sp);

// stochastic integral (G . Y)_t = sum_{s <= t} G_s dY_s on the enlarged space
PiecewisePath integrate_against(const PiecewisePath& g, const PiecewisePath& y_lifted,
                                const EnlargedSpace& enl);

DriftReport drift_thin(const PiecewisePath& Y, const PiecewisePath& G,
                       const RandomTime& tau, const FilteredSpace& sp,
                       const EnlargedSpace& enl);

DriftReport drift_jacod(const PiecewisePath& X, const RandomTime& tau,
                        const FilteredSpace& sp, const EnlargedSpace& enl_initial);

struct HonestDriftReport : DriftReport {
    bool coincides_with_thin = false;   // against drift_thin with G == 1
};

HonestDriftReport drift_honest(const PiecewisePath& M, const RandomTime& tau,
                               const FilteredSpace& sp, const EnlargedSpace& enl);

// {"drift": <path>, "residual": "p/q", "verdict": "martingale"|"not-martingale"}
std::string drift_report_to_json_text(const DriftReport& rep, const EnlargedSpace& enl);

struct ImmersionReport {
    bool immersed = false;               // Z == P(tau > . | F_infinity) as paths
    bool has_thin_conditions = false;    // the three equivalent criteria below
    bool cond_terminal = false;          // z^n stays at z^n_{T_n} forever
    bool cond_stopped = false;           // z^n = z^n stopped at T_n
    bool cond_factorization = false;     // C_n independent of F_infinity given F_{T_n}
    bool immersed_thin_part = false;
    bool immersed_thick_part = false;
    bool split_consistent = false;       // immersed == (thin part && thick part)
};

ImmersionReport immersion_test(const RandomTime& tau, const FilteredSpace& sp);

struct AfterTimeTransferReport {
    bool martingale_initial = false;
    bool martingale_progressive = false;
    bool verdicts_agree = false;
    bool stopping_closure = true;   // theta v tau is a progressive stopping time
};

// For Y vanishing on [0, tau]: the martingale property under the initial and
// the progressive enlargement must agree, and theta v tau must be a stopping
// time of the progressive chain for every supplied initial-chain theta.
AfterTimeTransferReport after_time_transfer_check(const PiecewisePath& y_enlarged,
                                                  const EnlargedSpace& enl_prog,
                                                  const EnlargedSpace& enl_init,
                                                  const std::vector<StoppingTime>& thetas);

// the progressive enlargement by tau equals the two-step enlargement through
// its thin-thick decomposition, as partition chains
bool iterated_enlargement_consistent(const FilteredSpace& sp, const RandomTime& tau);

// the initially-compensated martingale, optionally projected onto the
// progressive chain, differs from the progressively-compensated one by a
// martingale of the progressive chain
Rational restriction_consistency_defect(const PiecewisePath& X, const RandomTime& tau,
                                        const FilteredSpace& sp);

} // namespace enlab
