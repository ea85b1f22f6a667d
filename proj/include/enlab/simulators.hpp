// simulators.hpp — Monte Carlo companions to the exact engine.  The only part
// of the project allowed to touch floating point; reproducibility is the
// substitute contract: identical (seed, parameters) give bit-identical
// reports regardless of the worker count.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "enlab/random_time.hpp"
#include "enlab/space.hpp"

namespace enlab {

// Philox 4x32-10 counter-based generator: the stream is keyed by
// (seed, stream index), values are pure functions of the counter.
class Philox {
public:
    Philox(uint64_t seed, uint64_t stream);
    uint32_t next_u32();
    uint64_t next_u64();
    double next_unit();      // uniform on (0,1)
    double next_exp();       // rate-1 exponential
    bool next_bit();

private:
    uint32_t key_[2];
    uint32_t ctr_[4];
    uint32_t out_[4];
    int have_ = 0;
    uint32_t bitbuf_ = 0;
    int bits_ = 0;
    void advance();
};

// deterministic chunked parallel-for: chunk boundaries and the merge order are
// fixed, so results are independent of scheduling; worker count is capped by
// ENLARGEMENT_LAB_THREADS
void parallel_chunks(uint64_t n_items, uint64_t chunk_size,
                     const std::function<void(uint64_t lo, uint64_t hi, size_t chunk_index)>& body);

struct SimCurve {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> se;
};

struct SimReport {
    std::string estimator;
    double point_estimate = 0.0;
    double std_error = 0.0;
    bool se_defined = true;
    uint64_t samples = 0;
    uint64_t seed = 0;
    std::vector<SimCurve> curves;
    std::vector<std::pair<std::string, double>> extras;   // ordered, for stable output
    std::vector<std::pair<std::string, std::string>> notes;

    std::string to_json(const std::string& manifest_json = "{}") const;
    std::string curves_csv() const;
};

struct JumpLaw {
    // "fixed": every jump has the given (signed) size; "exponential": sizes
    // are -Exp(mean)
    std::string kind = "fixed";
    double size = -1.0;
    double mean = 1.0;
};

SimReport simulate_cpp_last_passage(double rate, const JumpLaw& law, double drift,
                                    double barrier, double horizon, uint64_t n, uint64_t seed);

SimReport simulate_brownian_last_zero(double horizon, double step, uint64_t n, uint64_t seed);

SimReport simulate_levy_supremum(double alpha, double drift, double horizon,
                                 uint64_t n_steps, uint64_t n, uint64_t seed);

struct CoxScenario {
    FilteredSpace space;
    std::vector<std::vector<Rational>> intensity;   // [grid index][atom], adapted step levels
    StoppingTime accessible;                        // the F-stopping time part
};

struct CoxResult {
    SimReport report;
    RandomTime exact_time;        // the twin model's random time
    Rational exact_thin_mass;
    Rational exact_thick_mass;
    bool exact_immersed = false;
    std::vector<double> exact_curve;    // P(tau > t) at the report times
};

CoxResult simulate_cox_accessible(const CoxScenario& scenario, uint64_t n, uint64_t seed);

// the twin model alone (shared by the simulator and the tests)
RandomTime cox_twin_random_time(const CoxScenario& scenario);

} // namespace enlab
