// verify.hpp — exact identity suites over a model or a randomized corpus.
// Every check carries a stable tag naming the identity it guards; a failing
// check reports the instance seed so the case can be replayed.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enlab/random_time.hpp"

namespace enlab {

struct CheckResult {
    std::string tag;
    uint64_t seed = 0;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::vector<CheckResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
    int failures() const {
        int n = 0;
        for (const auto& r : results) n += !r.pass;
        return n;
    }
};

// Identity checks on one (space, time) model. When `fixture` is given, the
// bundle identities are evaluated on the supplied paths instead of the
// recomputed ones, so a corrupted fixture trips the corresponding tag.
SuiteReport verify_bundle(const FilteredSpace& sp, const RandomTime& tau,
                          uint64_t seed = 0, const TimeProcessBundle* fixture = nullptr);

SuiteReport verify_decomposition(const FilteredSpace& sp, const RandomTime& tau, uint64_t seed = 0);

// drift formulas need their own corpus (atomic thin times, martingales,
// predictable integrands): one seeded instance per call
SuiteReport verify_drift_instance(uint64_t seed);

SuiteReport verify_honest_instance(uint64_t seed);

// honest-suite checks on a given model; empty when the time is not honest
// (the certificate itself is still reported)
SuiteReport verify_honest_model(const FilteredSpace& sp, const RandomTime& tau, uint64_t seed,
                                bool expect_honest);

SuiteReport verify_immersion(const FilteredSpace& sp, const RandomTime& tau, uint64_t seed = 0);

// named suite over a seeded corpus: bundle | decomposition | drift | honest |
// immersion | all
SuiteReport verify_suite(const std::string& suite, int instances, uint64_t seed);

bool known_suite(const std::string& suite);

} // namespace enlab
