// acceptance suite: the exit gate, one line per criterion
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enlab/simulators.hpp"
#include "enlab/verify.hpp"

using namespace enlab;
namespace fs = std::filesystem;

namespace {

constexpr uint64_t BASE_SEED = 20240801;
constexpr int INSTANCES = 200;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void line(const char* name, bool pass, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name, detail.empty() ? "" : " — ",
                detail.c_str());
    std::fflush(stdout);
}

int count_failures(const SuiteReport& rep, std::string& first_detail) {
    int n = 0;
    for (const auto& r : rep.results)
        if (!r.pass) {
            if (n == 0)
                first_detail = r.tag + " seed=" + std::to_string(r.seed) +
                               (r.detail.empty() ? "" : " " + r.detail);
            ++n;
        }
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("criterion: exact identity suite on 200 randomized instances") {
    Stopwatch sw;
    SuiteReport rep = verify_suite("bundle", INSTANCES, BASE_SEED);
    std::string detail;
    int fails = count_failures(rep, detail);
    double secs = sw.seconds();
    std::ostringstream os;
    os << rep.results.size() << " checks, " << fails << " failures, "
       << (int)(secs * 1000) << " ms";
    bool pass = fails == 0 && secs < 60.0;
    line("exact identity suite (bundle, reconstruction, additivity, conditional laws, key lemma)",
         pass, os.str() + (detail.empty() ? "" : "; first: " + detail));
    CHECK(fails == 0);
    CHECK(secs < 60.0);
}

TEST_CASE("criterion: decomposition suite") {
    SuiteReport rep = verify_suite("decomposition", INSTANCES, BASE_SEED);
    std::string detail;
    int fails = count_failures(rep, detail);
    std::ostringstream os;
    os << rep.results.size() << " checks, " << fails << " failures";
    line("thin-thick decomposition suite", fails == 0,
         os.str() + (detail.empty() ? "" : "; first: " + detail));
    CHECK(fails == 0);
}

TEST_CASE("criterion: drift suite") {
    SuiteReport rep = verify_suite("drift", INSTANCES, BASE_SEED);
    // the honest-drift half lives in the honest corpus
    SuiteReport honest = verify_suite("honest", INSTANCES, BASE_SEED);
    for (const auto& r : honest.results)
        if (r.tag.rfind("drift:", 0) == 0) rep.results.push_back(r);
    std::string detail;
    int fails = count_failures(rep, detail);
    std::ostringstream os;
    os << rep.results.size() << " checks, " << fails << " failures";
    line("drift suite (progressive, initial, honest, coincidence, restriction)", fails == 0,
         os.str() + (detail.empty() ? "" : "; first: " + detail));
    CHECK(fails == 0);
}

TEST_CASE("criterion: honest suite") {
    SuiteReport rep = verify_suite("honest", INSTANCES, BASE_SEED);
    std::string detail;
    int fails = count_failures(rep, detail);
    int jumping_model_violations = 0;   // ThickHonestOnJumpingFiltration occurrences
    for (const auto& r : rep.results)
        if (r.tag == "honest:thin-on-jumping-filtration" && !r.pass) ++jumping_model_violations;
    std::ostringstream os;
    os << rep.results.size() << " checks, " << fails << " failures, "
       << jumping_model_violations << " thick-honest occurrences";
    line("honest suite (unit tilde at tau, part criteria, family identities, jumping exhaustion)",
         fails == 0 && jumping_model_violations == 0,
         os.str() + (detail.empty() ? "" : "; first: " + detail));
    CHECK(fails == 0);
    CHECK(jumping_model_violations == 0);
}

TEST_CASE("criterion: immersion suite") {
    SuiteReport rep = verify_suite("immersion", INSTANCES, BASE_SEED);
    std::string detail;
    int fails = count_failures(rep, detail);
    std::ostringstream os;
    os << rep.results.size() << " checks, " << fails << " failures";
    line("immersion suite (criteria consistency, decomposition equivalence)", fails == 0,
         os.str() + (detail.empty() ? "" : "; first: " + detail));
    CHECK(fails == 0);
}

TEST_CASE("criterion: Monte Carlo quantitative") {
    Stopwatch sw;
    SimReport br = simulate_brownian_last_zero(1.0, std::ldexp(1.0, -10), 100000, BASE_SEED);
    double brownian_secs = sw.seconds();
    double target = 0.5;
    double gap = std::abs(br.point_estimate - target);
    bool brownian_ok = gap <= 3.0 * br.std_error && brownian_secs < 300.0;
    {
        std::ostringstream os;
        os << "estimate " << br.point_estimate << " vs " << target << ", 3se "
           << 3.0 * br.std_error << ", " << (int)brownian_secs << " s";
        line("Monte Carlo (i): last zero before one, arcsine tail at one half", brownian_ok,
             os.str());
    }
    CHECK(brownian_ok);

    SimReport cp = simulate_cpp_last_passage(1.0, JumpLaw{"fixed", -1.0, 1.0}, 1.0, 0.0, 10.0,
                                             100000, BASE_SEED);
    bool cpp_ok = std::abs(cp.point_estimate - 1.0) <= 3.0 * std::max(cp.std_error, 0.0);
    {
        std::ostringstream os;
        os << "thin-mass estimate " << cp.point_estimate << ", se " << cp.std_error;
        line("Monte Carlo (ii): compound Poisson last passage lands on the graph family", cpp_ok,
             os.str());
    }
    CHECK(cpp_ok);

    CoxScenario sc;
    sc.space = build_space({"a", "b"}, {rat(1, 2), rat(1, 2)}, {Rational(0), Rational(1)},
                           {{{0, 1}}, {{0}, {1}}});
    sc.intensity = {{rat(1, 4), rat(1, 4)}, {rat(1, 2), rat(1, 8)}};
    sc.accessible.value = {TimePoint::at(2), TimePoint::at(3)};
    CoxResult cox = simulate_cox_accessible(sc, 100000, BASE_SEED);
    bool cox_ok = cox.exact_immersed;
    double worst = 0.0;
    const SimCurve& mc = cox.report.curves[0];
    for (size_t i = 0; i < mc.times.size(); ++i) {
        double g = std::abs(mc.values[i] - cox.exact_curve[i]);
        worst = std::max(worst, g - 3.0 * mc.se[i]);
        if (g > 3.0 * mc.se[i] + 1e-12) cox_ok = false;
    }
    {
        std::ostringstream os;
        os << "worst gap minus 3se " << worst << ", twin immersed "
           << (cox.exact_immersed ? "yes" : "no");
        line("Monte Carlo (iii): mixed hazard/stopping-time model matches its exact twin", cox_ok,
             os.str());
    }
    CHECK(cox_ok);
}

TEST_CASE("criterion: reproducibility of command-line runs") {
    const std::string cli = ENLAB_CLI_PATH;
    fs::path dir = fs::temp_directory_path() / ("enlab_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path scen = dir / "cpp.json";
    std::ofstream(scen) << R"({"kind": "cpp", "rate": 1.0, "drift": 1.0, "barrier": 0.0,
        "horizon": 6.0, "jump": {"kind": "fixed", "size": -1.0}})";

    auto run = [&](const fs::path& out) {
        std::string cmd = cli + " simulate " + scen.string() + " --n 20000 --seed 12345 --out " +
                          out.string() + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    int r1 = run(dir / "one");
    int r2 = run(dir / "two");
    bool same = r1 == 0 && r2 == 0 &&
                slurp(dir / "one" / "report.json") == slurp(dir / "two" / "report.json") &&
                slurp(dir / "one" / "curves.csv") == slurp(dir / "two" / "curves.csv");
    line("reproducibility: identical invocations give byte-identical reports", same);
    CHECK(same);
    fs::remove_all(dir);
}
