// enlargement_lab — command-line front end: analyze a (space, time) model,
// run the exact verification suites, or run the Monte Carlo scenarios.
//
// Exit codes: 0 success, 1 verification failure, 2 bad input/schema.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "enlab/enlargement.hpp"
#include "enlab/generator.hpp"
#include "enlab/honest.hpp"
#include "enlab/simulators.hpp"
#include "enlab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace enlab;

namespace {

constexpr const char* TOOL_VERSION = "0.1.0";

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("CannotRead", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& data) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << data;
}

// manifest embedded in every report; deterministic for identical invocations
json make_manifest(const std::string& command, const std::vector<std::string>& inputs,
                   uint64_t seed, const std::vector<std::string>& outputs = {}) {
    json m;
    m["tool"] = "enlargement_lab";
    m["version"] = TOOL_VERSION;
    m["command"] = command;
    m["seed"] = seed;
    json files = json::array();
    for (const auto& f : inputs) {
        json e;
        e["path"] = f;
        e["fnv1a64"] = hex64(fnv1a64(read_file(f)));
        files.push_back(e);
    }
    m["inputs"] = files;
    m["outputs"] = outputs;
    m["run_id"] = hex64(fnv1a64(m.dump()));
    return m;
}

void diag(const std::string& kind, const std::string& message) {
    json d;
    d["error"] = kind;
    d["message"] = message;
    std::cerr << d.dump() << "\n";
}

// ---- analyze ------------------------------------------------------------------

int cmd_analyze(const std::string& space_file, const std::string& tau_file,
                const std::string& out_dir, const std::string& decompose_mode) {
    FilteredSpace sp = space_from_json_text(read_file(space_file));
    RandomTime tau = random_time_from_json_text(read_file(tau_file), sp);

    json manifest = make_manifest("analyze", {space_file, tau_file}, 0,
                                  {"report.json", "bundle.csv"});

    TimeProcessBundle b = associated_processes(tau, sp);
    std::ostringstream csv;
    csv << "process,atom,time,left,value,start,slope\n";
    csv << path_to_csv(b.Z, sp, "Z") << path_to_csv(b.Ztilde, sp, "Ztilde")
        << path_to_csv(b.Ao, sp, "Ao") << path_to_csv(b.Ap, sp, "Ap")
        << path_to_csv(b.m, sp, "m");
    write_file(fs::path(out_dir) / "bundle.csv", csv.str());

    json report;
    report["schema"] = "enlargement-lab/report/v1";
    report["manifest"] = manifest;

    Classification cls = classify(tau, sp);
    report["classification"] = {
        {"thin_mass", cls.thin_mass.to_string()},
        {"thick_mass", cls.thick_mass.to_string()},
        {"kind", cls.kind == TimeKind::thin      ? "thin"
                 : cls.kind == TimeKind::thick   ? "thick"
                 : cls.kind == TimeKind::mixed   ? "mixed"
                                                 : "infinite"}};

    Decomposition dec = thin_thick_decompose(tau, sp);
    report["decomposition"] = {
        {"thin", json::parse(random_time_to_json_text(dec.thin, sp))},
        {"thick", json::parse(random_time_to_json_text(dec.thick, sp))}};
    if (decompose_mode == "triple") {
        TripleDecomposition tri = triple_decompose(tau, sp);
        report["triple_decomposition"] = {
            {"thin_accessible", json::parse(random_time_to_json_text(tri.thin_accessible, sp))},
            {"thin_inaccessible", json::parse(random_time_to_json_text(tri.thin_inaccessible, sp))},
            {"thick", json::parse(random_time_to_json_text(tri.thick, sp))}};
    }

    HonestCertificate cert = is_honest(tau, sp);
    report["honest"] = {{"honest", cert.honest},
                        {"violation_mass", cert.violation_mass.to_string()}};
    if (cert.honest) {
        report["honest"]["alpha"] = json::parse(path_to_json_text(cert.alpha, sp));
        write_file(fs::path(out_dir) / "alpha.csv",
                   "process,atom,time,left,value,start,slope\n" + path_to_csv(cert.alpha, sp, "alpha"));
    }

    ImmersionReport imm = immersion_test(tau, sp);
    report["immersion"] = {{"immersed", imm.immersed},
                           {"thin_part", imm.immersed_thin_part},
                           {"thick_part", imm.immersed_thick_part},
                           {"split_consistent", imm.split_consistent}};
    report["pseudo_stopping"] = pseudo_stopping_test(tau, sp);
    {
        DualEqualityReport de = dual_equality_test(tau, sp);
        json witnesses = json::array();
        for (const auto& [t, a] : de.witnesses)
            witnesses.push_back({{"time", t.to_string()}, {"atom", sp.atom_ids[a]}});
        report["dual_projections_equal"] = {{"equal", de.equal}, {"witnesses", witnesses}};
    }

    write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
    std::cout << "wrote " << (fs::path(out_dir) / "report.json").string() << " and bundle.csv\n";
    return 0;
}

// ---- verify -------------------------------------------------------------------

TimeProcessBundle bundle_from_csv(const std::string& text, const FilteredSpace& sp) {
    // parse rows written by analyze: process,atom,time,left,value,start,slope
    std::map<std::string, PiecewisePath> paths;
    for (const char* name : {"Z", "Ztilde", "Ao", "Ap", "m"}) {
        PiecewisePath p;
        p.atom.resize(sp.n_atoms());
        paths[name] = p;
    }
    std::map<std::string, int> atom_index;
    for (int a = 0; a < sp.n_atoms(); ++a) atom_index[sp.atom_ids[a]] = a;

    std::istringstream in(text);
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 7) fail("BadFixture", "bundle row needs 7 fields");
        auto it = paths.find(f[0]);
        if (it == paths.end()) fail("BadFixture", "unknown process " + f[0]);
        auto ai = atom_index.find(f[1]);
        if (ai == atom_index.end()) fail("UnknownAtomId", f[1]);
        AtomPath& ap = it->second.atom[ai->second];
        if (f[2] == "inf") {
            ap.at_inf = Rational::parse(f[3]);
        } else {
            ap.knots.push_back(PathKnot{Rational::parse(f[2]), Rational::parse(f[3]),
                                        Rational::parse(f[4]), Rational::parse(f[5]),
                                        Rational::parse(f[6])});
        }
    }
    TimeProcessBundle b;
    b.Z = paths["Z"];
    b.Ztilde = paths["Ztilde"];
    b.Ao = paths["Ao"];
    b.Ap = paths["Ap"];
    b.m = paths["m"];
    return b;
}

int cmd_verify(const std::string& space_file, const std::string& tau_file,
               const std::string& bundle_fixture, const std::string& suite,
               int random_count, uint64_t seed) {
    if (!known_suite(suite)) {
        diag("UnknownSuite", "suite must be bundle|decomposition|drift|honest|immersion|all");
        return 2;
    }
    SuiteReport rep;
    if (!space_file.empty()) {
        FilteredSpace sp = space_from_json_text(read_file(space_file));
        RandomTime tau = random_time_from_json_text(read_file(tau_file), sp);
        if (!bundle_fixture.empty()) {
            TimeProcessBundle fix = bundle_from_csv(read_file(bundle_fixture), sp);
            rep = verify_bundle(sp, tau, seed, &fix);
        } else {
            if (suite == "drift") {
                diag("BadArguments", "the drift suite runs on randomized corpora; use --random");
                return 2;
            }
            if (suite == "bundle" || suite == "all") {
                SuiteReport r = verify_bundle(sp, tau, seed);
                rep.results.insert(rep.results.end(), r.results.begin(), r.results.end());
            }
            if (suite == "decomposition" || suite == "all") {
                SuiteReport r = verify_decomposition(sp, tau, seed);
                rep.results.insert(rep.results.end(), r.results.begin(), r.results.end());
            }
            if (suite == "immersion" || suite == "all") {
                SuiteReport r = verify_immersion(sp, tau, seed);
                rep.results.insert(rep.results.end(), r.results.begin(), r.results.end());
            }
            if (suite == "honest" || suite == "all") {
                SuiteReport r = verify_honest_model(sp, tau, seed, false);
                rep.results.insert(rep.results.end(), r.results.begin(), r.results.end());
            }
        }
    } else {
        rep = verify_suite(suite, random_count, seed);
    }

    int failures = 0;
    for (const auto& r : rep.results) {
        if (!r.pass) {
            ++failures;
            std::cout << "FAIL " << r.tag << " seed=" << r.seed
                      << (r.detail.empty() ? "" : " " + r.detail) << "\n";
        }
    }
    std::cout << (failures ? "FAIL" : "PASS") << " " << rep.results.size() - failures << "/"
              << rep.results.size() << " checks\n";
    return failures ? 1 : 0;
}

// ---- simulate -----------------------------------------------------------------

CoxScenario cox_scenario_from_json(const json& j) {
    CoxScenario sc;
    sc.space = space_from_json_text(j.at("space").dump());
    for (const auto& row : j.at("intensity")) {
        std::vector<Rational> lv;
        for (const auto& v : row) lv.push_back(Rational::parse(v.get<std::string>()));
        sc.intensity.push_back(std::move(lv));
    }
    std::map<std::string, int> atom_index;
    for (int a = 0; a < sc.space.n_atoms(); ++a) atom_index[sc.space.atom_ids[a]] = a;
    sc.accessible.value.assign(sc.space.n_atoms(), TimePoint::inf());
    for (auto it = j.at("accessible").begin(); it != j.at("accessible").end(); ++it) {
        auto ai = atom_index.find(it.key());
        if (ai == atom_index.end()) fail("UnknownAtomId", it.key());
        sc.accessible.value[ai->second] = TimePoint::parse(it.value().get<std::string>());
    }
    return sc;
}

int cmd_simulate(const std::string& scenario_file, uint64_t n, uint64_t seed,
                 const std::string& out_dir) {
    json j = json::parse(read_file(scenario_file));
    if (!j.contains("kind")) fail("MissingKey", "scenario lacks \"kind\"");
    std::string kind = j["kind"].get<std::string>();
    json manifest = make_manifest("simulate", {scenario_file}, seed,
                                  {"report.json", "curves.csv"});

    SimReport rep;
    if (kind == "cpp") {
        JumpLaw law;
        if (j.contains("jump")) {
            law.kind = j["jump"].value("kind", "fixed");
            law.size = j["jump"].value("size", -1.0);
            law.mean = j["jump"].value("mean", 1.0);
        }
        rep = simulate_cpp_last_passage(j.value("rate", 1.0), law, j.value("drift", 1.0),
                                        j.value("barrier", 0.0), j.value("horizon", 10.0), n, seed);
    } else if (kind == "brownian") {
        rep = simulate_brownian_last_zero(j.value("horizon", 1.0),
                                          j.value("step", 1.0 / 1024.0), n, seed);
    } else if (kind == "levy") {
        rep = simulate_levy_supremum(j.value("alpha", 1.5), j.value("drift", -1.0),
                                     j.value("horizon", 1.0), j.value("steps", (uint64_t)512),
                                     n, seed);
    } else if (kind == "cox") {
        CoxResult res = simulate_cox_accessible(cox_scenario_from_json(j), n, seed);
        rep = res.report;
    } else {
        fail("UnknownScenarioKind", kind);
    }

    write_file(fs::path(out_dir) / "report.json", rep.to_json(manifest.dump()));
    write_file(fs::path(out_dir) / "curves.csv", rep.curves_csv());
    std::cout << "wrote " << (fs::path(out_dir) / "report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and Monte Carlo workbench for random times on finite filtered spaces"};
    app.require_subcommand(1);

    std::string space_file, tau_file, out_dir = "out", decompose_mode = "two";
    auto* analyze = app.add_subcommand("analyze", "bundle, classification, decomposition, reports");
    analyze->add_option("space", space_file, "space JSON file")->required();
    analyze->add_option("time", tau_file, "random-time JSON file")->required();
    analyze->add_option("--out", out_dir, "output directory");
    analyze->add_option("--decompose", decompose_mode, "two|triple")
        ->check(CLI::IsMember({"two", "triple"}));

    std::string v_space, v_tau, v_fixture, suite = "all";
    int random_count = 20;
    uint64_t seed = 1;
    auto* verify = app.add_subcommand("verify", "exact identity suites");
    verify->add_option("space", v_space, "space JSON file (omit with --random)");
    verify->add_option("time", v_tau, "random-time JSON file");
    verify->add_option("--bundle-fixture", v_fixture, "bundle.csv to validate instead of recomputing");
    verify->add_option("--suite", suite, "bundle|decomposition|drift|honest|immersion|all");
    verify->add_option("--random", random_count, "number of randomized instances");
    verify->add_option("--seed", seed, "base seed");

    std::string scenario_file;
    uint64_t n = 10000;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo scenarios");
    simulate->add_option("scenario", scenario_file, "scenario JSON file")->required();
    simulate->add_option("--n", n, "number of sample paths");
    simulate->add_option("--seed", seed, "seed");
    simulate->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (app.got_subcommand(analyze))
            return cmd_analyze(space_file, tau_file, out_dir, decompose_mode);
        if (app.got_subcommand(verify)) {
            if (v_space.empty() != v_tau.empty()) {
                diag("BadArguments", "verify needs both space and time files, or neither");
                return 2;
            }
            return cmd_verify(v_space, v_tau, v_fixture, suite, random_count, seed);
        }
        if (app.got_subcommand(simulate)) {
            if (n == 0) {
                diag("InvalidParams", "--n must be at least 1");
                return 2;
            }
            return cmd_simulate(scenario_file, n, seed, out_dir);
        }
    } catch (const Error& e) {
        diag(e.kind, e.what());
        return 2;
    } catch (const std::exception& e) {
        diag("Unhandled", e.what());
        return 2;
    }
    return 2;
}
