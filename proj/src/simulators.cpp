#include "enlab/simulators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "enlab/enlargement.hpp"

namespace enlab {

// --- Philox 4x32-10 -----------------------------------------------------------

namespace {
constexpr uint32_t PHILOX_M0 = 0xD2511F53u;
constexpr uint32_t PHILOX_M1 = 0xCD9E8D57u;
constexpr uint32_t PHILOX_W0 = 0x9E3779B9u;
constexpr uint32_t PHILOX_W1 = 0xBB67AE85u;

inline void philox_round(uint32_t ctr[4], const uint32_t key[2]) {
    uint64_t p0 = (uint64_t)PHILOX_M0 * ctr[0];
    uint64_t p1 = (uint64_t)PHILOX_M1 * ctr[2];
    uint32_t c0 = (uint32_t)(p1 >> 32) ^ ctr[1] ^ key[0];
    uint32_t c1 = (uint32_t)p1;
    uint32_t c2 = (uint32_t)(p0 >> 32) ^ ctr[3] ^ key[1];
    uint32_t c3 = (uint32_t)p0;
    ctr[0] = c0; ctr[1] = c1; ctr[2] = c2; ctr[3] = c3;
}
} // namespace

Philox::Philox(uint64_t seed, uint64_t stream) {
    key_[0] = (uint32_t)(seed & 0xffffffffu) ^ (uint32_t)(stream >> 32);
    key_[1] = (uint32_t)(seed >> 32) ^ (uint32_t)(stream & 0xffffffffu);
    ctr_[0] = ctr_[1] = 0;
    ctr_[2] = (uint32_t)(stream & 0xffffffffu);
    ctr_[3] = (uint32_t)(stream >> 32) ^ 0x243F6A88u;
}

void Philox::advance() {
    uint32_t c[4] = {ctr_[0], ctr_[1], ctr_[2], ctr_[3]};
    uint32_t k[2] = {key_[0], key_[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += PHILOX_W0;
        k[1] += PHILOX_W1;
    }
    out_[0] = c[0]; out_[1] = c[1]; out_[2] = c[2]; out_[3] = c[3];
    if (++ctr_[0] == 0) ++ctr_[1];
    have_ = 4;
}

uint32_t Philox::next_u32() {
    if (have_ == 0) advance();
    return out_[4 - have_--];
}

uint64_t Philox::next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Philox::next_unit() {
    // strictly inside (0,1): 53-bit mantissa offset by half an ulp
    return ((double)(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double Philox::next_exp() { return -std::log(next_unit()); }

bool Philox::next_bit() {
    if (bits_ == 0) {
        bitbuf_ = next_u32();
        bits_ = 32;
    }
    bool b = bitbuf_ & 1u;
    bitbuf_ >>= 1;
    --bits_;
    return b;
}

// --- deterministic parallel chunks ----------------------------------------------

void parallel_chunks(uint64_t n_items, uint64_t chunk_size,
                     const std::function<void(uint64_t, uint64_t, size_t)>& body) {
    if (n_items == 0) return;
    size_t n_chunks = (size_t)((n_items + chunk_size - 1) / chunk_size);

    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (const char* cap = std::getenv("ENLARGEMENT_LAB_THREADS")) {
        long v = std::atol(cap);
        if (v > 0 && (unsigned)v < workers) workers = (unsigned)v;
    }
    workers = std::min<unsigned>(workers, (unsigned)n_chunks);

    if (workers <= 1) {
        for (size_t c = 0; c < n_chunks; ++c)
            body(c * chunk_size, std::min(n_items, (c + 1) * chunk_size), c);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                body(c * chunk_size, std::min(n_items, (c + 1) * chunk_size), c);
            }
        });
    for (auto& t : pool) t.join();
}

// --- report formatting -----------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string SimReport::to_json(const std::string& manifest_json) const {
    std::ostringstream os;
    os << "{\n  \"estimator\": \"" << json_escape(estimator) << "\",\n";
    os << "  \"point_estimate\": " << fmt_double(point_estimate) << ",\n";
    os << "  \"std_error\": " << (se_defined ? fmt_double(std_error) : std::string("null")) << ",\n";
    os << "  \"se_defined\": " << (se_defined ? "true" : "false") << ",\n";
    os << "  \"samples\": " << samples << ",\n  \"seed\": " << seed << ",\n";
    os << "  \"extras\": {";
    for (size_t i = 0; i < extras.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(extras[i].first)
           << "\": " << fmt_double(extras[i].second);
    os << "},\n  \"notes\": {";
    for (size_t i = 0; i < notes.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(notes[i].first) << "\": \""
           << json_escape(notes[i].second) << "\"";
    os << "},\n  \"curves\": [";
    for (size_t c = 0; c < curves.size(); ++c) {
        const SimCurve& cv = curves[c];
        os << (c ? ",\n" : "\n") << "    {\"name\": \"" << json_escape(cv.name) << "\", \"points\": [";
        for (size_t i = 0; i < cv.times.size(); ++i)
            os << (i ? ", " : "") << "[" << fmt_double(cv.times[i]) << ", "
               << fmt_double(cv.values[i]) << ", " << fmt_double(cv.se[i]) << "]";
        os << "]}";
    }
    os << "\n  ],\n  \"manifest\": " << manifest_json << "\n}\n";
    return os.str();
}

std::string SimReport::curves_csv() const {
    std::ostringstream os;
    os << "curve,time,value,se\n";
    for (const auto& cv : curves)
        for (size_t i = 0; i < cv.times.size(); ++i)
            os << cv.name << ',' << fmt_double(cv.times[i]) << ',' << fmt_double(cv.values[i])
               << ',' << fmt_double(cv.se[i]) << '\n';
    return os.str();
}

namespace {

double binom_se(double p, uint64_t n) {
    if (n < 2) return 0.0;
    return std::sqrt(p * (1.0 - p) / (double)n);
}

struct CurveAccumulator {
    std::vector<double> times;
    std::vector<double> sum, sumsq;
    explicit CurveAccumulator(std::vector<double> t)
        : times(std::move(t)), sum(times.size(), 0.0), sumsq(times.size(), 0.0) {}
    void add(size_t i, double v) {
        sum[i] += v;
        sumsq[i] += v * v;
    }
    void merge(const CurveAccumulator& o) {
        for (size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
    }
    SimCurve finish(const std::string& name, uint64_t n) const {
        SimCurve c;
        c.name = name;
        c.times = times;
        for (size_t i = 0; i < sum.size(); ++i) {
            double mean = n ? sum[i] / (double)n : 0.0;
            double var = n > 1 ? std::max(0.0, (sumsq[i] - (double)n * mean * mean) / (double)(n - 1))
                               : 0.0;
            c.values.push_back(mean);
            c.se.push_back(n > 1 ? std::sqrt(var / (double)n) : 0.0);
        }
        return c;
    }
};

constexpr uint64_t CHUNK = 1024;

} // namespace

// --- compound Poisson last passage ------------------------------------------------

SimReport simulate_cpp_last_passage(double rate, const JumpLaw& law, double drift,
                                    double barrier, double horizon, uint64_t n, uint64_t seed) {
    if (n < 1 || horizon <= 0.0 || rate < 0.0)
        fail("InvalidParams", "need n >= 1, horizon > 0, rate >= 0");
    if (law.kind != "fixed" && law.kind != "exponential")
        fail("InvalidParams", "jump law must be fixed or exponential");

    size_t n_chunks = (size_t)((n + CHUNK - 1) / CHUNK);
    std::vector<double> chunk_hits(n_chunks, 0.0), chunk_valid(n_chunks, 0.0);
    std::vector<double> report_times;
    for (int i = 0; i <= 16; ++i) report_times.push_back(horizon * (double)i / 16.0);
    std::vector<CurveAccumulator> chunk_curves(n_chunks, CurveAccumulator(report_times));

    parallel_chunks(n, CHUNK, [&](uint64_t lo, uint64_t hi, size_t ci) {
        for (uint64_t path = lo; path < hi; ++path) {
            Philox rng(seed, path);
            std::vector<double> jump_t, jump_sz;
            double t = rate > 0.0 ? rng.next_exp() / rate : 2.0 * horizon;
            while (t <= horizon) {
                jump_t.push_back(t);
                jump_sz.push_back(law.kind == "fixed" ? law.size : -law.mean * rng.next_exp());
                t += rng.next_exp() / rate;
            }

            // the graph family the thin time should land on: jump times, the
            // horizon, and post-event upward crossings of the barrier
            std::vector<double> candidates = jump_t;
            candidates.push_back(horizon);

            double tau = -1.0;
            double x = 0.0, u = 0.0;
            for (size_t i = 0; i <= jump_t.size(); ++i) {
                double v = i < jump_t.size() ? jump_t[i] : horizon;
                if (u < v) {
                    if (x <= barrier) {
                        double leave = drift > 0.0 ? u + (barrier - x) / drift : v;
                        if (drift > 0.0) candidates.push_back(leave);
                        tau = std::min(leave, v);
                    } else if (drift < 0.0 && u + (x - barrier) / drift < v) {
                        tau = v;
                    }
                }
                if (i < jump_t.size()) {
                    x += drift * (v - u) + jump_sz[i];
                    u = v;
                    if (x <= barrier) tau = u;
                }
            }
            if (tau >= 0.0) {
                chunk_valid[ci] += 1.0;
                for (double c : candidates)
                    if (tau == c) { chunk_hits[ci] += 1.0; break; }
            }
            for (size_t i = 0; i < report_times.size(); ++i)
                chunk_curves[ci].add(i, tau > report_times[i] ? 1.0 : 0.0);
        }
    });

    double hits = 0.0, valid = 0.0;
    CurveAccumulator curve(report_times);
    for (size_t c = 0; c < n_chunks; ++c) {
        hits += chunk_hits[c];
        valid += chunk_valid[c];
        curve.merge(chunk_curves[c]);
    }

    SimReport rep;
    rep.estimator = "cpp_last_passage_thin_mass";
    rep.samples = n;
    rep.seed = seed;
    rep.point_estimate = valid > 0.0 ? hits / valid : 0.0;
    rep.std_error = binom_se(rep.point_estimate, (uint64_t)valid);
    rep.se_defined = n > 1;
    rep.extras.emplace_back("finite_fraction", valid / (double)n);
    rep.curves.push_back(curve.finish("survival", n));
    return rep;
}

// --- Brownian last zero -------------------------------------------------------------

SimReport simulate_brownian_last_zero(double horizon, double step, uint64_t n, uint64_t seed) {
    if (n < 1 || horizon < 0.0 || step <= 0.0)
        fail("InvalidParams", "need n >= 1, horizon >= 0, step > 0");

    uint64_t n_steps = (uint64_t)std::floor(horizon / step + 0.5);
    std::vector<double> report_times;
    for (int i = 0; i <= 16; ++i)
        report_times.push_back(step * std::floor((horizon * i / 16.0) / step + 0.5));
    std::vector<double> atom_times = {report_times[4], report_times[8], report_times[12]};
    double half = step * std::floor((horizon / 2.0) / step + 0.5);

    size_t n_chunks = (size_t)((n + CHUNK - 1) / CHUNK);
    std::vector<double> chunk_late(n_chunks, 0.0);
    std::vector<std::vector<double>> chunk_atoms(n_chunks, std::vector<double>(atom_times.size(), 0.0));
    std::vector<CurveAccumulator> chunk_surv(n_chunks, CurveAccumulator(report_times));
    std::vector<CurveAccumulator> chunk_azema(n_chunks, CurveAccumulator(report_times));

    parallel_chunks(n, CHUNK, [&](uint64_t lo, uint64_t hi, size_t ci) {
        std::vector<long long> walk(n_steps + 1, 0);
        for (uint64_t path = lo; path < hi; ++path) {
            Philox rng(seed, path);
            long long s = 0;
            uint64_t last_zero = 0;
            for (uint64_t k = 1; k <= n_steps; ++k) {
                s += rng.next_bit() ? 1 : -1;
                walk[k] = s;
                if (s == 0) last_zero = k;
            }
            double tau = (double)last_zero * step;
            if (tau > half) chunk_late[ci] += 1.0;
            for (size_t i = 0; i < atom_times.size(); ++i)
                if (tau == atom_times[i]) chunk_atoms[ci][i] += 1.0;

            uint64_t g = 0;
            for (size_t i = 0; i < report_times.size(); ++i) {
                uint64_t k = (uint64_t)std::floor(report_times[i] / step + 0.5);
                if (k > n_steps) k = n_steps;
                for (uint64_t j = g + 1; j <= k; ++j)
                    if (walk[j] == 0) g = j;
                chunk_surv[ci].add(i, tau > report_times[i] ? 1.0 : 0.0);
                double sgn = walk[k] > 0 ? 1.0 : (walk[k] < 0 ? -1.0 : 0.0);
                chunk_azema[ci].add(i, sgn * std::sqrt((double)(k - g) * step));
            }
        }
    });

    double late = 0.0;
    std::vector<double> atoms(atom_times.size(), 0.0);
    CurveAccumulator surv(report_times), azema(report_times);
    for (size_t c = 0; c < n_chunks; ++c) {
        late += chunk_late[c];
        for (size_t i = 0; i < atoms.size(); ++i) atoms[i] += chunk_atoms[c][i];
        surv.merge(chunk_surv[c]);
        azema.merge(chunk_azema[c]);
    }

    SimReport rep;
    rep.estimator = "brownian_last_zero_tail";
    rep.samples = n;
    rep.seed = seed;
    rep.point_estimate = late / (double)n;
    rep.std_error = binom_se(rep.point_estimate, n);
    rep.se_defined = n > 1;
    for (size_t i = 0; i < atom_times.size(); ++i) {
        rep.extras.emplace_back("atom_mass_at_" + fmt_double(atom_times[i]), atoms[i] / (double)n);
        rep.extras.emplace_back("atom_se_at_" + fmt_double(atom_times[i]),
                                binom_se(atoms[i] / (double)n, n));
    }
    rep.extras.emplace_back("arcsine_tail_at_half",
                            n_steps ? 1.0 - 2.0 / M_PI * std::asin(std::sqrt(half / horizon)) : 0.0);
    rep.notes.emplace_back("filtration",
                           "statistics are for the walk's own filtration; a time avoiding its "
                           "stopping times also avoids those of any coarser filtration");
    rep.curves.push_back(surv.finish("survival", n));
    rep.curves.push_back(azema.finish("azema_spot", n));
    return rep;
}

// --- spectrally negative stable supremum ----------------------------------------------

namespace {

// Chambers-Mallows-Stuck draw of a standard alpha-stable variable, beta = -1
double stable_one_sided(Philox& rng, double alpha) {
    double V = M_PI * (rng.next_unit() - 0.5);
    double W = rng.next_exp();
    double zeta = std::tan(M_PI_2 * alpha);          // -beta tan(pi alpha / 2), beta = -1
    double xi = std::atan(-zeta) / alpha;
    double scale = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
    double num = std::sin(alpha * (V + xi));
    double den = std::pow(std::cos(V), 1.0 / alpha);
    double tail = std::pow(std::cos(V - alpha * (V + xi)) / W, (1.0 - alpha) / alpha);
    return scale * num / den * tail;
}

} // namespace

SimReport simulate_levy_supremum(double alpha, double drift, double horizon,
                                 uint64_t n_steps, uint64_t n, uint64_t seed) {
    if (!(alpha > 1.0 && alpha < 2.0)) fail("InvalidParams", "stability index must lie in (1,2)");
    if (drift >= 0.0) fail("InvalidParams", "the example needs a strictly negative drift");
    if (n < 1 || horizon < 0.0 || n_steps < 1) fail("InvalidParams", "need n >= 1, steps >= 1");

    double dt = horizon / (double)n_steps;
    double incr_scale = std::pow(dt, 1.0 / alpha);
    double jump_threshold = 3.0 * incr_scale;

    std::vector<double> fixed_times = {horizon * 0.25, horizon * 0.5, horizon * 0.75};
    for (double& t : fixed_times) t = dt * std::floor(t / dt + 0.5);

    size_t n_chunks = (size_t)((n + CHUNK - 1) / CHUNK);
    std::vector<std::vector<double>> chunk_fixed(n_chunks, std::vector<double>(fixed_times.size(), 0.0));
    std::vector<double> chunk_jump_hits(n_chunks, 0.0);

    parallel_chunks(n, CHUNK, [&](uint64_t lo, uint64_t hi, size_t ci) {
        for (uint64_t path = lo; path < hi; ++path) {
            Philox rng(seed, path);
            double x = 0.0, runmax = 0.0;
            uint64_t argmax = 0;
            bool hit_jump = false;
            std::vector<uint64_t> jump_steps;
            for (uint64_t k = 1; k <= n_steps; ++k) {
                double inc = incr_scale * stable_one_sided(rng, alpha) + drift * dt;
                if (inc < -jump_threshold) jump_steps.push_back(k);
                x += inc;
                if (x >= runmax) {
                    runmax = x;
                    argmax = k;
                }
            }
            double rho = (double)argmax * dt;
            for (size_t i = 0; i < fixed_times.size(); ++i)
                if (rho == fixed_times[i]) chunk_fixed[ci][i] += 1.0;
            for (uint64_t js : jump_steps)
                if (js == argmax) { hit_jump = true; break; }
            if (hit_jump) chunk_jump_hits[ci] += 1.0;
        }
    });

    std::vector<double> fixed(fixed_times.size(), 0.0);
    double jump_hits = 0.0;
    for (size_t c = 0; c < n_chunks; ++c) {
        for (size_t i = 0; i < fixed.size(); ++i) fixed[i] += chunk_fixed[c][i];
        jump_hits += chunk_jump_hits[c];
    }

    SimReport rep;
    rep.estimator = "stable_supremum_jump_atom_mass";
    rep.samples = n;
    rep.seed = seed;
    rep.point_estimate = jump_hits / (double)n;
    rep.std_error = binom_se(rep.point_estimate, n);
    rep.se_defined = n > 1;
    for (size_t i = 0; i < fixed_times.size(); ++i) {
        rep.extras.emplace_back("atom_mass_at_" + fmt_double(fixed_times[i]), fixed[i] / (double)n);
        rep.extras.emplace_back("atom_se_at_" + fmt_double(fixed_times[i]),
                                binom_se(fixed[i] / (double)n, n));
    }
    rep.extras.emplace_back("jump_threshold", jump_threshold);
    return rep;
}

// --- Cox / accessible mixed time with an exact twin ------------------------------------

RandomTime cox_twin_random_time(const CoxScenario& sc) {
    const FilteredSpace& sp = sc.space;
    if (!is_stopping_time(sc.accessible, sp).stopping)
        fail("NotStoppingTime", "the accessible part must be an F-stopping time");
    if ((int)sc.intensity.size() != sp.n_grid())
        fail("InvalidParams", "one intensity level per grid index");

    const Partition& leaves = sp.partitions.back();
    RandomTime tau;
    for (int c = 0; c < leaves.n_cells(); ++c) {
        int a = leaves.cells[c].front();
        TimePoint theta = sc.accessible.value[a];

        std::vector<std::pair<TimePoint, Rational>> atoms;
        std::vector<std::array<Rational, 3>> dens;
        Rational big_lambda(0);
        bool saturated = false;
        for (int k = 0; k < sp.n_grid() && !saturated; ++k) {
            Rational level = sc.intensity[k][a];
            if (level.signum() < 0) fail("InvalidParams", "negative intensity");
            if (level.is_zero()) continue;
            Rational seg_start = sp.grid[k];
            TimePoint seg_end = k + 1 < sp.n_grid() ? TimePoint::at(sp.grid[k + 1]) : TimePoint::inf();
            if (theta <= TimePoint::at(seg_start)) break;
            TimePoint cut = seg_end <= theta ? seg_end : theta;
            // where the integrated uniform hazard reaches one in this segment
            TimePoint sat_at = TimePoint::at(seg_start + (Rational(1) - big_lambda) / level);
            TimePoint end = cut <= sat_at ? cut : sat_at;
            if (seg_start < end.t) {
                dens.push_back({seg_start, end.t, level});
                big_lambda += level * (end.t - seg_start);
            }
            if (sat_at <= cut) saturated = true;
        }
        Rational left = Rational(1) - big_lambda;
        if (left.signum() > 0) atoms.emplace_back(theta, left);
        tau.per_leaf.push_back(make_leaf_law(std::move(atoms), std::move(dens)));
    }
    tau.validate(sp);
    return tau;
}

CoxResult simulate_cox_accessible(const CoxScenario& sc, uint64_t n, uint64_t seed) {
    if (n < 1) fail("InvalidParams", "need n >= 1");
    const FilteredSpace& sp = sc.space;

    CoxResult res;
    res.exact_time = cox_twin_random_time(sc);
    Classification cls = classify(res.exact_time, sp);
    res.exact_thin_mass = cls.thin_mass;
    res.exact_thick_mass = cls.thick_mass;
    res.exact_immersed = immersion_test(res.exact_time, sp).immersed;

    std::vector<Rational> pts = res.exact_time.breakpoints();
    for (const auto& g : sp.grid) pts.push_back(g);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> report_times;
    for (const auto& p : pts) report_times.push_back(p.to_double());
    for (const auto& p : pts) {
        Rational s(0);
        for (int a = 0; a < sp.n_atoms(); ++a)
            s += sp.weights[a] * res.exact_time.per_leaf[sp.leaf_of(a)].surv_gt(p);
        res.exact_curve.push_back(s.to_double());
    }

    std::vector<double> cumw;
    double acc = 0.0;
    for (int a = 0; a < sp.n_atoms(); ++a) {
        acc += sp.weights[a].to_double();
        cumw.push_back(acc);
    }
    struct Seg { double start, end, level, lambda0; };
    std::vector<std::vector<Seg>> segs(sp.n_atoms());
    std::vector<double> theta(sp.n_atoms());
    for (int a = 0; a < sp.n_atoms(); ++a) {
        theta[a] = sc.accessible.value[a].infinite ? std::numeric_limits<double>::infinity()
                                                   : sc.accessible.value[a].t.to_double();
        const auto& law = res.exact_time.per_leaf[sp.leaf_of(a)];
        double lam = 0.0;
        for (const auto& pc : law.pieces) {
            if (pc.is_atom) continue;
            Seg s{pc.a.to_double(), pc.b.to_double(), pc.level.to_double(), lam};
            lam += s.level * (s.end - s.start);
            segs[a].push_back(s);
        }
    }

    size_t n_chunks = (size_t)((n + CHUNK - 1) / CHUNK);
    std::vector<CurveAccumulator> chunk_surv(n_chunks, CurveAccumulator(report_times));

    parallel_chunks(n, CHUNK, [&](uint64_t lo, uint64_t hi, size_t ci) {
        for (uint64_t path = lo; path < hi; ++path) {
            Philox rng(seed, path);
            double u = rng.next_unit();
            int a = (int)(std::lower_bound(cumw.begin(), cumw.end(), u) - cumw.begin());
            if (a >= sp.n_atoms()) a = sp.n_atoms() - 1;
            double threshold = rng.next_unit();
            double xi = std::numeric_limits<double>::infinity();
            for (const Seg& s : segs[a]) {
                double mass = s.level * (s.end - s.start);
                if (threshold <= s.lambda0 + mass) {
                    xi = s.start + (threshold - s.lambda0) / s.level;
                    break;
                }
            }
            double tau = std::min(theta[a], xi);
            for (size_t i = 0; i < report_times.size(); ++i)
                chunk_surv[ci].add(i, tau > report_times[i] ? 1.0 : 0.0);
        }
    });

    CurveAccumulator surv(report_times);
    for (size_t c = 0; c < n_chunks; ++c) surv.merge(chunk_surv[c]);

    SimReport rep;
    rep.estimator = "cox_accessible_survival";
    rep.samples = n;
    rep.seed = seed;
    rep.curves.push_back(surv.finish("survival", n));
    {
        SimCurve exact;
        exact.name = "survival_exact";
        exact.times = report_times;
        exact.values = res.exact_curve;
        exact.se.assign(report_times.size(), 0.0);
        rep.curves.push_back(exact);
    }
    rep.point_estimate = rep.curves[0].values.empty() ? 0.0 : rep.curves[0].values.back();
    rep.std_error = rep.curves[0].se.empty() ? 0.0 : rep.curves[0].se.back();
    rep.se_defined = n > 1;
    rep.extras.emplace_back("exact_thin_mass", res.exact_thin_mass.to_double());
    rep.extras.emplace_back("exact_thick_mass", res.exact_thick_mass.to_double());
    rep.extras.emplace_back("exact_immersed", res.exact_immersed ? 1.0 : 0.0);
    res.report = std::move(rep);
    return res;
}

} // namespace enlab
