// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <httplib.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "intercept/analysis.hpp"
#include "intercept/augment.hpp"
#include "intercept/dsp.hpp"
#include "intercept/experiment.hpp"
#include "intercept/service.hpp"
#include "intercept/stats.hpp"
#include "intercept/trial.hpp"
#include "service_fixture.hpp"
#include "support.hpp"

using namespace intercept;
namespace ts = testing_support;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    if constexpr (sizeof...(args) == 0) {
        return f;
    } else {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }
}

// --- 1. posterior ---------------------------------------------------------------------

Outcome posterior_reproduction() {
    std::ifstream in(ts::fixture_dir() / "responses_389_391.csv");
    const auto report = analysis::analyze(analysis::ResponseSet{read_responses_csv(in)});
    const auto& p = report.posterior;
    const auto& ci = report.credible;
    const bool exact = p.alpha() == 390.0 && p.beta() == 392.0;
    const bool close = std::abs(ci.lo - 0.464) <= 0.001 && std::abs(ci.hi - 0.534) <= 0.001;
    return {exact && close, fmt("Beta(%g, %g), interval (%.4f, %.4f)", p.alpha(), p.beta(), ci.lo, ci.hi)};
}

// --- 2. aggregate t-test ------------------------------------------------------------------

Outcome aggregate_t_test() {
    const auto s = stats::one_sample_t(0.4987, 0.0936, 26, 0.5);
    const bool ok = s.t_statistic && s.p_value && std::abs(*s.t_statistic + 0.068) <= 0.01 &&
                    std::abs(*s.p_value - 0.946) <= 0.01;
    return {ok, fmt("t = %.4f, p = %.4f", s.t_statistic.value_or(NAN), s.p_value.value_or(NAN))};
}

// --- 3. sinusoid ---------------------------------------------------------------------------

Outcome sinusoid_ground_truth() {
    const std::uint32_t fs = 44100;
    const double w = 2 * std::numbers::pi * 440.0 / fs;
    dsp::Signal x{std::vector<double>(fs), fs};
    for (std::size_t n = 0; n < x.size(); ++n) x.samples[n] = std::sin(w * double(n));
    const auto y = dsp::phase_shift(x, dsp::PhaseAngle(0.6));
    double worst = 0.0;
    for (std::size_t n = 2; n + 2 < y.size(); ++n) worst = std::max(worst, std::abs(y.samples[n] - std::sin(w * double(n) + 0.6)));
    return {worst <= 1e-9, fmt("max abs error %.3e", worst)};
}

// --- 4. invariants against the test-side oracle ------------------------------------------------

struct Tracker {
    std::string name;
    double tol;
    double worst = 0.0;
    int cases = 0;
    void add(double v) {
        worst = std::max(worst, std::isfinite(v) ? v : INFINITY);
        ++cases;
    }
    bool ok() const { return worst <= tol && cases >= 200; }
};

std::vector<double> zero_mean_zero_nyquist(std::vector<double> x) {
    ts::remove_mean(x);
    ts::remove_alternating(x);
    return x;
}

Outcome invariant_suite() {
    ts::SignalGen gen(20240601);
    Tracker round{"round_trip", 1e-9}, comp{"composition", 1e-9}, mag{"magnitude", 1e-9}, orth{"orthogonality", 1e-9},
        invol{"involution", 1e-9}, oracle{"oracle", 1e-10};
    for (int i = 0; i < 200; ++i) {
        const auto n = gen.length(2, 4096, i % 2);
        const auto x = ts::make_signal(gen.samples(n));
        const double a = gen.angle(), b = gen.angle();

        const auto back = dsp::phase_shift(dsp::phase_shift(x, dsp::PhaseAngle(a)), dsp::PhaseAngle(-a));
        round.add(ts::max_abs_diff(back.samples, x.samples));

        const auto twice = dsp::phase_shift(dsp::phase_shift(x, dsp::PhaseAngle(a)), dsp::PhaseAngle(b));
        const auto once = dsp::phase_shift(x, dsp::PhaseAngle(a + b));
        comp.add(ts::max_abs_diff(twice.samples, once.samples));

        // Per-bin magnitudes through the independent transform.
        const auto shifted = dsp::phase_shift(x, dsp::PhaseAngle(a));
        std::vector<ts::Complex> cx(x.samples.begin(), x.samples.end()), cy(shifted.samples.begin(), shifted.samples.end());
        if (n <= 512) {
            const auto fx = ts::dft(cx, false), fy = ts::dft(cy, false);
            double w = 0.0;
            for (std::size_t k = 0; k < n; ++k) w = std::max(w, std::abs(std::abs(fx[k]) - std::abs(fy[k])));
            mag.add(w);
        } else {
            const auto fx = dsp::magnitude_spectrum(x), fy = dsp::magnitude_spectrum(shifted);
            mag.add(ts::max_abs_diff(fx, fy));
        }

        const auto h = dsp::hilbert(x);
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += x.samples[k] * h.samples[k];
        const double norm = ts::l2(x.samples) * ts::l2(h.samples);
        orth.add(norm > 0.0 ? std::abs(dot) / norm : std::abs(dot));

        const auto z = ts::make_signal(zero_mean_zero_nyquist(x.samples));
        const auto hh = dsp::hilbert(dsp::hilbert(z));
        std::vector<double> neg = z.samples;
        for (auto& v : neg) v = -v;
        invol.add(ts::max_abs_diff(hh.samples, neg));

        const auto m = gen.length(2, 64, i % 2);
        const auto s = ts::make_signal(gen.samples(m));
        const double t = gen.angle();
        oracle.add(std::max(ts::max_abs_diff(dsp::phase_shift(s, dsp::PhaseAngle(t)).samples, ts::oracle_shift(s.samples, t)),
                            ts::max_abs_diff(dsp::hilbert(s).samples, ts::oracle_hilbert(s.samples))));
    }
    std::string detail;
    bool ok = true;
    for (const auto* t : {&round, &comp, &mag, &orth, &invol, &oracle}) {
        ok = ok && t->ok();
        detail += fmt("%s%s %.1e", detail.empty() ? "" : ", ", t->name.c_str(), t->worst);
    }
    return {ok, fmt("200 signals each; ") + detail};
}

// --- 5. polarity --------------------------------------------------------------------------------

Outcome polarity_equivalence() {
    ts::SignalGen gen(7);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto x = ts::make_signal(zero_mean_zero_nyquist(gen.samples(gen.length(2, 4096, i % 2))));
        worst = std::max(worst, ts::max_abs_diff(dsp::phase_shift(x, dsp::PhaseAngle(std::numbers::pi)).samples,
                                                 augment::ipa(x).samples));
    }
    return {worst <= 1e-9, fmt("200 zero-mean signals, max abs diff %.3e", worst)};
}

// --- 6. complexity --------------------------------------------------------------------------------

// Sizes are timed round-robin so that drift in background load hits every size
// alike; the per-size figure is the median over rounds.
Outcome augment_complexity() {
    constexpr int kFirst = 16, kLast = 20, kRounds = 15;
    augment::AugmentStream stream(augment::AugmentConfig{1, 1.0}, 0);
    std::vector<dsp::Signal> inputs;
    for (int p = kFirst; p <= kLast; ++p) {
        ts::SignalGen gen(p);
        dsp::Signal x{std::vector<double>(std::size_t{1} << p), 48000};
        for (auto& v : x.samples) v = gen.uniform(-1, 1);
        (void)stream.next(x);  // plan creation is not part of the per-call cost
        inputs.push_back(std::move(x));
    }
    std::vector<std::vector<double>> times(inputs.size());
    for (int r = 0; r < kRounds; ++r) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto t0 = Clock::now();
            const auto y = stream.next(inputs[i]);
            times[i].push_back(seconds_since(t0));
            if (y.signal.size() != inputs[i].size()) return {false, "wrong output length"};
        }
    }
    std::vector<double> per_call;
    for (auto& t : times) {
        std::nth_element(t.begin(), t.begin() + kRounds / 2, t.end());
        per_call.push_back(t[kRounds / 2]);
    }
    double worst = 0.0;
    std::string detail;
    for (std::size_t i = 1; i < per_call.size(); ++i) {
        const double r = per_call[i] / per_call[i - 1];
        worst = std::max(worst, r);
        detail += fmt("%s%.2f", i == 1 ? "" : " ", r);
    }
    return {worst <= 2.5, fmt("growth per doubling %s (median per call %.2f ms at 2^20)", detail.c_str(),
                              per_call.back() * 1e3)};
}

// --- 7. pipeline determinism ------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const int raw = std::system((std::string(INTERCEPT_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome pipeline_determinism() {
    ts::TempDir dir("accept-prep");
    const auto src = ts::fixture_dir() / "recordings";
    for (const char* run : {"a", "b"}) {
        const int rc = run_cli("prepare-stimuli --seed 20240601 --in-dir '" + src.string() + "' --out-dir '" +
                               (dir / run).string() + "'");
        if (rc != 0) return {false, fmt("prepare-stimuli exited with %d", rc)};
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir / "a");
        if (!fs::exists(dir / "b" / rel) || slurp(e.path()) != slurp(dir / "b" / rel)) {
            return {false, "differs: " + rel.string()};
        }
        ++files;
    }
    std::size_t other = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "b")) other += e.is_regular_file();
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    const bool ok = files == other && files == 1 + 2 * manifest.at("stimuli").size() && files > 1;
    return {ok, fmt("%zu files byte-identical across two runs", files)};
}

// --- 8. service protocol --------------------------------------------------------------------------------

Outcome service_protocol() {
    using namespace intercept::experiment;
    ts::TempDir dir("accept-svc");
    const auto config = ServiceConfig::load(ts::write_service_fixture(dir.path(), 30));
    std::string sid;
    {
        ExperimentServer server(config);
        const int port = server.bind();
        std::thread th([&] { server.serve(); });
        httplib::Client http("127.0.0.1", port);
        auto created = http.Post("/api/sessions", R"({"participant_id": "sim-01"})", "application/json");
        bool ok = created && created->status == 201;
        if (ok) sid = nlohmann::json::parse(created->body).at("session_id").get<std::string>();
        for (int q = 1; ok && q <= 30; ++q) {
            auto t = http.Get("/api/sessions/" + sid + "/trial");
            ok = t && t->status == 200 && nlohmann::json::parse(t->body).at("question_index") == q;
            for (const char* role : {"reference_url", "a_url", "b_url"}) {
                auto m = ok ? http.Get(nlohmann::json::parse(t->body).at(role).get<std::string>()) : httplib::Result{};
                ok = ok && m && m->status == 200;
            }
            const nlohmann::json body{{"question_index", q}, {"response", (q * 7) % 3 ? "A" : "B"}};
            auto r = ok ? http.Post("/api/sessions/" + sid + "/responses", body.dump(), "application/json")
                        : httplib::Result{};
            ok = ok && r && r->status == 201;
        }
        server.stop();
        th.join();
        if (!ok) return {false, "HTTP session did not complete"};
    }
    const auto log = replay_log(config.log_path);
    std::set<std::string> covered;
    for (const auto& r : log.records) covered.insert(r.stimulus_id);
    const bool thirty = log.records.size() == 30 && covered.size() == 30 && log.warnings.empty();

    ExperimentStore store(StimulusSet::from_manifest(audio::load_manifest(config.manifest), config.manifest.parent_path()),
                          std::make_unique<MemoryEventLog>(), "acceptance");
    std::size_t a = 0, total = 0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const auto s = store.create_session("sim-" + std::to_string(k), derive_seed(config.seed_strategy.base_seed, k));
        for (auto x : s.assignments) {
            a += x == Assignment::OriginalIsA;
            ++total;
        }
    }
    const double balance = double(a) / double(total);
    return {thirty && std::abs(balance - 0.5) <= 0.015,
            fmt("%zu records covering %zu stimuli; balance %.4f over 10000 sessions", log.records.size(),
                covered.size(), balance)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"posterior reproduction", 1.0, posterior_reproduction},
        {"aggregate t-test", 1.0, aggregate_t_test},
        {"sinusoid ground truth", 1.0, sinusoid_ground_truth},
        {"invariant suite", 60.0, invariant_suite},
        {"polarity equivalence", 0.0, polarity_equivalence},
        {"augment complexity", 30.0, augment_complexity},
        {"pipeline determinism", 0.0, pipeline_determinism},
        {"service protocol", 0.0, service_protocol},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double took = seconds_since(t0);
        if (c.budget_s > 0 && took >= c.budget_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s budget", c.budget_s);
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << fmt(" [%.3f s]", took)
                  << std::endl;
    }
    std::cout << (failed ? fmt("%d criteria failed", failed) : std::string("all criteria passed")) << std::endl;
    return failed ? 1 : 0;
}
