// intercept: command-line front end for the phase-intercept toolkit.
//
// Exit status: 0 success, 1 domain error (one line on stderr), 2 usage error.
// Log verbosity comes from INTERCEPT_LOG_LEVEL (trace, debug, info, warn,
// error, off; default warn). Logs go to stderr so stdout stays clean for WAV
// streaming.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "intercept/analysis.hpp"
#include "intercept/augment.hpp"
#include "intercept/dsp.hpp"
#include "intercept/error.hpp"
#include "intercept/experiment.hpp"
#include "intercept/selftest.hpp"
#include "intercept/service.hpp"
#include "intercept/stimuli.hpp"
#include "intercept/wav.hpp"

namespace fs = std::filesystem;
using namespace intercept;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, audio::SampleFormat> kFormats{
    {"pcm16", audio::SampleFormat::Pcm16},
    {"float32", audio::SampleFormat::Float32},
    {"float64", audio::SampleFormat::Float64},
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("intercept");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("INTERCEPT_LOG_LEVEL")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        fail(ErrorCode::IoFailure, path.string() + ": cannot write");
    }
}

template <typename F>
audio::Recording map_channels(const audio::Recording& in, F&& f) {
    audio::Recording out = in;
    for (std::size_t c = 0; c < in.channel_count(); ++c) {
        out.channels[c] = f(in.channel(c)).samples;
    }
    return out;
}

// Every *.wav below dir, as (absolute, relative) pairs in sorted order.
std::vector<std::pair<fs::path, fs::path>> wav_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        fail(ErrorCode::FileNotFound, dir.string() + ": not a directory");
    }
    std::vector<std::pair<fs::path, fs::path>> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".wav") {
            out.emplace_back(entry.path(), entry.path().lexically_relative(dir));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.second.generic_string() < b.second.generic_string(); });
    return out;
}

// ---------------------------------------------------------------------------

struct ShiftArgs {
    std::optional<double> theta_deg;
    std::optional<double> theta_rad;
    std::string in, out, format = "float64";
};

int run_shift(const ShiftArgs& a) {
    if (a.theta_deg.has_value() == a.theta_rad.has_value()) {
        throw UsageError("shift: give exactly one of --theta-deg or --theta-rad");
    }
    const dsp::PhaseAngle theta =
        a.theta_deg ? dsp::PhaseAngle::from_degrees(*a.theta_deg) : dsp::PhaseAngle(*a.theta_rad);
    spdlog::info("shift {} by {} rad", a.in, theta.radians());
    const auto rec = audio::read_wav(fs::path(a.in));
    const auto out = map_channels(rec, [&](const dsp::Signal& x) { return dsp::phase_shift(x, theta); });
    audio::write_wav(fs::path(a.out), out, kFormats.at(a.format));
    return 0;
}

struct HilbertArgs {
    std::string in, out, format = "float64";
};

int run_hilbert(const HilbertArgs& a) {
    const auto rec = audio::read_wav(fs::path(a.in));
    const auto out = map_channels(rec, [](const dsp::Signal& x) { return dsp::hilbert(x); });
    audio::write_wav(fs::path(a.out), out, kFormats.at(a.format));
    return 0;
}

struct AugmentArgs {
    std::optional<std::uint64_t> seed;
    double prob = 1.0;
    std::uint64_t worker_id = 0;
    std::string in_dir, out_dir, format = "float64", out_json;
};

// All channels share one draw (one coin, one theta).
std::pair<audio::Recording, augment::Augmented> augment_recording(const audio::Recording& rec,
                                                                  const augment::AugmentStream& stream) {
    audio::Recording out = rec;
    augment::Augmented first;
    for (std::size_t c = 0; c < rec.channel_count(); ++c) {
        auto r = stream.at(rec.channel(c), 0);
        out.channels[c] = std::move(r.signal.samples);
        if (c == 0) first = std::move(r);
    }
    return {std::move(out), std::move(first)};
}

int run_augment(const AugmentArgs& a) {
    if (!a.seed) {
        throw UsageError("augment: --seed is required");
    }
    if (a.in_dir.empty() != a.out_dir.empty()) {
        throw UsageError("augment: --in-dir and --out-dir go together (omit both to stream stdin to stdout)");
    }
    nlohmann::ordered_json report{{"seed", *a.seed}, {"worker_id", a.worker_id}, {"apply_probability", a.prob},
                                  {"items", nlohmann::ordered_json::array()}};

    if (a.in_dir.empty()) {
        std::ios::sync_with_stdio(false);
        const auto rec = audio::read_wav(std::cin, "<stdin>");
        const augment::AugmentStream stream({*a.seed, a.prob}, a.worker_id);
        const auto [out, draw] = augment_recording(rec, stream);
        audio::write_wav(std::cout, out, kFormats.at(a.format));
        std::cout.flush();
        report["items"].push_back({{"file", "-"}, {"theta", draw.theta.radians()}, {"applied", draw.applied}});
    } else {
        const auto files = wav_files(a.in_dir);
        if (files.empty()) {
            fail(ErrorCode::FileNotFound, a.in_dir + ": no .wav files");
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto& [src, rel] = files[i];
            try {
                const auto rec = audio::read_wav(src);
                const augment::AugmentStream stream({derive_seed(*a.seed, i), a.prob}, a.worker_id);
                const auto [out, draw] = augment_recording(rec, stream);
                const fs::path dst = fs::path(a.out_dir) / rel;
                fs::create_directories(dst.parent_path());
                audio::write_wav(dst, out, kFormats.at(a.format));
                spdlog::info("{}: theta {} applied {}", rel.generic_string(), draw.theta.radians(), draw.applied);
                report["items"].push_back(
                    {{"file", rel.generic_string()}, {"theta", draw.theta.radians()}, {"applied", draw.applied}});
            } catch (const Error& e) {
                throw Error(e.code(), rel.generic_string() + ": " + e.what(), i);
            }
        }
    }
    if (!a.out_json.empty()) {
        write_text(a.out_json, report.dump(2) + "\n");
    }
    return 0;
}

struct WoodArgs {
    double freq = 0, clip = 0, dur = 0;
    std::uint32_t fs = 0;
    std::string out_prefix, format = "float32";
};

int run_wood(const WoodArgs& a) {
    const auto pair = audio::wood_effect_stimulus(a.freq, a.clip, a.dur, a.fs);
    audio::write_wav(fs::path(a.out_prefix + "_clipped.wav"), audio::Recording::from_signal(pair.clipped),
                     kFormats.at(a.format));
    audio::write_wav(fs::path(a.out_prefix + "_inverted.wav"), audio::Recording::from_signal(pair.inverted),
                     kFormats.at(a.format));
    return 0;
}

struct PrepareArgs {
    std::string in_dir, out_dir, manifest;
    std::optional<std::uint64_t> seed;
    double duration = 3.0, taper = 0.1;
    std::optional<double> threshold;
    int max_attempts = 100;
};

int run_prepare(const PrepareArgs& a) {
    if (!a.seed) {
        throw UsageError("prepare-stimuli: --seed is required");
    }
    audio::ExcerptPolicy policy;
    policy.duration_s = a.duration;
    policy.taper_s = a.taper;
    policy.l2_threshold = a.threshold;
    policy.max_attempts = a.max_attempts;

    const auto sources = audio::discover_sources(a.in_dir);
    if (sources.empty()) {
        fail(ErrorCode::FileNotFound, a.in_dir + ": no .wav files");
    }
    auto manifest = audio::prepare_stimulus_set(sources, a.out_dir, policy, *a.seed);

    const fs::path manifest_path = a.manifest.empty() ? fs::path(a.out_dir) / "manifest.json" : fs::path(a.manifest);
    const fs::path manifest_dir = fs::absolute(manifest_path).parent_path();
    const fs::path out_abs = fs::absolute(a.out_dir);
    if (manifest_dir.lexically_normal() != out_abs.lexically_normal()) {
        for (auto& e : manifest.stimuli) {
            e.original_file = (out_abs / e.original_file).lexically_relative(manifest_dir).generic_string();
            e.distorted_file = (out_abs / e.distorted_file).lexically_relative(manifest_dir).generic_string();
        }
    }
    fs::create_directories(manifest_dir);
    write_text(manifest_path, audio::manifest_to_json(manifest));
    spdlog::info("prepared {} stimulus pairs", manifest.stimuli.size());
    return 0;
}

struct AnalyzeArgs {
    std::string responses, out_json, plot_data;
    std::vector<std::string> exclude;
    double mass = 0.95;
};

int run_analyze(const AnalyzeArgs& a) {
    std::ifstream in(a.responses);
    if (!in) {
        fail(ErrorCode::FileNotFound, a.responses + ": cannot open");
    }
    analysis::ResponseSet rs{read_responses_csv(in, a.exclude)};
    const auto report = analysis::analyze(rs, a.mass);
    write_text(a.out_json, analysis::report_to_json(report));
    if (!a.plot_data.empty()) {
        write_text(a.plot_data, analysis::plot_data_json(report));
    }
    std::printf("trials %lld  successes %lld  posterior Beta(%g, %g)  %g%% interval [%.4f, %.4f]\n",
                static_cast<long long>(report.counts.successes + report.counts.failures),
                static_cast<long long>(report.counts.successes), report.posterior.alpha(),
                report.posterior.beta(), 100.0 * a.mass, report.credible.lo, report.credible.hi);
    return 0;
}

struct ServeArgs {
    std::string config;
    std::optional<int> port;
};

experiment::ExperimentServer* g_server = nullptr;

int run_serve(const ServeArgs& a) {
    auto config = experiment::ServiceConfig::load(a.config);
    if (a.port) {
        config.port = *a.port;
    }
    experiment::ExperimentServer server(config);
    const int port = server.bind();
    for (const auto& w : server.store().warnings()) {
        spdlog::warn("event log offset {}: {}", w.byte_offset, w.message);
    }
    std::printf("listening on http://%s:%d\n", config.host.c_str(), port);
    std::fflush(stdout);
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    server.serve();
    g_server = nullptr;
    return 0;
}

struct SelftestArgs {
    std::uint64_t seed = 1;
    std::size_t signals = 200;
    std::string out_json;
};

int run_selftest(const SelftestArgs& a) {
    selftest::Options opts;
    opts.seed = a.seed;
    opts.signals = a.signals;
    const auto results = selftest::run_invariant_suite(opts);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        std::printf("%s  %-24s worst %.3e  tol %.0e  cases %zu\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.worst, r.tolerance, r.cases);
    }
    if (!a.out_json.empty()) {
        write_text(a.out_json, selftest::results_to_json(results));
    }
    return all ? 0 : kExitDomain;
}

struct ExportArgs {
    std::string log, out;
};

int run_export(const ExportArgs& a) {
    if (!fs::exists(a.log)) {
        fail(ErrorCode::FileNotFound, a.log + ": no such event log");
    }
    const auto result = experiment::export_responses(fs::path(a.log));
    for (const auto& w : result.warnings) {
        spdlog::warn("event log offset {}: {}", w.byte_offset, w.message);
    }
    if (a.out.empty()) {
        write_responses_csv(std::cout, result.records);
    } else {
        std::ostringstream csv;
        write_responses_csv(csv, result.records);
        write_text(a.out, csv.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Phase-intercept distortion toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    const auto format_check = CLI::IsMember(kFormats);
    std::function<int()> action;

    ShiftArgs shift;
    auto* c_shift = app.add_subcommand("shift", "Rotate every frequency component by a constant phase");
    c_shift->add_option("--theta-deg", shift.theta_deg, "Angle in degrees (wrapped to [-180, 180))");
    c_shift->add_option("--theta-rad", shift.theta_rad, "Angle in radians (wrapped to [-pi, pi))");
    c_shift->add_option("--in", shift.in, "Input WAV")->required()->check(CLI::ExistingFile);
    c_shift->add_option("--out", shift.out, "Output WAV")->required();
    c_shift->add_option("--format", shift.format, "Output encoding")->check(format_check)->capture_default_str();
    c_shift->callback([&] { action = [&] { return run_shift(shift); }; });

    HilbertArgs hil;
    auto* c_hil = app.add_subcommand("hilbert", "Write the Hilbert transform of each channel");
    c_hil->add_option("--in", hil.in, "Input WAV")->required()->check(CLI::ExistingFile);
    c_hil->add_option("--out", hil.out, "Output WAV")->required();
    c_hil->add_option("--format", hil.format, "Output encoding")->check(format_check)->capture_default_str();
    c_hil->callback([&] { action = [&] { return run_hilbert(hil); }; });

    AugmentArgs aug;
    auto* c_aug = app.add_subcommand(
        "augment", "Random phase-intercept augmentation (directory mode, or WAV on stdin to stdout)");
    c_aug->add_option("--seed", aug.seed, "Random seed (required)");
    c_aug->add_option("--prob", aug.prob, "Probability of applying the rotation")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_aug->add_option("--worker-id", aug.worker_id, "Stream id for this worker")->capture_default_str();
    c_aug->add_option("--in-dir", aug.in_dir, "Directory of input WAVs");
    c_aug->add_option("--out-dir", aug.out_dir, "Directory for augmented WAVs");
    c_aug->add_option("--format", aug.format, "Output encoding")->check(format_check)->capture_default_str();
    c_aug->add_option("--out-json", aug.out_json, "Write the per-file draws as JSON");
    c_aug->callback([&] { action = [&] { return run_augment(aug); }; });

    WoodArgs wood;
    auto* c_wood = app.add_subcommand("wood", "Half-wave clipped sine and its polarity inversion");
    c_wood->add_option("--freq", wood.freq, "Frequency in Hz")->required();
    c_wood->add_option("--clip", wood.clip, "Clip level for the positive half-cycles")->required();
    c_wood->add_option("--dur", wood.dur, "Duration in seconds")->required();
    c_wood->add_option("--fs", wood.fs, "Sample rate in Hz")->required();
    c_wood->add_option("--out-prefix", wood.out_prefix, "Writes <prefix>_clipped.wav and <prefix>_inverted.wav")
        ->required();
    c_wood->add_option("--format", wood.format, "Output encoding")->check(format_check)->capture_default_str();
    c_wood->callback([&] { action = [&] { return run_wood(wood); }; });

    PrepareArgs prep;
    auto* c_prep = app.add_subcommand("prepare-stimuli", "Cut, distort, fade and normalize listening-test pairs");
    c_prep->add_option("--in-dir", prep.in_dir, "Source recordings (music/, speech/, other/ subdirectories)")
        ->required()
        ->check(CLI::ExistingDirectory);
    c_prep->add_option("--out-dir", prep.out_dir, "Output directory")->required();
    c_prep->add_option("--seed", prep.seed, "Random seed (required)");
    c_prep->add_option("--duration", prep.duration, "Excerpt length in seconds")->capture_default_str();
    c_prep->add_option("--taper", prep.taper, "Fade length in seconds")->capture_default_str();
    c_prep->add_option("--threshold", prep.threshold, "Minimum excerpt l2-norm (default -40 dBFS RMS)");
    c_prep->add_option("--max-attempts", prep.max_attempts, "Excerpt draws before giving up")->capture_default_str();
    c_prep->add_option("--manifest", prep.manifest, "Manifest path (default <out-dir>/manifest.json)");
    c_prep->callback([&] { action = [&] { return run_prepare(prep); }; });

    AnalyzeArgs ana;
    auto* c_ana = app.add_subcommand("analyze", "Bayesian and frequentist analysis of a responses CSV");
    c_ana->add_option("--responses", ana.responses, "Responses CSV")->required();
    c_ana->add_option("--out-json", ana.out_json, "Report output")->required();
    c_ana->add_option("--plot-data", ana.plot_data, "Posterior density and per-question means as JSON");
    c_ana->add_option("--exclude", ana.exclude, "Participant id to drop (repeatable)");
    c_ana->add_option("--credible-mass", ana.mass, "Mass of the credible interval")->capture_default_str();
    c_ana->callback([&] { action = [&] { return run_analyze(ana); }; });

    ServeArgs srv;
    auto* c_srv = app.add_subcommand("serve", "Run the listening-test service");
    c_srv->add_option("--config", srv.config, "Service config JSON")->required()->check(CLI::ExistingFile);
    c_srv->add_option("--port", srv.port, "Override the configured port");
    c_srv->callback([&] { action = [&] { return run_serve(srv); }; });

    SelftestArgs st;
    auto* c_st = app.add_subcommand("selftest", "Run the signal-processing invariant suite");
    c_st->add_option("--seed", st.seed, "Seed for the random signals")->capture_default_str();
    c_st->add_option("--signals", st.signals, "Random signals per check")->capture_default_str();
    c_st->add_option("--out-json", st.out_json, "Machine-readable results");
    c_st->callback([&] { action = [&] { return run_selftest(st); }; });

    ExportArgs exp;
    auto* c_exp = app.add_subcommand("export", "Convert a service event log to a responses CSV");
    c_exp->add_option("--log", exp.log, "Event log (JSONL)")->required();
    c_exp->add_option("--out", exp.out, "CSV output (default stdout)");
    c_exp->callback([&] { action = [&] { return run_export(exp); }; });

    try {
        app.parse(argc, argv);
        return action();
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "intercept: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "intercept: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "intercept: error[" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "intercept: error: " << e.what() << "\n";
        return kExitDomain;
    }
}
