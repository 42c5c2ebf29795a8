#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "intercept/experiment.hpp"

namespace intercept::experiment {

/// How a new session's layout seed is chosen when the client does not send one.
struct SeedStrategy {
    enum class Mode { Derived, Entropy };
    Mode mode = Mode::Derived;
    /// Derived mode: seed of the k-th session is derive_seed(base_seed, k).
    std::uint64_t base_seed = 0;
};

/// Service configuration file (JSON):
///
///   {
///     "manifest": "stimuli/manifest.json",     // required
///     "log_path": "data/events.jsonl",         // required
///     "host": "127.0.0.1",                     // default 127.0.0.1
///     "port": 8080,                            // 0 picks a free port
///     "static_dir": "webui/dist",              // optional, served at /
///     "seed_strategy": {"mode": "derived", "base_seed": 7},   // or {"mode": "entropy"}
///     "media_secret": "...",                   // optional; random per process if absent
///     "questionnaire_url": "https://..."       // optional, echoed to clients
///   }
///
/// Relative paths are resolved against the config file's directory.
struct ServiceConfig {
    std::filesystem::path manifest;
    std::filesystem::path log_path;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> static_dir;
    SeedStrategy seed_strategy;
    std::optional<std::string> media_secret;
    std::optional<std::string> questionnaire_url;

    static ServiceConfig from_json(const std::string& text, const std::filesystem::path& base_dir);
    static ServiceConfig load(const std::filesystem::path& path);
};

/// HTTP front end of an ExperimentStore.
///
///   POST /api/sessions                 {"participant_id": "...", "seed": n?}
///   GET  /api/sessions/{id}/trial      next trial or {"done": true}
///   POST /api/sessions/{id}/responses  {"question_index": k, "response": "A"|"B", "play_counts": {...}?}
///   GET  /api/sessions/{id}/summary
///   GET  /media/{token}                audio/wav, honours Range
///   GET  /api/export                   responses CSV
///   /                                  static_dir, when configured
class ExperimentServer {
public:
    explicit ExperimentServer(const ServiceConfig& config);
    ~ExperimentServer();
    ExperimentServer(const ExperimentServer&) = delete;
    ExperimentServer& operator=(const ExperimentServer&) = delete;

    /// Binds the listening socket; returns the actual port.
    int bind();

    /// Serves until stop() is called. bind() must have succeeded.
    void serve();

    void stop();

    [[nodiscard]] ExperimentStore& store();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace intercept::experiment
