#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "intercept/stimuli.hpp"
#include "intercept/trial.hpp"

namespace intercept::experiment {

struct StimulusInfo {
    std::string id;
    audio::Category category = audio::Category::Other;
    double theta = 0.0;
    std::filesystem::path original_path;
    std::filesystem::path distorted_path;
};

/// The configured stimuli, in manifest order.
class StimulusSet {
public:
    StimulusSet() = default;
    explicit StimulusSet(std::vector<StimulusInfo> stimuli);

    /// Resolves the manifest's relative file names against base_dir.
    static StimulusSet from_manifest(const audio::StimulusManifest& manifest,
                                     const std::filesystem::path& base_dir);

    [[nodiscard]] const std::vector<StimulusInfo>& all() const noexcept { return stimuli_; }
    [[nodiscard]] std::size_t size() const noexcept { return stimuli_.size(); }
    [[nodiscard]] const StimulusInfo* find(const std::string& id) const;

private:
    std::vector<StimulusInfo> stimuli_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Session {
    std::string session_id;
    std::string participant_id;
    std::vector<std::string> trial_order;  // permutation of the stimulus ids
    std::vector<Assignment> assignments;   // one per trial, fixed at creation
    std::uint32_t cursor = 0;              // number of answered trials
    std::string created_utc;
    std::uint64_t seed = 0;

    [[nodiscard]] bool done() const noexcept { return cursor >= trial_order.size(); }
};

struct SessionLayout {
    std::vector<std::string> trial_order;
    std::vector<Assignment> assignments;
};

/// Uniform permutation of `stimulus_ids` and fair A/B assignment per trial, as
/// a pure function of (participant_id, seed).
SessionLayout make_layout(const std::string& participant_id, std::uint64_t seed,
                          const std::vector<std::string>& stimulus_ids);

/// What a client sees for one trial. Deliberately carries nothing that
/// distinguishes the original from the distorted option.
struct TrialView {
    std::uint32_t question_index = 0;
    std::uint32_t total_questions = 0;
    std::string reference_url;
    std::string a_url;
    std::string b_url;
};

/// Append-only sink for JSONL events. append() returns only after the line is
/// durable (for file-backed logs: written and fsync'ed).
class EventLog {
public:
    virtual ~EventLog() = default;
    virtual void append(const std::string& line) = 0;
};

class FileEventLog final : public EventLog {
public:
    explicit FileEventLog(std::filesystem::path path);
    ~FileEventLog() override;
    FileEventLog(const FileEventLog&) = delete;
    FileEventLog& operator=(const FileEventLog&) = delete;

    void append(const std::string& line) override;

private:
    std::filesystem::path path_;
    int fd_ = -1;
    bool needs_newline_ = false;
};

/// Keeps events in memory; for simulations and tests.
class MemoryEventLog final : public EventLog {
public:
    void append(const std::string& line) override { lines_.push_back(line); }
    [[nodiscard]] const std::vector<std::string>& lines() const noexcept { return lines_; }

private:
    std::vector<std::string> lines_;
};

struct LogWarning {
    std::uint64_t byte_offset = 0;
    std::string message;
};

struct LogContents {
    std::vector<Session> sessions;      // in creation order, cursors replayed
    std::vector<TrialRecord> records;   // sorted by (session_id, question_index)
    std::vector<LogWarning> warnings;   // corrupt or inconsistent lines, skipped
};

/// Parses an event log. Bad lines (e.g. a torn trailing write) are skipped and
/// reported with their byte offset; everything valid before and after is kept.
LogContents replay_log(std::istream& in);
LogContents replay_log(const std::filesystem::path& path);

/// Response rows of a log in the analysis CSV schema, ordered by
/// (session_id, question_index).
struct ExportResult {
    std::vector<TrialRecord> records;
    std::vector<LogWarning> warnings;
};
ExportResult export_responses(std::istream& log);
ExportResult export_responses(const std::filesystem::path& log_path);

/// Replay counts reported by the client, keyed by "reference", "a", "b".
using PlayCounts = std::map<std::string, std::int64_t>;

/// Server-side state of the forced-choice experiment. Every mutation is
/// appended to the event log before it becomes visible or is acknowledged.
/// Thread-safe.
class ExperimentStore {
public:
    ExperimentStore(StimulusSet stimuli, std::unique_ptr<EventLog> log, std::string media_secret);

    /// Rebuilds state from the log at `log_path` (if it exists) and keeps
    /// appending to it. Replay warnings are available from warnings().
    static std::unique_ptr<ExperimentStore> open(StimulusSet stimuli,
                                                 const std::filesystem::path& log_path,
                                                 std::string media_secret);

    Session create_session(const std::string& participant_id, std::uint64_t seed);

    /// nullopt once every trial has been answered. NotFound for unknown ids.
    [[nodiscard]] std::optional<TrialView> next_trial(const std::string& session_id);

    /// Records the answer to trial `question_index` (must be cursor + 1).
    /// Conflict if already answered, Sequencing if out of order.
    TrialRecord record_response(const std::string& session_id, std::uint32_t question_index,
                                Choice response, const PlayCounts& play_counts = {});

    [[nodiscard]] Session session(const std::string& session_id) const;
    [[nodiscard]] std::size_t session_count() const;
    [[nodiscard]] std::vector<TrialRecord> records() const;

    /// File behind an opaque media token, if the token was issued.
    [[nodiscard]] std::optional<std::filesystem::path> resolve_media(const std::string& token) const;

    [[nodiscard]] const StimulusSet& stimuli() const noexcept { return stimuli_; }
    [[nodiscard]] const std::vector<LogWarning>& warnings() const noexcept { return warnings_; }

private:
    void adopt(LogContents contents);
    void issue_tokens(const Session& s, std::uint32_t trial);
    [[nodiscard]] std::string media_token(const std::string& session_id, std::uint32_t trial,
                                          std::string_view role) const;
    Session& find_locked(const std::string& session_id);
    [[nodiscard]] const Session& find_locked(const std::string& session_id) const;

    StimulusSet stimuli_;
    std::unique_ptr<EventLog> log_;
    std::string secret_;
    mutable std::shared_mutex mutex_;
    std::vector<std::string> order_;  // session ids in creation order
    std::unordered_map<std::string, Session> sessions_;
    std::unordered_map<std::string, std::filesystem::path> media_;
    std::map<std::pair<std::string, std::uint32_t>, TrialRecord> records_;
    std::vector<LogWarning> warnings_;
};

/// Hex HMAC-SHA256 of `message` under `key`.
std::string hmac_sha256_hex(std::string_view key, std::string_view message);

}  // namespace intercept::experiment
