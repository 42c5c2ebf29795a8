#include "intercept/experiment.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "intercept/error.hpp"
#include "intercept/random.hpp"

namespace intercept::experiment {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

json session_event(const Session& s) {
    json assignments = json::array();
    for (Assignment a : s.assignments) {
        assignments.push_back(std::string(to_string(a)));
    }
    return json{{"event", "session_created"},
                {"session_id", s.session_id},
                {"participant_id", s.participant_id},
                {"seed", s.seed},
                {"created_utc", s.created_utc},
                {"trial_order", s.trial_order},
                {"assignments", assignments}};
}

json response_event(const TrialRecord& r, const PlayCounts& play_counts) {
    return json{{"event", "response"},
                {"session_id", r.session_id},
                {"participant_id", r.participant_id},
                {"question_index", r.question_index},
                {"stimulus_id", r.stimulus_id},
                {"category", std::string(audio::to_string(r.category))},
                {"assignment", std::string(to_string(r.assignment))},
                {"response", std::string(to_string(r.response))},
                {"correct", r.correct},
                {"theta", r.theta},
                {"timestamp_utc", r.timestamp_utc},
                {"play_counts", play_counts}};
}

Session parse_session(const json& j) {
    Session s;
    s.session_id = j.at("session_id").get<std::string>();
    s.participant_id = j.at("participant_id").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.created_utc = j.value("created_utc", std::string{});
    s.trial_order = j.at("trial_order").get<std::vector<std::string>>();
    for (const auto& a : j.at("assignments")) {
        const auto parsed = parse_assignment(a.get<std::string>());
        if (!parsed) {
            throw std::invalid_argument("bad assignment value");
        }
        s.assignments.push_back(*parsed);
    }
    if (s.assignments.size() != s.trial_order.size() || s.session_id.empty()) {
        throw std::invalid_argument("inconsistent session event");
    }
    return s;
}

TrialRecord parse_record(const json& j) {
    TrialRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.participant_id = j.at("participant_id").get<std::string>();
    r.question_index = j.at("question_index").get<std::uint32_t>();
    r.stimulus_id = j.at("stimulus_id").get<std::string>();
    const auto category = audio::parse_category(j.at("category").get<std::string>());
    const auto assignment = parse_assignment(j.at("assignment").get<std::string>());
    const auto response = parse_choice(j.at("response").get<std::string>());
    if (!category || !assignment || !response) {
        throw std::invalid_argument("bad enum value in response event");
    }
    r.category = *category;
    r.assignment = *assignment;
    r.response = *response;
    r.correct = j.at("correct").get<bool>();
    r.theta = j.at("theta").get<double>();
    r.timestamp_utc = j.value("timestamp_utc", std::string{});
    if (r.correct != is_correct(r.assignment, r.response)) {
        throw std::invalid_argument("correct flag disagrees with assignment and response");
    }
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

StimulusSet::StimulusSet(std::vector<StimulusInfo> stimuli) : stimuli_(std::move(stimuli)) {
    for (std::size_t i = 0; i < stimuli_.size(); ++i) {
        if (!index_.emplace(stimuli_[i].id, i).second) {
            fail(ErrorCode::Configuration, "duplicate stimulus id " + stimuli_[i].id);
        }
    }
}

StimulusSet StimulusSet::from_manifest(const audio::StimulusManifest& manifest,
                                       const std::filesystem::path& base_dir) {
    std::vector<StimulusInfo> out;
    for (const auto& e : manifest.stimuli) {
        out.push_back({e.stimulus_id, e.category, e.theta, base_dir / e.original_file,
                       base_dir / e.distorted_file});
    }
    return StimulusSet(std::move(out));
}

const StimulusInfo* StimulusSet::find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &stimuli_[it->second];
}

SessionLayout make_layout(const std::string& participant_id, std::uint64_t seed,
                          const std::vector<std::string>& stimulus_ids) {
    CounterRng rng(seed, fnv1a(participant_id));
    SessionLayout layout;
    layout.trial_order = stimulus_ids;
    // Fisher-Yates.
    for (std::size_t i = layout.trial_order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(layout.trial_order[i - 1], layout.trial_order[j]);
    }
    layout.assignments.reserve(stimulus_ids.size());
    for (std::size_t i = 0; i < stimulus_ids.size(); ++i) {
        layout.assignments.push_back((rng.next_u64() >> 63) == 0 ? Assignment::OriginalIsA
                                                                  : Assignment::OriginalIsB);
    }
    return layout;
}

// ---------------------------------------------------------------------------

FileEventLog::FileEventLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        fail(ErrorCode::IoFailure, path_.string() + ": cannot open event log: " + std::strerror(errno));
    }
    // A torn final write leaves no newline; the next event must start fresh.
    struct stat st {};
    if (::fstat(fd_, &st) == 0 && st.st_size > 0) {
        char last = '\n';
        if (::pread(fd_, &last, 1, st.st_size - 1) == 1 && last != '\n') {
            needs_newline_ = true;
        }
    }
}

FileEventLog::~FileEventLog() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void FileEventLog::append(const std::string& line) {
    std::string buffer;
    if (needs_newline_) {
        buffer += '\n';
    }
    buffer += line;
    buffer += '\n';
    const char* p = buffer.data();
    std::size_t left = buffer.size();
    while (left > 0) {
        const ssize_t n = ::write(fd_, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(ErrorCode::IoFailure, path_.string() + ": append failed: " + std::strerror(errno));
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        fail(ErrorCode::IoFailure, path_.string() + ": fsync failed: " + std::strerror(errno));
    }
    needs_newline_ = false;
}

// ---------------------------------------------------------------------------

LogContents replay_log(std::istream& in) {
    LogContents out;
    std::unordered_map<std::string, std::size_t> by_id;
    std::map<std::pair<std::string, std::uint32_t>, TrialRecord> records;

    std::uint64_t offset = 0;
    std::string line;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        if (line.empty()) {
            continue;
        }
        auto warn = [&](const std::string& what) {
            out.warnings.push_back({line_offset, "byte offset " + std::to_string(line_offset) + ": " + what});
        };
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            warn("corrupt log line skipped");
            continue;
        }
        try {
            const std::string type = j.at("event").get<std::string>();
            if (type == "session_created") {
                Session s = parse_session(j);
                if (by_id.count(s.session_id) != 0) {
                    warn("duplicate session " + s.session_id + " skipped");
                    continue;
                }
                by_id.emplace(s.session_id, out.sessions.size());
                out.sessions.push_back(std::move(s));
            } else if (type == "response") {
                TrialRecord r = parse_record(j);
                const auto it = by_id.find(r.session_id);
                if (it == by_id.end()) {
                    warn("response for unknown session " + r.session_id + " skipped");
                    continue;
                }
                Session& s = out.sessions[it->second];
                if (r.question_index != s.cursor + 1 || r.question_index > s.trial_order.size()) {
                    warn("out-of-sequence or duplicate response skipped");
                    continue;
                }
                if (s.trial_order[r.question_index - 1] != r.stimulus_id) {
                    warn("response names the wrong stimulus; skipped");
                    continue;
                }
                s.cursor += 1;
                records.emplace(std::make_pair(r.session_id, r.question_index), std::move(r));
            } else {
                warn("unknown event type '" + type + "' skipped");
            }
        } catch (const std::exception& e) {
            warn(std::string("invalid event skipped: ") + e.what());
        }
    }
    for (auto& [key, r] : records) {
        out.records.push_back(std::move(r));
    }
    return out;
}

LogContents replay_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::FileNotFound, path.string() + ": cannot open event log");
    }
    return replay_log(in);
}

ExportResult export_responses(std::istream& log) {
    LogContents contents = replay_log(log);
    return ExportResult{std::move(contents.records), std::move(contents.warnings)};
}

ExportResult export_responses(const std::filesystem::path& log_path) {
    LogContents contents = replay_log(log_path);
    return ExportResult{std::move(contents.records), std::move(contents.warnings)};
}

// ---------------------------------------------------------------------------

std::string hmac_sha256_hex(std::string_view key, std::string_view message) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(message.data()), message.size(), digest,
             &length) == nullptr) {
        fail(ErrorCode::IoFailure, "HMAC computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

ExperimentStore::ExperimentStore(StimulusSet stimuli, std::unique_ptr<EventLog> log,
                                 std::string media_secret)
    : stimuli_(std::move(stimuli)), log_(std::move(log)), secret_(std::move(media_secret)) {
    if (!log_) {
        fail(ErrorCode::Configuration, "experiment store needs an event log");
    }
    if (secret_.empty()) {
        fail(ErrorCode::Configuration, "media secret must not be empty");
    }
}

std::unique_ptr<ExperimentStore> ExperimentStore::open(StimulusSet stimuli,
                                                       const std::filesystem::path& log_path,
                                                       std::string media_secret) {
    std::optional<LogContents> contents;
    std::error_code ec;
    if (std::filesystem::exists(log_path, ec)) {
        contents = replay_log(log_path);
    }
    auto store = std::make_unique<ExperimentStore>(std::move(stimuli),
                                                   std::make_unique<FileEventLog>(log_path),
                                                   std::move(media_secret));
    if (contents) {
        store->adopt(std::move(*contents));
    }
    return store;
}

void ExperimentStore::adopt(LogContents contents) {
    const std::unique_lock lock(mutex_);
    for (Session& s : contents.sessions) {
        for (const auto& id : s.trial_order) {
            if (stimuli_.find(id) == nullptr) {
                fail(ErrorCode::Configuration,
                     "event log references stimulus '" + id + "' missing from the manifest");
            }
        }
        order_.push_back(s.session_id);
        if (!s.done()) {
            issue_tokens(s, s.cursor);
        }
        sessions_.emplace(s.session_id, std::move(s));
    }
    for (TrialRecord& r : contents.records) {
        const auto key = std::make_pair(r.session_id, r.question_index);
        records_.emplace(key, std::move(r));
    }
    warnings_ = std::move(contents.warnings);
}

std::string ExperimentStore::media_token(const std::string& session_id, std::uint32_t trial,
                                         std::string_view role) const {
    return hmac_sha256_hex(secret_, "media/" + session_id + "/" + std::to_string(trial) + "/" +
                                        std::string(role))
        .substr(0, 32);
}

void ExperimentStore::issue_tokens(const Session& s, std::uint32_t trial) {
    const StimulusInfo* info = stimuli_.find(s.trial_order[trial]);
    const bool original_is_a = s.assignments[trial] == Assignment::OriginalIsA;
    media_[media_token(s.session_id, trial, "reference")] = info->original_path;
    media_[media_token(s.session_id, trial, "a")] = original_is_a ? info->original_path : info->distorted_path;
    media_[media_token(s.session_id, trial, "b")] = original_is_a ? info->distorted_path : info->original_path;
}

Session& ExperimentStore::find_locked(const std::string& session_id) {
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        fail(ErrorCode::NotFound, "unknown session " + session_id);
    }
    return it->second;
}

const Session& ExperimentStore::find_locked(const std::string& session_id) const {
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        fail(ErrorCode::NotFound, "unknown session " + session_id);
    }
    return it->second;
}

Session ExperimentStore::create_session(const std::string& participant_id, std::uint64_t seed) {
    if (participant_id.empty()) {
        fail(ErrorCode::InvalidArgument, "participant_id must not be empty");
    }
    if (stimuli_.size() == 0) {
        fail(ErrorCode::Configuration, "stimulus manifest is empty");
    }
    std::vector<std::string> ids;
    ids.reserve(stimuli_.size());
    for (const auto& s : stimuli_.all()) {
        ids.push_back(s.id);
    }
    SessionLayout layout = make_layout(participant_id, seed, ids);

    const std::unique_lock lock(mutex_);
    Session s;
    for (std::uint64_t attempt = 0;; ++attempt) {
        s.session_id = hmac_sha256_hex(secret_, "session/" + participant_id + "/" + std::to_string(seed) +
                                                    "/" + std::to_string(order_.size()) + "/" +
                                                    std::to_string(attempt))
                           .substr(0, 24);
        if (sessions_.count(s.session_id) == 0) {
            break;
        }
    }
    s.participant_id = participant_id;
    s.trial_order = std::move(layout.trial_order);
    s.assignments = std::move(layout.assignments);
    s.created_utc = utc_timestamp();
    s.seed = seed;

    log_->append(session_event(s).dump());
    order_.push_back(s.session_id);
    issue_tokens(s, 0);
    sessions_.emplace(s.session_id, s);
    return s;
}

std::optional<TrialView> ExperimentStore::next_trial(const std::string& session_id) {
    const std::shared_lock lock(mutex_);
    const Session& s = find_locked(session_id);
    if (s.done()) {
        return std::nullopt;
    }
    TrialView view;
    view.question_index = s.cursor + 1;
    view.total_questions = static_cast<std::uint32_t>(s.trial_order.size());
    view.reference_url = "/media/" + media_token(s.session_id, s.cursor, "reference");
    view.a_url = "/media/" + media_token(s.session_id, s.cursor, "a");
    view.b_url = "/media/" + media_token(s.session_id, s.cursor, "b");
    return view;
}

TrialRecord ExperimentStore::record_response(const std::string& session_id, std::uint32_t question_index,
                                             Choice response, const PlayCounts& play_counts) {
    const std::unique_lock lock(mutex_);
    Session& s = find_locked(session_id);
    const auto total = static_cast<std::uint32_t>(s.trial_order.size());
    if (question_index >= 1 && question_index <= s.cursor) {
        fail(ErrorCode::Conflict, "question " + std::to_string(question_index) + " already answered");
    }
    if (question_index != s.cursor + 1 || question_index > total) {
        fail(ErrorCode::Sequencing, "expected question " + std::to_string(s.cursor + 1) + ", got " +
                                        std::to_string(question_index));
    }
    const std::uint32_t trial = question_index - 1;
    const StimulusInfo* info = stimuli_.find(s.trial_order[trial]);

    TrialRecord r;
    r.session_id = s.session_id;
    r.participant_id = s.participant_id;
    r.question_index = question_index;
    r.stimulus_id = info->id;
    r.category = info->category;
    r.assignment = s.assignments[trial];
    r.response = response;
    r.correct = is_correct(r.assignment, response);
    r.theta = info->theta;
    r.timestamp_utc = utc_timestamp();

    log_->append(response_event(r, play_counts).dump());
    s.cursor += 1;
    records_.emplace(std::make_pair(r.session_id, r.question_index), r);
    if (!s.done()) {
        issue_tokens(s, s.cursor);
    }
    return r;
}

Session ExperimentStore::session(const std::string& session_id) const {
    const std::shared_lock lock(mutex_);
    return find_locked(session_id);
}

std::size_t ExperimentStore::session_count() const {
    const std::shared_lock lock(mutex_);
    return sessions_.size();
}

std::vector<TrialRecord> ExperimentStore::records() const {
    const std::shared_lock lock(mutex_);
    std::vector<TrialRecord> out;
    out.reserve(records_.size());
    for (const auto& [key, r] : records_) {
        out.push_back(r);
    }
    return out;
}

std::optional<std::filesystem::path> ExperimentStore::resolve_media(const std::string& token) const {
    const std::shared_lock lock(mutex_);
    const auto it = media_.find(token);
    if (it == media_.end()) {
        return std::nullopt;
    }
    return it->second;
}

}  // namespace intercept::experiment
