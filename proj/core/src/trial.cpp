#include "intercept/trial.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>

#include "intercept/error.hpp"

namespace intercept {

namespace {

std::string quote_if_needed(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// RFC 4180 split of a single physical line.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) {
        return std::nullopt;
    }
    fields.push_back(std::move(cur));
    return fields;
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& what) {
    fail(ErrorCode::MalformedFile, "responses CSV line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string_view to_string(Assignment a) noexcept {
    return a == Assignment::OriginalIsA ? "ORIGINAL_IS_A" : "ORIGINAL_IS_B";
}

std::string_view to_string(Choice c) noexcept { return c == Choice::A ? "A" : "B"; }

std::optional<Assignment> parse_assignment(std::string_view text) noexcept {
    if (text == "ORIGINAL_IS_A") return Assignment::OriginalIsA;
    if (text == "ORIGINAL_IS_B") return Assignment::OriginalIsB;
    return std::nullopt;
}

std::optional<Choice> parse_choice(std::string_view text) noexcept {
    if (text == "A") return Choice::A;
    if (text == "B") return Choice::B;
    return std::nullopt;
}

std::string to_csv_row(const TrialRecord& r) {
    std::string row;
    row += quote_if_needed(r.session_id) + ',';
    row += quote_if_needed(r.participant_id) + ',';
    row += std::to_string(r.question_index) + ',';
    row += quote_if_needed(r.stimulus_id) + ',';
    row += std::string(audio::to_string(r.category)) + ',';
    row += std::string(to_string(r.assignment)) + ',';
    row += std::string(to_string(r.response)) + ',';
    row += r.correct ? "true," : "false,";
    row += format_double(r.theta) + ',';
    row += quote_if_needed(r.timestamp_utc);
    return row;
}

void write_responses_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kResponsesCsvHeader << '\n';
    for (const TrialRecord& r : records) {
        out << to_csv_row(r) << '\n';
    }
}

std::vector<TrialRecord> read_responses_csv(std::istream& in,
                                            const std::vector<std::string>& excluded_participants) {
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorCode::MalformedFile, "responses CSV: missing header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResponsesCsvHeader) {
        fail(ErrorCode::MalformedFile, "responses CSV: unexpected header '" + line + "'");
    }

    std::vector<TrialRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (!fields || fields->size() != 10) {
            bad_row(line_no, "expected 10 fields");
        }
        const auto& f = *fields;
        TrialRecord r;
        r.session_id = f[0];
        r.participant_id = f[1];
        try {
            const long q = std::stol(f[2]);
            if (q < 1) bad_row(line_no, "question_index must be >= 1");
            r.question_index = static_cast<std::uint32_t>(q);
            r.theta = f[8].empty() ? 0.0 : std::stod(f[8]);
        } catch (const std::logic_error&) {
            bad_row(line_no, "non-numeric question_index or theta");
        }
        r.stimulus_id = f[3];
        const auto category = audio::parse_category(f[4]);
        const auto assignment = parse_assignment(f[5]);
        const auto response = parse_choice(f[6]);
        if (!category) bad_row(line_no, "unknown category '" + f[4] + "'");
        if (!assignment) bad_row(line_no, "unknown assignment '" + f[5] + "'");
        if (!response) bad_row(line_no, "response must be A or B");
        r.category = *category;
        r.assignment = *assignment;
        r.response = *response;
        if (f[7] == "true" || f[7] == "1") {
            r.correct = true;
        } else if (f[7] == "false" || f[7] == "0") {
            r.correct = false;
        } else {
            bad_row(line_no, "correct must be true or false");
        }
        if (r.correct != is_correct(r.assignment, r.response)) {
            bad_row(line_no, "correct column disagrees with assignment and response");
        }
        r.timestamp_utc = f[9];
        if (std::find(excluded_participants.begin(), excluded_participants.end(), r.participant_id) !=
            excluded_participants.end()) {
            continue;
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string utc_timestamp() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const std::time_t secs = system_clock::to_time_t(now);
    const auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
    return buf;
}

}  // namespace intercept
