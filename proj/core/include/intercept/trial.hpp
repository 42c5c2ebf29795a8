#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intercept/stimuli.hpp"

namespace intercept {

enum class Assignment { OriginalIsA, OriginalIsB };
enum class Choice { A, B };

std::string_view to_string(Assignment a) noexcept;
std::string_view to_string(Choice c) noexcept;
std::optional<Assignment> parse_assignment(std::string_view text) noexcept;
std::optional<Choice> parse_choice(std::string_view text) noexcept;

/// True when `response` picks the side that holds the original.
constexpr bool is_correct(Assignment assignment, Choice response) noexcept {
    return (assignment == Assignment::OriginalIsA) == (response == Choice::A);
}

/// One answered A/B forced-choice trial.
struct TrialRecord {
    std::string session_id;
    std::string participant_id;
    std::uint32_t question_index = 0;  // 1-based presentation order
    std::string stimulus_id;
    audio::Category category = audio::Category::Other;
    Assignment assignment = Assignment::OriginalIsA;
    Choice response = Choice::A;
    bool correct = false;
    double theta = 0.0;
    std::string timestamp_utc;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline constexpr std::string_view kResponsesCsvHeader =
    "session_id,participant_id,question_index,stimulus_id,category,assignment,response,correct,"
    "theta,timestamp_utc";

/// One CSV line (no trailing newline). Fields containing commas, quotes or
/// line breaks are quoted.
std::string to_csv_row(const TrialRecord& record);

void write_responses_csv(std::ostream& out, const std::vector<TrialRecord>& records);

/// Parses a responses CSV. The header must match kResponsesCsvHeader exactly.
/// Rows whose participant_id is in `excluded_participants` are dropped.
/// MalformedFile (with the line number) on a bad row.
std::vector<TrialRecord> read_responses_csv(std::istream& in,
                                            const std::vector<std::string>& excluded_participants = {});

/// Current UTC time as 2024-01-31T12:34:56.789Z.
std::string utc_timestamp();

}  // namespace intercept
