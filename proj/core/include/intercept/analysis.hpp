#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intercept/stats.hpp"
#include "intercept/trial.hpp"

namespace intercept::analysis {

/// Chance level of a two-alternative forced choice.
inline constexpr double kChance = 0.5;

struct ResponseSet {
    std::vector<TrialRecord> records;
};

struct Counts {
    std::int64_t successes = 0;
    std::int64_t failures = 0;
};

Counts count(const ResponseSet& responses);

/// Accuracy of each participant (sorted by participant_id), optionally
/// restricted to one category. Participants without trials there are skipped.
std::vector<double> participant_accuracies(const ResponseSet& responses,
                                           std::optional<audio::Category> category = std::nullopt);

/// Across-participant summary of accuracies for one category, tested against
/// chance. NoData when nobody answered a trial in that category. When the
/// t-test is undefined (one participant, zero variance) t and p stay empty.
stats::SummaryStats category_summary(const ResponseSet& responses, audio::Category category);
stats::SummaryStats overall_summary(const ResponseSet& responses);

struct QuestionScore {
    std::uint32_t question_index = 0;
    double mean_score = 0.0;
    std::size_t answers = 0;
};

std::vector<QuestionScore> question_scores(const ResponseSet& responses);

/// Least-squares line through per-question mean scores against the 1-based
/// question index. NoData with fewer than two distinct indices.
stats::TrendLine question_trend(const ResponseSet& responses);

struct Report {
    Counts counts;
    stats::BetaBelief prior = stats::BetaBelief::uniform();
    stats::BetaBelief posterior = stats::BetaBelief::uniform();
    double credible_mass = 0.95;
    stats::Interval credible{};
    std::optional<stats::SummaryStats> overall;
    std::map<audio::Category, stats::SummaryStats> categories;
    std::optional<stats::TrendLine> trend;
    std::vector<QuestionScore> questions;
};

/// Runs every analysis that the data supports; parts with too little data are
/// left empty rather than failing the whole report.
Report analyze(const ResponseSet& responses, double credible_mass = 0.95);

std::string report_to_json(const Report& report);

/// Posterior density on a 512-point grid over (0, 1) and the per-question
/// means, for external plotting.
std::string plot_data_json(const Report& report);

inline constexpr std::size_t kPlotGridPoints = 512;

}  // namespace intercept::analysis
