#include "intercept/analysis.hpp"

#include <cmath>

#include <json.hpp>

#include "intercept/error.hpp"

namespace intercept::analysis {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json to_json(const stats::SummaryStats& s) {
    ordered_json j;
    j["mean"] = s.mean;
    j["median"] = optional_number(s.median);
    j["sd"] = s.sd;
    j["t_statistic"] = optional_number(s.t_statistic);
    j["p_value"] = optional_number(s.p_value);
    j["n"] = s.n;
    return j;
}

}  // namespace

Counts count(const ResponseSet& responses) {
    Counts c;
    for (const TrialRecord& r : responses.records) {
        (r.correct ? c.successes : c.failures) += 1;
    }
    return c;
}

std::vector<double> participant_accuracies(const ResponseSet& responses,
                                           std::optional<audio::Category> category) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // correct, total
    for (const TrialRecord& r : responses.records) {
        if (category && r.category != *category) {
            continue;
        }
        auto& [correct, total] = tally[r.participant_id];
        correct += r.correct ? 1 : 0;
        total += 1;
    }
    std::vector<double> out;
    out.reserve(tally.size());
    for (const auto& [id, t] : tally) {
        out.push_back(static_cast<double>(t.first) / static_cast<double>(t.second));
    }
    return out;
}

stats::SummaryStats category_summary(const ResponseSet& responses, audio::Category category) {
    const auto acc = participant_accuracies(responses, category);
    if (acc.empty()) {
        fail(ErrorCode::NoData, "no trials in category " + std::string(audio::to_string(category)));
    }
    return stats::describe(acc, kChance);
}

stats::SummaryStats overall_summary(const ResponseSet& responses) {
    const auto acc = participant_accuracies(responses);
    if (acc.empty()) {
        fail(ErrorCode::NoData, "no trials recorded");
    }
    return stats::describe(acc, kChance);
}

std::vector<QuestionScore> question_scores(const ResponseSet& responses) {
    std::map<std::uint32_t, std::pair<std::size_t, std::size_t>> tally;
    for (const TrialRecord& r : responses.records) {
        auto& [correct, total] = tally[r.question_index];
        correct += r.correct ? 1 : 0;
        total += 1;
    }
    std::vector<QuestionScore> out;
    for (const auto& [index, t] : tally) {
        out.push_back({index, static_cast<double>(t.first) / static_cast<double>(t.second), t.second});
    }
    return out;
}

stats::TrendLine question_trend(const ResponseSet& responses) {
    const auto scores = question_scores(responses);
    if (scores.size() < 2) {
        fail(ErrorCode::NoData, "question trend needs at least two distinct question indices");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& q : scores) {
        xs.push_back(static_cast<double>(q.question_index));
        ys.push_back(q.mean_score);
    }
    return stats::fit_line(xs, ys);
}

Report analyze(const ResponseSet& responses, double credible_mass) {
    Report report;
    report.counts = count(responses);
    report.posterior = stats::posterior_update(report.prior, report.counts.successes, report.counts.failures);
    report.credible_mass = credible_mass;
    report.credible = stats::credible_interval(report.posterior, credible_mass);
    if (!responses.records.empty()) {
        report.overall = overall_summary(responses);
    }
    for (auto category : {audio::Category::Music, audio::Category::Speech, audio::Category::Other}) {
        if (!participant_accuracies(responses, category).empty()) {
            report.categories.emplace(category, category_summary(responses, category));
        }
    }
    report.questions = question_scores(responses);
    if (report.questions.size() >= 2) {
        report.trend = question_trend(responses);
    }
    return report;
}

std::string report_to_json(const Report& report) {
    ordered_json doc;
    doc["trials"] = report.counts.successes + report.counts.failures;
    doc["successes"] = report.counts.successes;
    doc["failures"] = report.counts.failures;
    doc["prior"] = {{"alpha", report.prior.alpha()}, {"beta", report.prior.beta()}};
    doc["posterior"] = {{"alpha", report.posterior.alpha()},
                        {"beta", report.posterior.beta()},
                        {"mean", report.posterior.mean()}};
    doc["credible_interval"] = {
        {"mass", report.credible_mass}, {"lo", report.credible.lo}, {"hi", report.credible.hi}};
    doc["overall"] = report.overall ? to_json(*report.overall) : ordered_json(nullptr);
    ordered_json cats = ordered_json::object();
    for (const auto& [category, s] : report.categories) {
        cats[std::string(audio::to_string(category))] = to_json(s);
    }
    doc["categories"] = cats;
    if (report.trend) {
        doc["trend"] = {{"slope", report.trend->slope}, {"intercept", report.trend->intercept}};
    } else {
        doc["trend"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string plot_data_json(const Report& report) {
    ordered_json doc;
    ordered_json grid = ordered_json::array();
    ordered_json density = ordered_json::array();
    for (std::size_t i = 0; i < kPlotGridPoints; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(kPlotGridPoints);
        grid.push_back(q);
        density.push_back(stats::beta_pdf(report.posterior, q));
    }
    doc["posterior"] = {{"alpha", report.posterior.alpha()},
                        {"beta", report.posterior.beta()},
                        {"q", grid},
                        {"density", density}};
    ordered_json questions = ordered_json::array();
    for (const auto& q : report.questions) {
        questions.push_back(
            {{"question_index", q.question_index}, {"mean_score", q.mean_score}, {"answers", q.answers}});
    }
    doc["questions"] = questions;
    if (report.trend) {
        doc["trend"] = {{"slope", report.trend->slope}, {"intercept", report.trend->intercept}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace intercept::analysis
