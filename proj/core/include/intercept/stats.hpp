#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace intercept::stats {

/// Beta(alpha, beta) belief over a Bernoulli success probability.
class BetaBelief {
public:
    /// Throws InvalidArgument unless both parameters are finite and > 0.
    BetaBelief(double alpha, double beta);

    static BetaBelief uniform() { return BetaBelief(1.0, 1.0); }

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double mean() const noexcept { return alpha_ / (alpha_ + beta_); }

    friend bool operator==(const BetaBelief&, const BetaBelief&) noexcept = default;

private:
    double alpha_;
    double beta_;
};

/// Conjugate update: Beta(alpha + successes, beta + failures).
BetaBelief posterior_update(const BetaBelief& prior, std::int64_t successes, std::int64_t failures);

/// Regularized incomplete beta I_x(a, b), by Lentz's continued fraction
/// (at most kMaxIterations terms, relative convergence 1e-12).
double regularized_incomplete_beta(double a, double b, double x);
inline constexpr int kMaxIterations = 10000;

double beta_pdf(const BetaBelief& belief, double x);
double beta_cdf(const BetaBelief& belief, double x);

/// Quantile of the Beta distribution, safeguarded Newton on the CDF. p in [0, 1].
double beta_inv_cdf(const BetaBelief& belief, double p);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Equal-tailed interval holding `mass` of the distribution; mass in (0, 1).
Interval credible_interval(const BetaBelief& belief, double mass);

/// CDF of Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// P(|T| >= |t|).
double student_t_two_sided_p(double t, double dof);

struct SummaryStats {
    double mean = 0.0;
    std::optional<double> median;  // unavailable in aggregate mode
    double sd = 0.0;               // sample standard deviation (n - 1)
    std::optional<double> t_statistic;
    std::optional<double> p_value;  // two-sided
    std::size_t n = 0;
};

/// One-sample t-test against mu0. DegenerateData for n < 2 or zero variance.
SummaryStats one_sample_t(std::span<const double> values, double mu0);

/// The same test from published aggregates (mean, sample sd, n).
SummaryStats one_sample_t(double mean, double sd, std::size_t n, double mu0);

/// Mean, median and sd of `values` plus the t-test against mu0 when it is
/// defined; t and p stay empty when the data are degenerate. NoData if empty.
SummaryStats describe(std::span<const double> values, double mu0);

struct TrendLine {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs at least two
/// distinct x values (NoData otherwise).
TrendLine fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace intercept::stats
