#include "intercept/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "intercept/error.hpp"

namespace intercept::stats {

namespace {

constexpr double kConvergence = 1e-12;
constexpr double kTiny = 1e-300;

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a, b); converges fast for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kConvergence) {
            return h;
        }
    }
    fail(ErrorCode::InvalidArgument, "incomplete beta: continued fraction did not converge");
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BetaBelief::BetaBelief(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        fail(ErrorCode::InvalidArgument, "Beta parameters must be finite and positive");
    }
}

BetaBelief posterior_update(const BetaBelief& prior, std::int64_t successes, std::int64_t failures) {
    if (successes < 0 || failures < 0) {
        fail(ErrorCode::InvalidArgument, "success and failure counts must be non-negative");
    }
    return BetaBelief(prior.alpha() + static_cast<double>(successes),
                      prior.beta() + static_cast<double>(failures));
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        fail(ErrorCode::InvalidArgument, "incomplete beta: parameters must be positive");
    }
    if (std::isnan(x) || x < 0.0 || x > 1.0) {
        fail(ErrorCode::InvalidArgument, "incomplete beta: x must lie in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_pdf(const BetaBelief& belief, double x) {
    const double a = belief.alpha();
    const double b = belief.beta();
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? b : 0.0);
    if (x == 1.0) return b < 1.0 ? std::numeric_limits<double>::infinity() : (b == 1.0 ? a : 0.0);
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

double beta_cdf(const BetaBelief& belief, double x) {
    return regularized_incomplete_beta(belief.alpha(), belief.beta(), std::clamp(x, 0.0, 1.0));
}

double beta_inv_cdf(const BetaBelief& belief, double p) {
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
        fail(ErrorCode::InvalidArgument, "quantile probability must lie in [0, 1]");
    }
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    double lo = 0.0;
    double hi = 1.0;
    double x = belief.mean();
    for (int iter = 0; iter < 200; ++iter) {
        const double f = beta_cdf(belief, x) - p;
        if (f == 0.0) {
            return x;
        }
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo < 1e-15) {
            break;
        }
        const double density = beta_pdf(belief, x);
        double next = density > 0.0 && std::isfinite(density) ? x - f / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) < 1e-15) {
            return next;
        }
        x = next;
    }
    return x;
}

Interval credible_interval(const BetaBelief& belief, double mass) {
    if (!(mass > 0.0 && mass < 1.0)) {
        fail(ErrorCode::InvalidArgument, "credible mass must lie in (0, 1)");
    }
    const double tail = 0.5 * (1.0 - mass);
    return Interval{beta_inv_cdf(belief, tail), beta_inv_cdf(belief, 1.0 - tail)};
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) {
        fail(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        fail(ErrorCode::InvalidArgument, "t statistic is NaN");
    }
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) {
        fail(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    }
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

SummaryStats one_sample_t(double mean, double sd, std::size_t n, double mu0) {
    if (n < 2) {
        fail(ErrorCode::DegenerateData, "t-test needs at least two values");
    }
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean) || !std::isfinite(mu0)) {
        fail(ErrorCode::DegenerateData, "t-test needs finite data with non-zero variance");
    }
    SummaryStats s;
    s.mean = mean;
    s.sd = sd;
    s.n = n;
    const double t = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
    s.t_statistic = t;
    s.p_value = student_t_two_sided_p(t, static_cast<double>(n - 1));
    return s;
}

SummaryStats one_sample_t(std::span<const double> values, double mu0) {
    if (values.size() < 2) {
        fail(ErrorCode::DegenerateData, "t-test needs at least two values");
    }
    if (std::any_of(values.begin(), values.end(), [](double v) { return !std::isfinite(v); })) {
        fail(ErrorCode::InvalidArgument, "t-test values must be finite");
    }
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    SummaryStats s = one_sample_t(mean, sd, values.size(), mu0);
    s.median = median_of({values.begin(), values.end()});
    return s;
}

SummaryStats describe(std::span<const double> values, double mu0) {
    if (values.empty()) {
        fail(ErrorCode::NoData, "no values to summarize");
    }
    try {
        return one_sample_t(values, mu0);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateData) {
            throw;
        }
    }
    const auto n = static_cast<double>(values.size());
    SummaryStats s;
    s.n = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    s.median = median_of({values.begin(), values.end()});
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

TrendLine fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        fail(ErrorCode::InvalidArgument, "fit_line: x and y differ in length");
    }
    if (xs.size() < 2) {
        fail(ErrorCode::NoData, "fit_line: need at least two points");
    }
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        fail(ErrorCode::NoData, "fit_line: need at least two distinct x values");
    }
    const double slope = sxy / sxx;
    return TrendLine{slope, my - slope * mx};
}

}  // namespace intercept::stats
