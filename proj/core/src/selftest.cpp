#include "intercept/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <json.hpp>

#include "intercept/augment.hpp"
#include "intercept/dsp.hpp"
#include "intercept/random.hpp"

namespace intercept::selftest {

namespace {

using dsp::Complex;
using dsp::PhaseAngle;
using dsp::Signal;

constexpr std::uint32_t kRate = 48000;

double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_unit(); }

// Lengths alternate parity so both odd and even transforms are covered.
std::size_t draw_length(CounterRng& rng, std::size_t index, std::size_t max_length) {
    std::size_t n = 2 + rng.next_below(max_length - 1);
    if (n % 2 != index % 2) {
        n = n + 1 <= max_length ? n + 1 : n - 1;
    }
    return std::max<std::size_t>(n, 2);
}

// Noise, tones, impulses and offsets, so DC and Nyquist content both occur.
Signal draw_signal(CounterRng& rng, std::size_t n) {
    Signal x{std::vector<double>(n, 0.0), kRate};
    switch (rng.next_below(4)) {
        case 0:
            for (auto& v : x.samples) v = uniform(rng, -1.0, 1.0);
            break;
        case 1: {
            const int tones = 1 + static_cast<int>(rng.next_below(5));
            for (int t = 0; t < tones; ++t) {
                const double f = uniform(rng, 0.0, 0.5);
                const double a = uniform(rng, 0.05, 0.5);
                const double ph = uniform(rng, -std::numbers::pi, std::numbers::pi);
                for (std::size_t i = 0; i < n; ++i) {
                    x.samples[i] += a * std::sin(2.0 * std::numbers::pi * f * double(i) + ph);
                }
            }
            break;
        }
        case 2:
            for (int k = 0; k < 3; ++k) {
                x.samples[rng.next_below(n)] += uniform(rng, -1.0, 1.0);
            }
            break;
        default: {
            const double offset = uniform(rng, -0.5, 0.5);
            for (auto& v : x.samples) v = offset + uniform(rng, -0.5, 0.5);
            break;
        }
    }
    return x;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double diff = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        diff += (got[i] - want[i]) * (got[i] - want[i]);
    }
    const double ref = norm(want);
    return ref > 0.0 ? std::sqrt(diff) / ref : std::sqrt(diff);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

void remove_mean(Signal& x) {
    double mean = 0.0;
    for (double v : x.samples) mean += v;
    mean /= double(x.size());
    for (auto& v : x.samples) v -= mean;
}

// Projects out the alternating (Nyquist) component of an even-length signal.
void remove_nyquist(Signal& x) {
    const std::size_t n = x.size();
    if (n % 2 != 0) return;
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += (i % 2 == 0 ? 1.0 : -1.0) * x.samples[i];
    c /= double(n);
    for (std::size_t i = 0; i < n; ++i) x.samples[i] -= (i % 2 == 0 ? 1.0 : -1.0) * c;
}

// Direct evaluation of the bin rule through the quadratic DFT.
std::vector<double> direct(const Signal& x, const std::function<Complex(int)>& factor) {
    const std::size_t n = x.size();
    std::vector<Complex> in(x.samples.begin(), x.samples.end());
    auto bins = dsp::naive_dft(in);
    for (std::size_t k = 0; k < n; ++k) {
        const long signed_index = 2 * k < n ? long(k) : long(k) - long(n);
        const int s = (k == 0 || 2 * k == n) ? 0 : (signed_index > 0 ? 1 : -1);
        bins[k] *= factor(s);
    }
    const auto back = dsp::naive_idft(bins);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real();
    return out;
}

class Check {
public:
    Check(std::string name, double tolerance) : result_{std::move(name), true, 0.0, tolerance, 0} {}
    void observe(double err) {
        ++result_.cases;
        if (!(err <= result_.tolerance)) result_.passed = false;
        if (std::isnan(err) || err > result_.worst) result_.worst = std::isnan(err) ? INFINITY : err;
    }
    CheckResult done() && { return std::move(result_); }

private:
    CheckResult result_;
};

}  // namespace

std::vector<CheckResult> run_invariant_suite(const Options& options) {
    CounterRng rng(options.seed, 0x5e1f7e57);
    const auto draw = [&](std::size_t i, std::size_t max_len) {
        return draw_signal(rng, draw_length(rng, i, max_len));
    };
    const auto theta = [&] { return PhaseAngle(uniform(rng, -std::numbers::pi, std::numbers::pi)); };

    Check round_trip("round_trip", 1e-9);
    Check composition("composition", 1e-9);
    Check magnitude("magnitude_invariance", 1e-9);
    Check orthogonality("hilbert_orthogonality", 1e-9);
    Check involution("hilbert_involution", 1e-9);
    Check linearity("hilbert_linearity", 1e-9);
    Check realness("realness_residue", 1e-9);
    Check polarity("polarity_equivalence", 1e-9);
    Check oracle("oracle_equivalence", 1e-10);

    for (std::size_t i = 0; i < options.signals; ++i) {
        const Signal x = draw(i, options.max_length);

        const PhaseAngle t = theta();
        const auto shifted = dsp::phase_shift_with_residue(x, t);
        realness.observe(shifted.max_imag_residue);
        round_trip.observe(
            rel_l2(dsp::phase_shift(shifted.signal, PhaseAngle(-t.radians())).samples, x.samples));

        const PhaseAngle t2 = theta();
        composition.observe(rel_l2(dsp::phase_shift(shifted.signal, t2).samples,
                                   dsp::phase_shift(x, PhaseAngle(t.radians() + t2.radians())).samples));

        magnitude.observe(max_abs_diff(dsp::magnitude_spectrum(shifted.signal), dsp::magnitude_spectrum(x)));

        const Signal h = dsp::hilbert(x);
        const double hn = norm(h.samples);
        double inner = 0.0;
        double mean = 0.0;
        for (double v : x.samples) mean += v;
        mean /= double(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) inner += (x.samples[k] - mean) * h.samples[k];
        orthogonality.observe(hn > 0.0 ? std::abs(inner) / (norm(x.samples) * hn) : 0.0);

        Signal z = x;
        remove_mean(z);
        remove_nyquist(z);
        const Signal hh = dsp::hilbert(dsp::hilbert(z));
        std::vector<double> neg(z.size());
        std::transform(z.samples.begin(), z.samples.end(), neg.begin(), [](double v) { return -v; });
        involution.observe(max_abs_diff(hh.samples, neg));
        polarity.observe(max_abs_diff(dsp::phase_shift(z, PhaseAngle(std::numbers::pi)).samples,
                                      augment::ipa(z).samples));

        Signal y = draw_signal(rng, x.size());
        const double a = uniform(rng, -2.0, 2.0);
        const double b = uniform(rng, -2.0, 2.0);
        Signal mix{std::vector<double>(x.size()), kRate};
        for (std::size_t k = 0; k < x.size(); ++k) mix.samples[k] = a * x.samples[k] + b * y.samples[k];
        const Signal hy = dsp::hilbert(y);
        std::vector<double> expect(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) expect[k] = a * h.samples[k] + b * hy.samples[k];
        linearity.observe(max_abs_diff(dsp::hilbert(mix).samples, expect));
    }

    for (std::size_t i = 0; i < options.signals; ++i) {
        const Signal x = draw(i, options.oracle_max_length);
        const PhaseAngle t = theta();
        const auto rot = [&](int s) { return std::polar(1.0, t.radians() * s); };
        const auto quad = [](int s) { return Complex(0.0, -double(s)); };
        oracle.observe(std::max(max_abs_diff(dsp::phase_shift(x, t).samples, direct(x, rot)),
                                max_abs_diff(dsp::hilbert(x).samples, direct(x, quad))));
    }

    std::vector<CheckResult> out;
    for (Check* c : {&round_trip, &composition, &magnitude, &orthogonality, &involution, &linearity,
                     &realness, &polarity, &oracle}) {
        out.push_back(std::move(*c).done());
    }
    return out;
}

std::string results_to_json(const std::vector<CheckResult>& results) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        arr.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"worst", r.worst},
                       {"tolerance", r.tolerance},
                       {"cases", r.cases}});
    }
    return nlohmann::ordered_json{{"passed", all}, {"checks", arr}}.dump(2) + "\n";
}

}  // namespace intercept::selftest
