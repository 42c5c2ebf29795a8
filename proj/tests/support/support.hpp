#pragma once

// Shared helpers for the unit and acceptance suites: a reference evaluation of
// the spectral rules that does not go through the library's FFT path, seeded
// signal generators, and scratch directories.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "intercept/dsp.hpp"

namespace testing_support {

using Complex = std::complex<double>;

inline std::filesystem::path fixture_dir() { return INTERCEPT_FIXTURE_DIR; }

// Plain O(N^2) DFT written out here so the oracle shares no code with the
// library. Angles are reduced with integer arithmetic before the sin/cos.
inline std::vector<Complex> dft(const std::vector<Complex>& x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = sign * 2.0 * std::numbers::pi * double((k * m) % n) / double(n);
            acc += x[m] * Complex(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? acc / double(n) : acc;
    }
    return out;
}

// Sign of the frequency a DFT bin stands for. Bins above the midpoint alias
// to negative frequencies; the midpoint bin of an even length has no sign.
inline int frequency_sign(std::size_t k, std::size_t n) {
    if (k == 0) return 0;
    const double f = double(k) / double(n);  // cycles per sample in (0, 1)
    if (f < 0.5) return 1;
    if (f > 0.5) return -1;
    return 0;
}

template <typename Factor>
std::vector<double> apply_bins(const std::vector<double>& x, Factor factor) {
    std::vector<Complex> c(x.begin(), x.end());
    auto bins = dft(c, false);
    for (std::size_t k = 0; k < bins.size(); ++k) bins[k] *= factor(frequency_sign(k, bins.size()));
    const auto back = dft(bins, true);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = back[i].real();
    return out;
}

inline std::vector<double> oracle_shift(const std::vector<double>& x, double theta) {
    return apply_bins(x, [theta](int s) { return std::polar(1.0, theta * s); });
}

inline std::vector<double> oracle_hilbert(const std::vector<double>& x) {
    return apply_bins(x, [](int s) { return Complex(0.0, -double(s)); });
}

// ---------------------------------------------------------------------------

inline intercept::dsp::Signal make_signal(std::vector<double> s, std::uint32_t rate = 48000) {
    return intercept::dsp::Signal{std::move(s), rate};
}

// Random test signals: a mixture of noise, tones, impulses and DC offsets.
class SignalGen {
public:
    explicit SignalGen(std::uint64_t seed) : rng_(seed) {}

    std::size_t length(std::size_t lo, std::size_t hi, int parity = -1) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
        if (parity >= 0 && int(n % 2) != parity) n = (n + 1 <= hi) ? n + 1 : n - 1;
        return n;
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }

    std::vector<double> samples(std::size_t n) {
        std::vector<double> x(n, 0.0);
        switch (std::uniform_int_distribution<int>(0, 3)(rng_)) {
            case 0:
                for (auto& v : x) v = uniform(-1.0, 1.0);
                break;
            case 1:
                for (int t = 0, tones = 1 + int(uniform(0, 4)); t < tones; ++t) {
                    const double f = uniform(0.0, 0.5), a = uniform(0.05, 0.4), ph = angle();
                    for (std::size_t i = 0; i < n; ++i) x[i] += a * std::sin(2 * std::numbers::pi * f * i + ph);
                }
                break;
            case 2:
                for (int k = 0; k < 3; ++k) x[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_)] += uniform(-1, 1);
                break;
            default: {
                const double dc = uniform(-0.5, 0.5);
                for (auto& v : x) v = dc + uniform(-0.5, 0.5);
            }
        }
        return x;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline void remove_mean(std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= double(x.size());
    for (auto& v : x) v -= m;
}

inline void remove_alternating(std::vector<double>& x) {
    if (x.size() % 2 != 0) return;
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += (i % 2 ? -1.0 : 1.0) * x[i];
    c /= double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= (i % 2 ? -1.0 : 1.0) * c;
}

inline double l2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double d = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) d += (got[i] - want[i]) * (got[i] - want[i]);
    const double ref = l2(want);
    return ref > 0.0 ? std::sqrt(d) / ref : std::sqrt(d);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double w = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("intercept-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
