#include "intercept/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "intercept/error.hpp"

namespace intercept::dsp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kNaiveDftMax = 4096;

// Inverse transform of a spectrum that should be Hermitian; returns the real
// part and reports the largest imaginary leftover.
Signal inverse_to_real(std::span<const Complex> bins, std::uint32_t sample_rate, double* max_imag) {
    const auto time = detail::inverse(bins);
    const double scale = 1.0 / static_cast<double>(bins.size());
    Signal out{std::vector<double>(bins.size()), sample_rate};
    double residue = 0.0;
    for (std::size_t n = 0; n < time.size(); ++n) {
        out.samples[n] = time[n].real() * scale;
        residue = std::max(residue, std::abs(time[n].imag() * scale));
    }
    *max_imag = residue;
    return out;
}

// Real inverse of a half spectrum; the negative-frequency half is implied by
// conjugate symmetry, so the result is real by construction.
Signal half_inverse(std::span<Complex> half, std::size_t n, std::uint32_t sample_rate) {
    const auto time = detail::inverse_half(half, n);
    const double scale = 1.0 / static_cast<double>(n);
    Signal out{std::vector<double>(n), sample_rate};
    std::transform(time.begin(), time.end(), out.samples.begin(), [scale](double v) { return v * scale; });
    return out;
}

std::vector<Complex> direct_dft(std::span<const Complex> x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0) {
        fail(ErrorCode::InvalidArgument, "naive_dft: empty input");
    }
    if (n > kNaiveDftMax) {
        fail(ErrorCode::InvalidArgument,
             "naive_dft: length " + std::to_string(n) + " exceeds oracle limit 4096");
    }
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            // Reduce k*m mod n first so the angle stays in [0, 2*pi).
            const double angle =
                sign * kTwoPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
            acc += x[m] * Complex{std::cos(angle), std::sin(angle)};
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

}  // namespace

PhaseAngle::PhaseAngle(double radians) {
    if (!std::isfinite(radians)) {
        fail(ErrorCode::InvalidArgument, "phase angle must be finite");
    }
    if (radians >= -kPi && radians < kPi) {
        theta_ = radians;
        return;
    }
    double r = std::fmod(radians + kPi, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    theta_ = r - kPi;
    if (theta_ >= kPi || theta_ < -kPi) {
        theta_ = -kPi;
    }
}

PhaseAngle PhaseAngle::from_degrees(double degrees) {
    if (!std::isfinite(degrees)) {
        fail(ErrorCode::InvalidArgument, "phase angle must be finite");
    }
    // Wrap in degrees so that e.g. 400 and 40 map to the same double.
    if (degrees < -180.0 || degrees >= 180.0) {
        double r = std::fmod(degrees + 180.0, 360.0);
        if (r < 0.0) {
            r += 360.0;
        }
        degrees = r - 180.0;
    }
    return PhaseAngle(degrees * kPi / 180.0);
}

double PhaseAngle::degrees() const noexcept { return theta_ * 180.0 / kPi; }

int signum(double omega) {
    if (!std::isfinite(omega)) {
        fail(ErrorCode::InvalidArgument, "signum: non-finite argument");
    }
    return (omega > 0.0) - (omega < 0.0);
}

int bin_sign(std::size_t k, std::size_t n) noexcept {
    k %= n;
    if (k == 0 || 2 * k == n) {
        return 0;
    }
    return 2 * k < n ? 1 : -1;
}

void require_transformable(const Signal& x) {
    if (x.samples.empty()) {
        fail(ErrorCode::InvalidArgument, "signal is empty");
    }
    if (x.samples.size() < 2) {
        fail(ErrorCode::InvalidArgument, "signal needs at least 2 samples");
    }
    if (x.sample_rate == 0) {
        fail(ErrorCode::InvalidArgument, "sample rate must be positive");
    }
    const auto bad = std::find_if(x.samples.begin(), x.samples.end(),
                                  [](double v) { return !std::isfinite(v); });
    if (bad != x.samples.end()) {
        fail(ErrorCode::InvalidArgument,
             "non-finite sample at index " + std::to_string(bad - x.samples.begin()));
    }
}

Spectrum spectrum(const Signal& x) {
    require_transformable(x);
    const auto bins = detail::forward(x.samples);
    return Spectrum{std::vector<Complex>(bins.begin(), bins.end()), x.sample_rate};
}

std::vector<double> magnitude_spectrum(const Signal& x) {
    require_transformable(x);
    const auto bins = detail::forward_half(x.samples);
    const std::size_t n = x.size();
    std::vector<double> mags(n);
    for (std::size_t k = 0; k < bins.size(); ++k) {
        mags[k] = std::abs(bins[k]);
    }
    // The upper half mirrors the lower one for a real input.
    for (std::size_t k = bins.size(); k < n; ++k) {
        mags[k] = mags[n - k];
    }
    return mags;
}

Signal hilbert(const Signal& x) {
    require_transformable(x);
    const std::size_t n = x.size();
    const auto bins = detail::forward_half(x.samples);
    bins[0] = Complex{0.0, 0.0};
    for (std::size_t k = 1; k < bins.size(); ++k) {
        bins[k] = Complex{bins[k].imag(), -bins[k].real()};  // * -i
    }
    if (n % 2 == 0) {
        bins[n / 2] = Complex{0.0, 0.0};
    }
    return half_inverse(bins, n, x.sample_rate);
}

AnalyticSignal analytic(const Signal& x) {
    const Signal h = hilbert(x);
    AnalyticSignal out{std::vector<Complex>(x.size()), x.sample_rate};
    for (std::size_t n = 0; n < x.size(); ++n) {
        out.values[n] = Complex{x.samples[n], h.samples[n]};
    }
    return out;
}

ShiftResult phase_shift_with_residue(const Signal& x, PhaseAngle theta) {
    require_transformable(x);
    // Full complex spectrum, so the imaginary leftover of the inverse can be
    // measured instead of being discarded by a real inverse.
    const auto bins = detail::forward(x.samples);
    const std::size_t n = bins.size();
    const Complex up = std::polar(1.0, theta.radians());
    const Complex down = std::conj(up);
    for (std::size_t k = 1; k < n; ++k) {
        const int s = bin_sign(k, n);
        if (s > 0) {
            bins[k] *= up;
        } else if (s < 0) {
            bins[k] *= down;
        }
    }
    ShiftResult result;
    result.signal = inverse_to_real(bins, x.sample_rate, &result.max_imag_residue);
    return result;
}

Signal phase_shift(const Signal& x, PhaseAngle theta) {
    require_transformable(x);
    const std::size_t n = x.size();
    const auto bins = detail::forward_half(x.samples);
    const Complex up = std::polar(1.0, theta.radians());
    // Positive frequencies only; DC and the Nyquist bin keep their value.
    for (std::size_t k = 1; 2 * k < n; ++k) {
        bins[k] *= up;
    }
    return half_inverse(bins, n, x.sample_rate);
}

Signal rotate_analytic(const AnalyticSignal& xa, PhaseAngle theta) {
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    Signal out{std::vector<double>(xa.values.size()), xa.sample_rate};
    for (std::size_t n = 0; n < xa.values.size(); ++n) {
        out.samples[n] = xa.values[n].real() * c - xa.values[n].imag() * s;
    }
    return out;
}

std::vector<Complex> naive_dft(std::span<const Complex> x) { return direct_dft(x, false); }

std::vector<Complex> naive_idft(std::span<const Complex> bins) { return direct_dft(bins, true); }

}  // namespace intercept::dsp
