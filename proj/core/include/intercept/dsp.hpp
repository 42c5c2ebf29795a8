#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace intercept::dsp {

using Complex = std::complex<double>;

/// Mono real waveform. Samples are nominally in [-1, 1]; all processing is
/// done in double precision regardless of the file format it came from.
struct Signal {
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

/// x + i*H(x). values[n].real() is the source sample, bit for bit.
struct AnalyticSignal {
    std::vector<Complex> values;
    std::uint32_t sample_rate = 0;
};

/// DFT coefficients of a whole buffer (no windowing, no padding).
struct Spectrum {
    std::vector<Complex> bins;
    std::uint32_t sample_rate = 0;
};

/// Rotation angle in radians, always stored in [-pi, pi).
class PhaseAngle {
public:
    constexpr PhaseAngle() noexcept = default;

    /// Wraps any finite value modulo 2*pi. Throws InvalidArgument on NaN/Inf.
    explicit PhaseAngle(double radians);

    static PhaseAngle from_degrees(double degrees);

    [[nodiscard]] double radians() const noexcept { return theta_; }
    [[nodiscard]] double degrees() const noexcept;

    friend bool operator==(PhaseAngle, PhaseAngle) noexcept = default;

private:
    double theta_ = 0.0;
};

/// sgn(omega) in {-1, 0, 1}. Throws InvalidArgument for non-finite input.
int signum(double omega);

/// Sign of the physical frequency of DFT bin k for a length-n transform:
/// +1 for 0 < 2k < n, -1 for 2k > n, 0 for DC and for the Nyquist bin of even n.
int bin_sign(std::size_t k, std::size_t n) noexcept;

/// Validates the preconditions shared by every transform below: non-empty,
/// at least two samples, all finite, positive sample rate.
void require_transformable(const Signal& x);

/// Forward DFT of the whole buffer.
Spectrum spectrum(const Signal& x);

/// |DFT(x)[k]| for k = 0..N-1.
std::vector<double> magnitude_spectrum(const Signal& x);

/// Discrete Hilbert transform: DFT bin k multiplied by -i * bin_sign(k, N).
Signal hilbert(const Signal& x);

AnalyticSignal analytic(const Signal& x);

/// Frequency-independent phase shift (phase-intercept distortion): DFT bin k
/// multiplied by exp(i * theta * bin_sign(k, N)). DC and Nyquist pass through.
Signal phase_shift(const Signal& x, PhaseAngle theta);

/// phase_shift plus the largest |imag| left by the inverse transform before it
/// was discarded.
struct ShiftResult {
    Signal signal;
    double max_imag_residue = 0.0;
};
ShiftResult phase_shift_with_residue(const Signal& x, PhaseAngle theta);

/// Time-domain route: Re[x_a * exp(i*theta)] = x*cos(theta) - H(x)*sin(theta).
/// Agrees with phase_shift for zero-mean input; for a nonzero mean it scales
/// DC by cos(theta) whereas phase_shift leaves DC untouched.
Signal rotate_analytic(const AnalyticSignal& xa, PhaseAngle theta);

/// O(N^2) reference DFT, bins[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
/// Test oracle only; 1 <= N <= 4096.
std::vector<Complex> naive_dft(std::span<const Complex> x);

/// O(N^2) reference inverse DFT (with 1/N scaling); same limits as naive_dft.
std::vector<Complex> naive_idft(std::span<const Complex> bins);

}  // namespace intercept::dsp
