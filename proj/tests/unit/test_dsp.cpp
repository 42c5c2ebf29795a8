#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "intercept/dsp.hpp"
#include "intercept/error.hpp"
#include "support.hpp"

using namespace intercept;
using namespace intercept::dsp;
namespace ts = testing_support;

constexpr double kPi = std::numbers::pi;

static Signal tone(std::size_t n, double cycles, double phase, bool cosine = false) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2 * kPi * cycles * double(i) / double(n) + phase;
        s[i] = cosine ? std::cos(a) : std::sin(a);
    }
    return ts::make_signal(std::move(s));
}

template <typename F>
static void expect_error(ErrorCode code, F&& f) {
    try {
        f();
        ADD_FAILURE() << "expected error " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

// --- signum / bin mapping -------------------------------------------------

TEST(Signum, Examples) {
    EXPECT_EQ(signum(440.0), 1);
    EXPECT_EQ(signum(0.0), 0);
    EXPECT_EQ(signum(-0.0), 0);
    EXPECT_EQ(signum(-3.2), -1);
    EXPECT_EQ(signum(std::numeric_limits<double>::denorm_min()), 1);
}

TEST(Signum, RejectsNonFinite) {
    expect_error(ErrorCode::InvalidArgument, [] { (void)signum(std::nan("")); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)signum(INFINITY); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)signum(-INFINITY); });
}

TEST(BinSign, MatchesFrequencyOfBin) {
    for (std::size_t n = 1; n <= 33; ++n) {
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_EQ(bin_sign(k, n), ts::frequency_sign(k, n)) << "k=" << k << " n=" << n;
        }
    }
    EXPECT_EQ(bin_sign(4, 8), 0);   // Nyquist
    EXPECT_EQ(bin_sign(4, 9), 1);
    EXPECT_EQ(bin_sign(5, 9), -1);
}

// --- PhaseAngle ----------------------------------------------------------

TEST(PhaseAngle, WrapsIntoHalfOpenRange) {
    EXPECT_DOUBLE_EQ(PhaseAngle(0.6).radians(), 0.6);
    EXPECT_DOUBLE_EQ(PhaseAngle(kPi).radians(), -kPi);
    EXPECT_DOUBLE_EQ(PhaseAngle(-kPi).radians(), -kPi);
    EXPECT_NEAR(PhaseAngle(3 * kPi / 2).radians(), -kPi / 2, 1e-15);
    EXPECT_NEAR(PhaseAngle(-5 * kPi / 2).radians(), -kPi / 2, 1e-15);
    EXPECT_NEAR(PhaseAngle(1e6).radians(), std::remainder(1e6, 2 * kPi), 1e-9);
    for (double v : {1e3, -1e3, 7.0, -7.0, 2 * kPi, -2 * kPi, 123.456}) {
        const double r = PhaseAngle(v).radians();
        EXPECT_GE(r, -kPi);
        EXPECT_LT(r, kPi);
    }
}

TEST(PhaseAngle, DegreesWrapExactly) {
    EXPECT_EQ(PhaseAngle::from_degrees(400), PhaseAngle::from_degrees(40));
    EXPECT_EQ(PhaseAngle::from_degrees(-320), PhaseAngle::from_degrees(40));
    EXPECT_DOUBLE_EQ(PhaseAngle::from_degrees(180).radians(), -kPi);
    EXPECT_DOUBLE_EQ(PhaseAngle::from_degrees(90).radians(), kPi / 2);
    EXPECT_NEAR(PhaseAngle::from_degrees(40).degrees(), 40.0, 1e-12);
}

TEST(PhaseAngle, RejectsNonFinite) {
    expect_error(ErrorCode::InvalidArgument, [] { (void)PhaseAngle(std::nan("")); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)PhaseAngle::from_degrees(INFINITY); });
}

// --- naive DFT --------------------------------------------------------------

TEST(NaiveDft, HandComputedFourPoint) {
    const auto expect_bins = [](std::vector<Complex> in, std::vector<Complex> want) {
        const auto got = naive_dft(in);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < want.size(); ++k) {
            EXPECT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-12) << "bin " << k;
        }
    };
    expect_bins({1, 0, 0, 0}, {1, 1, 1, 1});
    expect_bins({1, 1, 1, 1}, {4, 0, 0, 0});
    expect_bins({0, 1, 0, -1}, {0, Complex(0, -2), 0, Complex(0, 2)});
}

TEST(NaiveDft, InverseRoundTripAndAgreesWithTestOracle) {
    ts::SignalGen gen(11);
    for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 31u}) {
        std::vector<Complex> x(n);
        for (auto& v : x) v = Complex(gen.uniform(-1, 1), gen.uniform(-1, 1));
        const auto bins = naive_dft(x);
        const auto ref = ts::dft(x, false);
        const auto back = naive_idft(bins);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_LT(std::abs(bins[k] - ref[k]), 1e-12);
            EXPECT_LT(std::abs(back[k] - x[k]), 1e-12);
        }
    }
}

TEST(NaiveDft, Limits) {
    expect_error(ErrorCode::InvalidArgument, [] { (void)naive_dft(std::vector<Complex>{}); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)naive_idft(std::vector<Complex>{}); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)naive_dft(std::vector<Complex>(4097)); });
    EXPECT_EQ(naive_dft(std::vector<Complex>(4096)).size(), 4096u);
}

// --- spectrum / magnitude -----------------------------------------------------

TEST(Spectrum, ConjugateSymmetricForRealInput) {
    ts::SignalGen gen(3);
    for (std::size_t n : {2u, 5u, 64u, 101u}) {
        const auto s = spectrum(ts::make_signal(gen.samples(n)));
        ASSERT_EQ(s.bins.size(), n);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_LT(std::abs(s.bins[k] - std::conj(s.bins[(n - k) % n])), 1e-12);
        }
    }
}

TEST(MagnitudeSpectrum, ImpulseIsFlat) {
    std::vector<double> x(8, 0.0);
    x[0] = 1.0;
    for (double m : magnitude_spectrum(ts::make_signal(x))) EXPECT_NEAR(m, 1.0, 1e-15);
}

TEST(MagnitudeSpectrum, SinusoidConcentratesAtTwoBins) {
    const auto m = magnitude_spectrum(tone(64, 5, 0.0));
    for (std::size_t k = 0; k < 64; ++k) {
        const double want = (k == 5 || k == 59) ? 32.0 : 0.0;
        EXPECT_NEAR(m[k], want, 1e-9) << "bin " << k;
    }
}

// --- hilbert ------------------------------------------------------------------

TEST(Hilbert, CosineBecomesSine) {
    const auto h = hilbert(tone(1024, 32, 0.0, true));
    const auto want = tone(1024, 32, 0.0);
    EXPECT_LE(ts::max_abs_diff(h.samples, want.samples), 1e-9);
    EXPECT_EQ(h.sample_rate, 48000u);
}

TEST(Hilbert, ZeroInZeroOut) {
    const auto h = hilbert(ts::make_signal(std::vector<double>(37, 0.0)));
    for (double v : h.samples) EXPECT_EQ(v, 0.0);
}

TEST(Hilbert, MatchesOracleOnLength16) {
    ts::SignalGen gen(16);
    for (int rep = 0; rep < 5; ++rep) {
        const auto x = gen.samples(16);
        EXPECT_LE(ts::max_abs_diff(hilbert(ts::make_signal(x)).samples, ts::oracle_hilbert(x)), 1e-10);
    }
}

TEST(Hilbert, ShortestInputsHaveNoQuadratureComponent) {
    // N = 2 holds only DC and Nyquist.
    const auto h = hilbert(ts::make_signal({0.3, -0.9}));
    EXPECT_NEAR(h.samples[0], 0.0, 1e-15);
    EXPECT_NEAR(h.samples[1], 0.0, 1e-15);
}

TEST(Hilbert, PreconditionErrors) {
    expect_error(ErrorCode::InvalidArgument, [] { (void)hilbert(ts::make_signal({})); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)hilbert(ts::make_signal({1.0})); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)hilbert(ts::make_signal({1.0, std::nan(""), 0.0})); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)hilbert(ts::make_signal({1.0, INFINITY})); });
    expect_error(ErrorCode::InvalidArgument, [] { (void)hilbert(Signal{{1.0, 2.0}, 0}); });
}

// --- analytic -----------------------------------------------------------------

TEST(Analytic, CosineBecomesComplexExponential) {
    const std::size_t n = 256;
    const auto xa = analytic(tone(n, 9, 0.0, true));
    for (std::size_t i = 0; i < n; ++i) {
        const Complex want = std::polar(1.0, 2 * kPi * 9 * double(i) / double(n));
        EXPECT_LE(std::abs(xa.values[i] - want), 1e-9);
    }
}

TEST(Analytic, RealPartIsBitExact) {
    ts::SignalGen gen(64);
    const auto x = gen.samples(64);
    const auto xa = analytic(ts::make_signal(x));
    const auto h = hilbert(ts::make_signal(x));
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_EQ(xa.values[i].real(), x[i]);
        EXPECT_EQ(xa.values[i].imag(), h.samples[i]);
    }
}

TEST(Analytic, ZeroSignal) {
    for (const auto& v : analytic(ts::make_signal(std::vector<double>(10, 0.0))).values) EXPECT_EQ(v, Complex(0, 0));
}

// --- phase_shift ----------------------------------------------------------------

TEST(PhaseShift, SineAdvancesByTheta) {
    for (double phi : {0.6, -1.2, 2.9}) {
        const auto y = phase_shift(tone(1000, 7, 0.0), PhaseAngle(phi));
        const auto want = tone(1000, 7, phi);
        for (std::size_t i = 2; i + 2 < 1000; ++i) EXPECT_NEAR(y.samples[i], want.samples[i], 1e-9);
    }
}

TEST(PhaseShift, ZeroAngleIsIdentity) {
    ts::SignalGen gen(0);
    for (std::size_t n : {2u, 3u, 100u, 4097u}) {
        const auto x = gen.samples(n);
        EXPECT_LE(ts::max_abs_diff(phase_shift(ts::make_signal(x), PhaseAngle(0.0)).samples, x), 1e-12);
    }
}

TEST(PhaseShift, HalfTurnNegatesZeroMeanSignal) {
    ts::SignalGen gen(180);
    auto x = gen.samples(301);
    ts::remove_mean(x);
    const auto y = phase_shift(ts::make_signal(x), PhaseAngle(kPi));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y.samples[i], -x[i], 1e-9);
}

TEST(PhaseShift, LeavesDcAndNyquistAlone) {
    // Constant plus alternating sequence: only DC and Nyquist bins are non-zero.
    std::vector<double> x(16);
    for (std::size_t i = 0; i < 16; ++i) x[i] = 0.25 + (i % 2 ? -0.5 : 0.5);
    const auto y = phase_shift(ts::make_signal(x), PhaseAngle(1.1));
    EXPECT_LE(ts::max_abs_diff(y.samples, x), 1e-12);
}

TEST(PhaseShift, MatchesOracleOnLength16) {
    ts::SignalGen gen(7);
    const auto x = gen.samples(16);
    EXPECT_LE(ts::max_abs_diff(phase_shift(ts::make_signal(x), PhaseAngle(0.7)).samples, ts::oracle_shift(x, 0.7)),
              1e-10);
}

TEST(PhaseShift, ResidueIsTiny) {
    ts::SignalGen gen(8);
    const auto r = phase_shift_with_residue(ts::make_signal(gen.samples(999)), PhaseAngle(2.0));
    EXPECT_LE(r.max_imag_residue, 1e-9);
    EXPECT_EQ(r.signal.size(), 999u);
}

TEST(PhaseShift, PreservesLengthAndRate) {
    const auto y = phase_shift(Signal{{0.1, 0.2, 0.3}, 22050}, PhaseAngle(1.0));
    EXPECT_EQ(y.size(), 3u);
    EXPECT_EQ(y.sample_rate, 22050u);
}

TEST(PhaseShift, PreconditionErrors) {
    expect_error(ErrorCode::InvalidArgument, [] { (void)phase_shift(ts::make_signal({}), PhaseAngle(1.0)); });
    expect_error(ErrorCode::InvalidArgument,
                 [] { (void)phase_shift(ts::make_signal({0.0, -INFINITY, 1.0}), PhaseAngle(1.0)); });
}

// --- time-domain route ----------------------------------------------------------

TEST(RotateAnalytic, AgreesForZeroMeanOnly) {
    ts::SignalGen gen(9);
    auto x = gen.samples(257);
    ts::remove_mean(x);
    const PhaseAngle t(0.9);
    const auto sig = ts::make_signal(x);
    EXPECT_LE(ts::max_abs_diff(rotate_analytic(analytic(sig), t).samples, phase_shift(sig, t).samples), 1e-9);

    // With an offset the time-domain route scales DC by cos(theta).
    for (auto& v : x) v += 0.5;
    const auto off = ts::make_signal(x);
    const auto a = rotate_analytic(analytic(off), t).samples;
    const auto b = phase_shift(off, t).samples;
    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mean_a += a[i] / x.size(), mean_b += b[i] / x.size();
    EXPECT_NEAR(mean_b, 0.5, 1e-12);
    EXPECT_NEAR(mean_a, 0.5 * std::cos(0.9), 1e-12);
}
