#include "intercept/augment.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "intercept/error.hpp"

namespace intercept::augment {

dsp::PhaseAngle draw_theta(CounterRng& rng) noexcept {
    // PhaseAngle folds a rounded-up pi back to -pi.
    return dsp::PhaseAngle(-std::numbers::pi + 2.0 * std::numbers::pi * rng.next_unit());
}

void AugmentConfig::validate() const {
    if (!(apply_probability >= 0.0 && apply_probability <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "apply_probability must lie in [0, 1]");
    }
}

AugmentStream::AugmentStream(const AugmentConfig& config, std::uint64_t worker_id)
    : config_(config), rng_(config.seed, worker_id) {
    config_.validate();
}

Augmented AugmentStream::at(const dsp::Signal& x, std::uint64_t call_index) const {
    dsp::require_transformable(x);
    CounterRng rng = rng_;
    rng.seek(2 * call_index);
    const double coin = rng.next_unit();
    const dsp::PhaseAngle theta = draw_theta(rng);
    if (coin < config_.apply_probability) {
        return Augmented{dsp::phase_shift(x, theta), theta, true};
    }
    return Augmented{x, dsp::PhaseAngle{}, false};
}

Augmented AugmentStream::next(const dsp::Signal& x) {
    Augmented out = at(x, calls_);
    ++calls_;
    return out;
}

dsp::Signal ipa(const dsp::Signal& x) {
    dsp::require_transformable(x);
    dsp::Signal out = x;
    for (double& v : out.samples) {
        v = -v;
    }
    return out;
}

std::vector<Augmented> augment_batch(const std::vector<dsp::Signal>& xs,
                                     const AugmentConfig& config, std::uint64_t worker_id) {
    AugmentStream stream(config, worker_id);
    std::vector<Augmented> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            out.push_back(stream.next(xs[i]));
        } catch (const Error& e) {
            throw Error(e.code(), "batch item " + std::to_string(i) + ": " + e.what(), i);
        }
    }
    return out;
}

}  // namespace intercept::augment
