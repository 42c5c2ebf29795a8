#pragma once

#include <cstdint>
#include <vector>

#include "intercept/dsp.hpp"
#include "intercept/random.hpp"

namespace intercept::augment {

/// Uniform draw on [-pi, pi) from one step of the stream.
dsp::PhaseAngle draw_theta(CounterRng& rng) noexcept;

struct AugmentConfig {
    std::uint64_t seed = 0;
    /// Probability that a call applies the rotation; 1.0 always rotates.
    double apply_probability = 1.0;

    void validate() const;
};

struct Augmented {
    dsp::Signal signal;
    dsp::PhaseAngle theta;  // 0 when the rotation was skipped
    bool applied = false;
};

/// Random phase-intercept augmentation for one worker. Call i consumes stream
/// positions 2i (apply coin) and 2i+1 (theta), so every output is a pure
/// function of (input, seed, worker_id, call index). Not thread-safe; give
/// each worker its own stream.
class AugmentStream {
public:
    AugmentStream(const AugmentConfig& config, std::uint64_t worker_id);

    /// Augments x with the next draw and advances the call counter.
    Augmented next(const dsp::Signal& x);

    /// Augments x as call `call_index` would, without touching the counter.
    [[nodiscard]] Augmented at(const dsp::Signal& x, std::uint64_t call_index) const;

    [[nodiscard]] std::uint64_t calls() const noexcept { return calls_; }

private:
    AugmentConfig config_;
    CounterRng rng_;
    std::uint64_t calls_ = 0;
};

inline Augmented augment(const dsp::Signal& x, AugmentStream& stream) { return stream.next(x); }

/// Inverse phase augmentation: polarity flip in the time domain.
dsp::Signal ipa(const dsp::Signal& x);

/// Augments each signal with the stream seeded by (config.seed, worker_id).
/// A failing item raises an Error whose item_index() names it.
std::vector<Augmented> augment_batch(const std::vector<dsp::Signal>& xs,
                                     const AugmentConfig& config, std::uint64_t worker_id);

}  // namespace intercept::augment
