#pragma once

#include <cstdint>
#include <string_view>

namespace intercept {

/// Counter-based random stream. Draw i of stream (seed, stream_id) is a pure
/// function of those three integers, so results reproduce across platforms,
/// compilers and standard libraries (unlike std::uniform_*_distribution).
///
/// Generator: SplitMix64 finalizer applied to key + (counter + 1) * golden
/// gamma, where key mixes seed and stream_id. Identified in configs and
/// manifests as kName/kVersion; changing the mapping requires a version bump.
class CounterRng {
public:
    static constexpr std::string_view kName = "splitmix64-ctr";
    static constexpr int kVersion = 1;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

    /// Raw 64-bit draw at an absolute counter position. Does not advance.
    [[nodiscard]] std::uint64_t at(std::uint64_t counter) const noexcept;

    std::uint64_t next_u64() noexcept { return at(counter_++); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double next_unit() noexcept;

    /// Uniform integer on [0, bound). bound must be > 0. Rejection sampling,
    /// no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) noexcept;

    [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }
    void seek(std::uint64_t counter) noexcept { counter_ = counter; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 output finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Child seed for item `index` of a job seeded with `seed`; lets per-file work
/// run in any order (or in parallel) with identical results.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + index * 0x9E3779B97F4A7C15ULL);
}

}  // namespace intercept
