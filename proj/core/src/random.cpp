#include "intercept/random.hpp"

namespace intercept {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamGamma = 0xD1B54A32D192ED03ULL;
}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_(mix64(mix64(seed) + (stream_id + 1) * kStreamGamma)) {}

std::uint64_t CounterRng::at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGamma);
}

double CounterRng::next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::next_below(std::uint64_t bound) noexcept {
    // Reject the top partial bucket of the 2^64 range.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

}  // namespace intercept
