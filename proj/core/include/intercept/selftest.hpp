#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace intercept::selftest {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // largest error observed
    double tolerance = 0.0;
    std::size_t cases = 0;
};

struct Options {
    std::uint64_t seed = 1;
    std::size_t signals = 200;       // random signals per check
    std::size_t max_length = 4096;   // lengths drawn from [2, max_length]
    std::size_t oracle_max_length = 64;
};

/// Runs the phase-shift / Hilbert invariants over seeded random signals of
/// odd and even lengths.
std::vector<CheckResult> run_invariant_suite(const Options& options = {});

std::string results_to_json(const std::vector<CheckResult>& results);

}  // namespace intercept::selftest
