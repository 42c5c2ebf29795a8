#pragma once

#include <span>

#include "intercept/dsp.hpp"

namespace intercept::dsp::detail {

// All results live in per-thread buffers that stay valid until the next call
// of the same function on this thread. Callers may modify returned bins in
// place before handing them back.

/// Full complex DFT of a real signal of any length >= 1.
std::span<Complex> forward(std::span<const double> x);

/// Unscaled inverse of the full spectrum returned by forward().
std::span<const Complex> inverse(std::span<const Complex> bins);

/// Non-negative frequency half of the DFT of a real signal: bins 0 .. n/2.
std::span<Complex> forward_half(std::span<const double> x);

/// Unscaled real inverse of a half spectrum of a length-n signal, treating the
/// bins as one side of a Hermitian spectrum. Consumes `bins`.
std::span<const double> inverse_half(std::span<Complex> bins, std::size_t n);

}  // namespace intercept::dsp::detail
