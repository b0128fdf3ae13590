#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace gtsfde::fft {

/// In-place complex DFT, unnormalized (engineering sign convention).
void forward(std::span<std::complex<double>> data);

/// In-place inverse DFT including the 1/n factor.
void inverse(std::span<std::complex<double>> data);

std::size_t next_pow2(std::size_t n);

}  // namespace gtsfde::fft
