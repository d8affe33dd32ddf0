#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hyperseg/errors.hpp"

namespace hyperseg::fft {

// In-place iterative radix-2 transform; n must be a power of two. Forward uses
// the exp(-2*pi*i*k*n/N) convention; the inverse divides by n.
void fft_1d(std::complex<double>* data, std::size_t n, bool inverse);

// Separable 3-D transform of an n^3 cube stored x-fastest.
void fft_3d(std::vector<std::complex<double>>& data, std::size_t n, bool inverse);

// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace hyperseg::fft
