#include "hyperseg/fft.hpp"

#include <cmath>
#include <utility>

namespace hyperseg::fft {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void fft_1d(std::complex<double>* data, std::size_t n, bool inverse) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error("fft_1d: length must be a power of two");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // Butterflies.
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
  }
}

void fft_3d(std::vector<std::complex<double>>& data, std::size_t n, bool inverse) {
  if (data.size() != n * n * n) throw Error("fft_3d: buffer is not an n^3 cube");
  std::vector<std::complex<double>> line(n);

  // Along x: rows are contiguous.
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t y = 0; y < n; ++y) {
      fft_1d(&data[(z * n + y) * n], n, inverse);
    }
  }
  // Along y.
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) line[y] = data[(z * n + y) * n + x];
      fft_1d(line.data(), n, inverse);
      for (std::size_t y = 0; y < n; ++y) data[(z * n + y) * n + x] = line[y];
    }
  }
  // Along z.
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t z = 0; z < n; ++z) line[z] = data[(z * n + y) * n + x];
      fft_1d(line.data(), n, inverse);
      for (std::size_t z = 0; z < n; ++z) data[(z * n + y) * n + x] = line[z];
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace hyperseg::fft
