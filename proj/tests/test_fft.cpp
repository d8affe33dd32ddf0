#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "hyperseg/errors.hpp"
#include "hyperseg/fft.hpp"
#include "hyperseg/rng.hpp"

using namespace hyperseg;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 2.0 : -2.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * kPi * static_cast<double>(k * t) / static_cast<double>(n);
      acc += x[t] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fft: matches the naive DFT") {
  Rng rng(31);
  for (std::size_t n : {2u, 8u, 16u, 64u}) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(rng.normal(), rng.normal());

    std::vector<cplx> fast = x;
    fft::fft_1d(fast.data(), n, false);
    const std::vector<cplx> slow = naive_dft(x, false);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(fast[i] - slow[i]) < 1e-10);
    }

    // Inverse recovers the input.
    fft::fft_1d(fast.data(), n, true);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(fast[i] - x[i]) < 1e-12);
    }
  }
}

TEST_CASE("fft: structure of simple inputs") {
  // Delta -> flat spectrum.
  std::vector<cplx> delta(8, cplx(0.0, 0.0));
  delta[0] = cplx(1.0, 0.0);
  fft::fft_1d(delta.data(), 8, false);
  for (const cplx& v : delta) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-14);

  // Constant -> all energy at DC.
  std::vector<cplx> flat(8, cplx(2.5, 0.0));
  fft::fft_1d(flat.data(), 8, false);
  CHECK(std::abs(flat[0] - cplx(20.0, 0.0)) < 1e-12);
  for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(flat[i]) < 1e-12);

  std::vector<cplx> bad(6);
  CHECK_THROWS_AS(fft::fft_1d(bad.data(), 6, false), Error);
}

TEST_CASE("fft: 3-D round-trip and Parseval") {
  Rng rng(32);
  const std::size_t n = 8;
  std::vector<cplx> x(n * n * n);
  for (auto& v : x) v = cplx(rng.normal(), 0.0);

  std::vector<cplx> spec = x;
  fft::fft_3d(spec, n, false);

  double time_energy = 0.0, freq_energy = 0.0;
  for (const cplx& v : x) time_energy += std::norm(v);
  for (const cplx& v : spec) freq_energy += std::norm(v);
  CHECK(time_energy == doctest::Approx(freq_energy / static_cast<double>(n * n * n))
                           .epsilon(1e-10));

  fft::fft_3d(spec, n, true);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(spec[i] - x[i]) < 1e-12);

  std::vector<cplx> wrong(10);
  CHECK_THROWS_AS(fft::fft_3d(wrong, 2, false), Error);
}

TEST_CASE("fft: next_pow2") {
  CHECK(fft::next_pow2(1) == 1);
  CHECK(fft::next_pow2(2) == 2);
  CHECK(fft::next_pow2(3) == 4);
  CHECK(fft::next_pow2(50) == 64);
  CHECK(fft::next_pow2(64) == 64);
  CHECK(fft::next_pow2(65) == 128);
}
