#include "hyperseg/patch.hpp"

#include <cmath>

#include "hyperseg/conv.hpp"
#include "hyperseg/errors.hpp"

namespace hyperseg::pipeline {

Volume standardize(const Volume& vol) {
  const std::size_t n = vol.data.size();
  if (n == 0) throw ShapeError("standardize: empty volume");
  double mean = 0.0;
  for (float v : vol.data) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (float v : vol.data) {
    const double d = v - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double inv = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
  Volume out(vol.nx, vol.ny, vol.nz);
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = static_cast<float>((vol.data[i] - mean) * inv);
  }
  return out;
}

nn::Tensor patch_to_tensor(const Volume& vol, const sampler::PatchSpec& spec) {
  const std::int64_t e = spec.edge;
  if (e <= 0) throw ShapeError("patch_to_tensor: non-positive edge");
  const sampler::Dims dims{vol.nx, vol.ny, vol.nz};
  if (!sampler::patch_inside(spec, dims)) {
    throw ShapeError("patch_to_tensor: patch extends outside the volume");
  }
  std::vector<double> data(static_cast<std::size_t>(e * e * e));
  std::size_t w = 0;
  for (std::int64_t z = spec.lo(2); z < spec.hi(2); ++z) {
    for (std::int64_t y = spec.lo(1); y < spec.hi(1); ++y) {
      for (std::int64_t x = spec.lo(0); x < spec.hi(0); ++x) {
        data[w++] = vol.at(x, y, z);
      }
    }
  }
  return nn::Tensor::from_data({1, e, e, e}, std::move(data));
}

namespace {

// Reflect an index into [0, n) without repeating the boundary sample
// (…, 2, 1, 0, 1, 2, …); handles any overshoot by folding over the period.
std::int64_t reflect_index(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  std::int64_t m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

}  // namespace

nn::Tensor patch_to_tensor_reflect(const Volume& vol,
                                   std::array<std::int64_t, 3> center,
                                   std::int64_t edge) {
  if (edge <= 0) throw ShapeError("patch_to_tensor_reflect: non-positive edge");
  const std::int64_t lo0 = center[0] - edge / 2;
  const std::int64_t lo1 = center[1] - edge / 2;
  const std::int64_t lo2 = center[2] - edge / 2;
  std::vector<double> data(static_cast<std::size_t>(edge * edge * edge));
  std::size_t w = 0;
  for (std::int64_t z = 0; z < edge; ++z) {
    const std::int64_t zz = reflect_index(lo2 + z, vol.nz);
    for (std::int64_t y = 0; y < edge; ++y) {
      const std::int64_t yy = reflect_index(lo1 + y, vol.ny);
      for (std::int64_t x = 0; x < edge; ++x) {
        const std::int64_t xx = reflect_index(lo0 + x, vol.nx);
        data[w++] = vol.at(xx, yy, zz);
      }
    }
  }
  return nn::Tensor::from_data({1, edge, edge, edge}, std::move(data));
}

nn::Tensor resize_patch(const nn::Tensor& patch, std::int64_t m) {
  if (patch.shape().size() != 4 || patch.size(0) != 1) {
    throw ShapeError("resize_patch: expected a (1, e, e, e) tensor");
  }
  if (patch.size(1) == m && patch.size(2) == m && patch.size(3) == m) {
    return nn::Tensor::from_data(patch.shape(), patch.data());
  }
  return nn::trilinear_resize(patch, m, m, m);
}

}  // namespace hyperseg::pipeline
