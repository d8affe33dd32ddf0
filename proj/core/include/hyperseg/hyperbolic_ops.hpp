#pragma once

#include <array>

#include "hyperseg/geometry.hpp"
#include "hyperseg/tensor.hpp"

namespace hyperseg::nn {

// Differentiable row-wise Poincare-ball operations (curvature c = 1). A
// rank-2 tensor (N, d) is a batch of N points / tangent vectors; (1, d)
// operands broadcast against (N, d) ones. All maps are compositions of smooth
// primitives so removable singularities (zero norms) stay differentiable.

Tensor rows_norm_sq(const Tensor& x);    // (N, d) -> (N, 1)
Tensor rows_dot(const Tensor& x, const Tensor& y);
Tensor conformal_rows(const Tensor& x);  // (N, 1): 2 / (1 - |x|^2)

// Radial clamp into the ball of radius 1 - eps; exact identity (unit factor)
// strictly inside that radius.
Tensor project_rows_to_ball(const Tensor& x, double eps = geometry::kEpsBall);

Tensor mobius_add_rows(const Tensor& x, const Tensor& y);
Tensor distance_rows(const Tensor& x, const Tensor& y);  // (N, 1)
Tensor exp0_rows(const Tensor& v);
Tensor log0_rows(const Tensor& z);
Tensor expmap_rows(const Tensor& mu, const Tensor& u);
Tensor logmap_rows(const Tensor& mu, const Tensor& z);

// Signed gyroplane responses of N points against one hyperplane (a, p):
//   a: (1, d) normal, p: (1, d) base point, z: (N, d); result (N, 1).
Tensor gyroplane_rows(const Tensor& a, const Tensor& p, const Tensor& z);

// Parameters for a gyroplane convolution: one hyperplane per (out-channel,
// in-channel, kernel tap), or one per out-channel when tied = true (the
// literal single-hyperplane formulation shared across the window).
struct GyroConvParams {
  Tensor a;  // (rows, d) normals; rows = Co or Co*Ci*k^3
  Tensor p;  // (rows, d) base points, valid ball rows
  std::int64_t co = 0, ci = 0, k = 1, d = 0;
  bool tied = false;

  static GyroConvParams init(std::int64_t co, std::int64_t ci, std::int64_t k,
                             std::int64_t d, bool tied, Rng& rng);
  std::int64_t row_index(std::int64_t co_i, std::int64_t ci_i, std::int64_t tap) const;
};

// Gyroplane convolution over grids of ball points.
//   balls: one (d, D, H, W) coordinate grid per input ball channel (size Ci).
//   out:   (Co, D', H', W') real features; out-of-range taps see the origin
//          when pad_origin, otherwise the scan is 'valid' (padding dropped).
Tensor gyro_conv3d(const std::vector<Tensor>& balls, const GyroConvParams& params,
                   std::int64_t stride, std::int64_t padding, bool pad_origin = true);

// In-place maintenance of ball-valued leaf parameters after optimizer steps:
// radially clamp every row to the safe radius (no graph involvement).
void constrain_ball_rows(Tensor& t, double eps = geometry::kEpsBall);

}  // namespace hyperseg::nn
