#include "hyperseg/hyperbolic_ops.hpp"

#include <cmath>

#include "hyperseg/conv.hpp"

namespace hyperseg::nn {

namespace {

constexpr double kTiny = 1e-30;

void require_rows(const Tensor& t, const char* what) {
  if (!t.defined() || t.shape().size() != 2) {
    throw ShapeError(std::string(what) + ": expected (N, d) tensor" +
                     (t.defined() ? ", got " + shape_str(t.shape()) : ""));
  }
}

}  // namespace

Tensor rows_norm_sq(const Tensor& x) {
  require_rows(x, "rows_norm_sq");
  return row_sums(mul(x, x));
}

Tensor rows_dot(const Tensor& x, const Tensor& y) {
  require_rows(x, "rows_dot");
  require_rows(y, "rows_dot");
  return row_sums(mul(x, y));
}

Tensor conformal_rows(const Tensor& x) {
  return 2.0 / (1.0 - rows_norm_sq(x));
}

Tensor project_rows_to_ball(const Tensor& x, double eps) {
  require_rows(x, "project_rows_to_ball");
  const double radius = 1.0 - eps;
  const Tensor n = sqrt(clamp_min(rows_norm_sq(x), kTiny));
  // factor == 1 exactly while |x| <= radius; pure rescale beyond it.
  const Tensor factor = radius / clamp_min(n, radius);
  return mul(x, factor);
}

Tensor mobius_add_rows(const Tensor& x, const Tensor& y) {
  require_rows(x, "mobius_add_rows");
  require_rows(y, "mobius_add_rows");
  const Tensor x2 = rows_norm_sq(x);
  const Tensor y2 = rows_norm_sq(y);
  const Tensor xy = rows_dot(x, y);
  const Tensor den = 1.0 + 2.0 * xy + x2 * y2;
  const Tensor cx = (1.0 + 2.0 * xy + y2) / den;
  const Tensor cy = (1.0 - x2) / den;
  return project_rows_to_ball(mul(x, cx) + mul(y, cy));
}

Tensor distance_rows(const Tensor& x, const Tensor& y) {
  require_rows(x, "distance_rows");
  require_rows(y, "distance_rows");
  const Tensor diff = x - y;
  const Tensor d2 = rows_norm_sq(diff);
  const Tensor s = 2.0 * d2 / ((1.0 - rows_norm_sq(x)) * (1.0 - rows_norm_sq(y)));
  // acosh(1 + s) = log(1 + s + sqrt(s(s+2))); the clamp keeps the reverse
  // pass finite at coincident points (where the metric itself is not smooth).
  const Tensor q = sqrt(clamp_min(s * (s + 2.0), kTiny));
  return log(1.0 + (s + q));
}

Tensor exp0_rows(const Tensor& v) {
  require_rows(v, "exp0_rows");
  return project_rows_to_ball(mul(v, tanh_ratio(rows_norm_sq(v))));
}

Tensor log0_rows(const Tensor& z) {
  require_rows(z, "log0_rows");
  return mul(z, atanh_ratio(rows_norm_sq(z)));
}

Tensor expmap_rows(const Tensor& mu, const Tensor& u) {
  require_rows(mu, "expmap_rows");
  require_rows(u, "expmap_rows");
  // w = (lambda_mu / 2) u; exp_mu(u) = mu (+) tanh(|w|) w / |w|.
  const Tensor w = mul(u, 1.0 / clamp_min(1.0 - rows_norm_sq(mu), kTiny));
  return mobius_add_rows(mu, mul(w, tanh_ratio(rows_norm_sq(w))));
}

Tensor logmap_rows(const Tensor& mu, const Tensor& z) {
  require_rows(mu, "logmap_rows");
  require_rows(z, "logmap_rows");
  const Tensor w = mobius_add_rows(neg(mu), z);
  const Tensor scaled = mul(w, atanh_ratio(rows_norm_sq(w)));
  return mul(scaled, 1.0 - rows_norm_sq(mu));
}

Tensor gyroplane_rows(const Tensor& a, const Tensor& p, const Tensor& z) {
  require_rows(a, "gyroplane_rows");
  require_rows(p, "gyroplane_rows");
  require_rows(z, "gyroplane_rows");
  const Tensor w = mobius_add_rows(neg(p), z);
  const Tensor an = sqrt(clamp_min(rows_norm_sq(a), kTiny));
  const Tensor arg = 2.0 * rows_dot(w, a) / ((1.0 - rows_norm_sq(w)) * an);
  return mul(asinh(arg), conformal_rows(p) * an);
}

GyroConvParams GyroConvParams::init(std::int64_t co, std::int64_t ci, std::int64_t k,
                                    std::int64_t d, bool tied, Rng& rng) {
  GyroConvParams prm;
  prm.co = co;
  prm.ci = ci;
  prm.k = k;
  prm.d = d;
  prm.tied = tied;
  const std::int64_t rows = tied ? co : co * ci * k * k * k;
  // Normals: fan-in scaled Gaussian; base points: small ball offsets.
  const double fan_in = static_cast<double>(ci * k * k * k);
  prm.a = Tensor::randn({rows, d}, rng, 1.0 / std::sqrt(fan_in), true);
  Tensor p0 = Tensor::randn({rows, d}, rng, 0.02, true);
  constrain_ball_rows(p0);
  prm.p = p0;
  return prm;
}

std::int64_t GyroConvParams::row_index(std::int64_t co_i, std::int64_t ci_i,
                                       std::int64_t tap) const {
  return tied ? co_i : (co_i * ci + ci_i) * (k * k * k) + tap;
}

Tensor gyro_conv3d(const std::vector<Tensor>& balls, const GyroConvParams& params,
                   std::int64_t stride, std::int64_t padding, bool pad_origin) {
  if (balls.empty()) throw ShapeError("gyro_conv3d: no input channels");
  if (static_cast<std::int64_t>(balls.size()) != params.ci) {
    throw ShapeError("gyro_conv3d: expected " + std::to_string(params.ci) +
                     " ball channels, got " + std::to_string(balls.size()));
  }
  const std::int64_t k = params.k;
  const std::int64_t D = balls[0].size(1), H = balls[0].size(2), W = balls[0].size(3);
  for (const Tensor& b : balls) {
    if (b.shape().size() != 4 || b.size(0) != params.d || b.size(1) != D ||
        b.size(2) != H || b.size(3) != W) {
      throw ShapeError("gyro_conv3d: inconsistent ball channel grids");
    }
  }

  // Gather every (channel, tap) once; each yields an (N, d) batch reused by
  // all output channels.
  std::vector<Tensor> taps;
  taps.reserve(balls.size() * k * k * k);
  for (const Tensor& b : balls) {
    for (std::int64_t kz = 0; kz < k; ++kz) {
      for (std::int64_t ky = 0; ky < k; ++ky) {
        for (std::int64_t kx = 0; kx < k; ++kx) {
          taps.push_back(gather_taps(b, {kz, ky, kx}, k, stride, padding, pad_origin));
        }
      }
    }
  }
  const std::int64_t pad_eff = pad_origin ? padding : 0;
  const std::int64_t Do = (D + 2 * pad_eff - k) / stride + 1;
  const std::int64_t Ho = (H + 2 * pad_eff - k) / stride + 1;
  const std::int64_t Wo = (W + 2 * pad_eff - k) / stride + 1;

  std::vector<Tensor> channels;
  channels.reserve(params.co);
  for (std::int64_t co = 0; co < params.co; ++co) {
    Tensor acc;
    for (std::int64_t ci = 0; ci < params.ci; ++ci) {
      for (std::int64_t tap = 0; tap < k * k * k; ++tap) {
        const std::int64_t r = params.row_index(co, ci, tap);
        Tensor f = gyroplane_rows(row(params.a, r), row(params.p, r),
                                  taps[ci * k * k * k + tap]);
        acc = acc.defined() ? add(acc, f) : f;
      }
    }
    channels.push_back(acc);
  }
  return stack_channels(channels, Do, Ho, Wo);
}

void constrain_ball_rows(Tensor& t, double eps) {
  if (!t.defined() || t.shape().size() != 2) {
    throw ShapeError("constrain_ball_rows: expected (N, d) tensor");
  }
  const double radius = 1.0 - eps;
  const std::int64_t n = t.size(0), d = t.size(1);
  auto& data = t.mutable_data();
  for (std::int64_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::int64_t j = 0; j < d; ++j) s += data[r * d + j] * data[r * d + j];
    const double nr = std::sqrt(s);
    if (nr > radius) {
      const double f = radius / nr;
      for (std::int64_t j = 0; j < d; ++j) data[r * d + j] *= f;
    }
  }
}

}  // namespace hyperseg::nn
