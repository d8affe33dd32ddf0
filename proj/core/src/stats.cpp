#include "hyperseg/stats.hpp"

#include <cmath>

#include "hyperseg/hyperbolic_ops.hpp"

namespace hyperseg::stats {

using geometry::BallPoint;
using geometry::Vec;
using nn::Tensor;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log(sinh(r) / r), stable for small r via the same series as sinh_ratio.
double log_sinh_ratio(double r) {
  const double s = r * r;
  if (s < 1e-8) return std::log(1.0 + s / 6.0 + s * s / 120.0);
  return std::log(std::sinh(r) / r);
}

}  // namespace

WrappedNormal::WrappedNormal(BallPoint mu_, Vec sigma_)
    : mu(std::move(mu_)), sigma(std::move(sigma_)) {
  if (mu.dim() != sigma.size()) {
    throw DimensionError("WrappedNormal: mu and sigma dimension mismatch");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error("WrappedNormal: sigma entries must be finite and > 0");
    }
  }
}

WrappedNormal WrappedNormal::standard(std::size_t dim) {
  return WrappedNormal(BallPoint::origin(dim), Vec(dim, 1.0));
}

BallPoint sample(const WrappedNormal& wn, Rng& rng) {
  const std::size_t d = wn.dim();
  const double lam = geometry::conformal_factor(wn.mu);
  Vec u(d);
  for (std::size_t j = 0; j < d; ++j) u[j] = wn.sigma[j] * rng.normal() / lam;
  return geometry::exp_map(wn.mu, u);
}

double log_prob(const WrappedNormal& wn, const BallPoint& z) {
  if (z.dim() != wn.dim()) throw DimensionError("log_prob: dimension mismatch");
  const std::size_t d = wn.dim();
  const double lam = geometry::conformal_factor(wn.mu);
  const geometry::TangentVector t = geometry::log_map(wn.mu, z);
  double quad = 0.0;
  double logdet = 0.0;
  double r2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double vj = lam * t.v[j];
    quad += vj * vj / (wn.sigma[j] * wn.sigma[j]);
    logdet += std::log(wn.sigma[j]);
    r2 += vj * vj;
  }
  const double gauss = -0.5 * quad - logdet - 0.5 * static_cast<double>(d) * kLog2Pi;
  return gauss - static_cast<double>(d - 1) * log_sinh_ratio(std::sqrt(r2));
}

double kl_mc(const WrappedNormal& q, const WrappedNormal& p, Rng& rng, int n_samples) {
  if (q.dim() != p.dim()) throw DimensionError("kl_mc: dimension mismatch");
  if (n_samples < 1) throw Error("kl_mc: need at least one sample");
  double acc = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const BallPoint z = sample(q, rng);
    acc += log_prob(q, z) - log_prob(p, z);
  }
  return acc / static_cast<double>(n_samples);
}

Tensor wrapped_sample_rows(const Tensor& mu, const Tensor& log_sigma,
                           const Tensor& noise) {
  // u = (sigma * eps) / lambda_mu lives in the tangent space at mu.
  const Tensor u = mul(mul(nn::exp(log_sigma), noise), 1.0 / nn::conformal_rows(mu));
  return nn::expmap_rows(mu, u);
}

Tensor wrapped_log_prob_rows(const Tensor& mu, const Tensor& log_sigma, const Tensor& z) {
  const std::int64_t d = mu.size(1);
  const Tensor v = mul(nn::logmap_rows(mu, z), nn::conformal_rows(mu));
  const Tensor sigma2 = nn::exp(2.0 * log_sigma);
  const Tensor quad = nn::row_sums(mul(v, v) / sigma2);
  const Tensor logdet = nn::row_sums(log_sigma);
  const Tensor gauss =
      -0.5 * quad - logdet - Tensor::scalar(0.5 * static_cast<double>(d) * kLog2Pi);
  const Tensor s = nn::rows_norm_sq(v);
  return gauss - static_cast<double>(d - 1) * nn::log(nn::sinh_ratio(s));
}

Tensor wrapped_prior_log_prob_rows(const Tensor& z) {
  const std::int64_t d = z.size(1);
  // r^2 = |lambda_0 * log_0(z)|^2 with lambda_0 = 2.
  const Tensor v = nn::log0_rows(z);
  const Tensor r2 = 4.0 * nn::rows_norm_sq(v);
  const Tensor gauss = -0.5 * r2 - Tensor::scalar(0.5 * static_cast<double>(d) * kLog2Pi);
  return gauss - static_cast<double>(d - 1) * nn::log(nn::sinh_ratio(r2));
}

Tensor normal_sample_rows(const Tensor& mu, const Tensor& log_sigma, const Tensor& noise) {
  return add(mu, mul(nn::exp(log_sigma), noise));
}

Tensor normal_log_prob_rows(const Tensor& mu, const Tensor& log_sigma, const Tensor& z) {
  const std::int64_t d = mu.size(1);
  const Tensor diff = sub(z, mu);
  const Tensor sigma2 = nn::exp(2.0 * log_sigma);
  const Tensor quad = nn::row_sums(mul(diff, diff) / sigma2);
  const Tensor logdet = nn::row_sums(log_sigma);
  return -0.5 * quad - logdet - Tensor::scalar(0.5 * static_cast<double>(d) * kLog2Pi);
}

Tensor normal_prior_log_prob_rows(const Tensor& z) {
  const std::int64_t d = z.size(1);
  const Tensor quad = nn::rows_norm_sq(z);
  return -0.5 * quad - Tensor::scalar(0.5 * static_cast<double>(d) * kLog2Pi);
}

}  // namespace hyperseg::stats
