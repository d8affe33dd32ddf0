#pragma once

#include "hyperseg/geometry.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/tensor.hpp"

namespace hyperseg::stats {

// Wrapped normal on the Poincare ball (c = 1): a Euclidean Gaussian in the
// lambda_mu-scaled tangent coordinates at mu, pushed through exp_mu. Its
// density is taken with respect to the Riemannian volume measure.
struct WrappedNormal {
  geometry::BallPoint mu;
  geometry::Vec sigma;  // per-dimension scales, all > 0

  WrappedNormal(geometry::BallPoint mu_, geometry::Vec sigma_);
  static WrappedNormal standard(std::size_t dim);  // mu = origin, sigma = 1
  std::size_t dim() const { return mu.dim(); }
};

// z = exp_mu((sigma * eps) / lambda_mu), eps ~ N(0, I).
geometry::BallPoint sample(const WrappedNormal& wn, Rng& rng);

// log density at z w.r.t. Riemannian measure:
//   log N(v; 0, diag sigma^2) + (d - 1) log(r / sinh r),
// with v = lambda_mu * log_mu(z) and r = |v| = d(mu, z).
double log_prob(const WrappedNormal& wn, const geometry::BallPoint& z);

// Monte Carlo KL(q || p) from n_samples draws of q.
double kl_mc(const WrappedNormal& q, const WrappedNormal& p, Rng& rng, int n_samples);

// ---- differentiable row batch versions (mu, log_sigma, z, noise: (N, d)) ----

// Reparameterized draw; noise holds standard normal values.
nn::Tensor wrapped_sample_rows(const nn::Tensor& mu, const nn::Tensor& log_sigma,
                               const nn::Tensor& noise);
// (N, 1) per-row log densities.
nn::Tensor wrapped_log_prob_rows(const nn::Tensor& mu, const nn::Tensor& log_sigma,
                                 const nn::Tensor& z);
// Standard wrapped normal prior at the origin.
nn::Tensor wrapped_prior_log_prob_rows(const nn::Tensor& z);

// Euclidean counterparts used by the flat-space ablation.
nn::Tensor normal_sample_rows(const nn::Tensor& mu, const nn::Tensor& log_sigma,
                              const nn::Tensor& noise);
nn::Tensor normal_log_prob_rows(const nn::Tensor& mu, const nn::Tensor& log_sigma,
                                const nn::Tensor& z);
nn::Tensor normal_prior_log_prob_rows(const nn::Tensor& z);

}  // namespace hyperseg::stats
