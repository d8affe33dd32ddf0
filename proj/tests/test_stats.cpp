#include <doctest.h>

#include <cmath>
#include <vector>

#include "gradcheck.hpp"
#include "hyperseg/geometry.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/stats.hpp"

using namespace hyperseg;
using namespace hyperseg::nn;
namespace geo = hyperseg::geometry;
using hyperseg::testing::max_rel_grad_err;
using stats::WrappedNormal;

namespace {

// Midpoint-rule integral of f over the unit 2-ball against the Riemannian
// volume element lambda_z^2 dz.
template <class F>
double ball_integral_2d(F f, int m = 1200) {
  const double h = 2.0 / m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = -1.0 + (i + 0.5) * h;
    for (int j = 0; j < m; ++j) {
      const double y = -1.0 + (j + 0.5) * h;
      const double r2 = x * x + y * y;
      if (r2 >= 1.0 - 1e-9) continue;
      const double lam = 2.0 / (1.0 - r2);
      acc += f(geo::BallPoint(geo::Vec{x, y})) * lam * lam * h * h;
    }
  }
  return acc;
}

template <class F>
double ball_integral_3d(F f, int m = 220) {
  const double h = 2.0 / m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = -1.0 + (i + 0.5) * h;
    for (int j = 0; j < m; ++j) {
      const double y = -1.0 + (j + 0.5) * h;
      for (int k = 0; k < m; ++k) {
        const double z = -1.0 + (k + 0.5) * h;
        const double r2 = x * x + y * y + z * z;
        if (r2 >= 1.0 - 1e-9) continue;
        const double lam = 2.0 / (1.0 - r2);
        acc += f(geo::BallPoint(geo::Vec{x, y, z})) * lam * lam * lam * h * h * h;
      }
    }
  }
  return acc;
}

Tensor ball_rows(Rng& rng, std::int64_t n, std::int64_t d, double max_norm,
                 bool requires_grad = false) {
  std::vector<double> data(n * d);
  for (std::int64_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      data[r * d + j] = rng.normal();
      s += data[r * d + j] * data[r * d + j];
    }
    const double f = max_norm * rng.uniform() / std::max(std::sqrt(s), 1e-12);
    for (std::int64_t j = 0; j < d; ++j) data[r * d + j] *= f;
  }
  return Tensor::from_data({n, d}, std::move(data), requires_grad);
}

}  // namespace

TEST_CASE("wrapped normal density integrates to one (2D)") {
  const WrappedNormal wn(geo::BallPoint(geo::Vec{0.4, -0.2}), geo::Vec{0.8, 1.3});
  const double total = ball_integral_2d(
      [&](const geo::BallPoint& z) { return std::exp(stats::log_prob(wn, z)); });
  CHECK(std::abs(total - 1.0) < 0.02);

  const WrappedNormal std2 = WrappedNormal::standard(2);
  const double tstd = ball_integral_2d(
      [&](const geo::BallPoint& z) { return std::exp(stats::log_prob(std2, z)); });
  CHECK(std::abs(tstd - 1.0) < 0.02);
}

TEST_CASE("wrapped normal density integrates to one (3D)") {
  const WrappedNormal wn(geo::BallPoint(geo::Vec{0.2, 0.1, -0.3}), geo::Vec{0.9, 1.1, 0.7});
  const double total = ball_integral_3d(
      [&](const geo::BallPoint& z) { return std::exp(stats::log_prob(wn, z)); });
  CHECK(std::abs(total - 1.0) < 0.02);
}

TEST_CASE("sampling stays in the ball and matches the reparameterized path") {
  Rng rng(31);
  const WrappedNormal wn(geo::BallPoint(geo::Vec{0.5, 0.1, 0.0, -0.2}),
                         geo::Vec{0.6, 1.0, 0.3, 0.9});
  for (int i = 0; i < 2000; ++i) {
    const geo::BallPoint z = stats::sample(wn, rng);
    CHECK(z.norm() < 1.0);
  }
  // Tiny sigma concentrates samples at mu.
  const WrappedNormal tight(geo::BallPoint(geo::Vec{0.3, -0.4}), geo::Vec{1e-8, 1e-8});
  const geo::BallPoint z = stats::sample(tight, rng);
  CHECK(geo::distance(z, tight.mu) < 1e-6);

  // Same seed, same draw.
  Rng r1(77), r2(77);
  const geo::BallPoint a = stats::sample(wn, r1);
  const geo::BallPoint b = stats::sample(wn, r2);
  for (std::size_t j = 0; j < a.dim(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("tensor log prob matches the scalar implementation") {
  Rng rng(32);
  const std::int64_t n = 12, d = 3;
  Tensor mu = ball_rows(rng, n, d, 0.7);
  Tensor ls = Tensor::randn({n, d}, rng, 0.4);
  Tensor z = ball_rows(rng, n, d, 0.9);
  Tensor lp = stats::wrapped_log_prob_rows(mu, ls, z);
  Tensor lprior = stats::wrapped_prior_log_prob_rows(z);
  for (std::int64_t r = 0; r < n; ++r) {
    geo::Vec muv(mu.data().begin() + r * d, mu.data().begin() + (r + 1) * d);
    geo::Vec sig(d);
    for (std::int64_t j = 0; j < d; ++j) sig[j] = std::exp(ls.data()[r * d + j]);
    geo::Vec zv(z.data().begin() + r * d, z.data().begin() + (r + 1) * d);
    const WrappedNormal wn(geo::BallPoint(muv), sig);
    CHECK(std::abs(lp.data()[r] - stats::log_prob(wn, geo::BallPoint(zv))) < 1e-9);
    const WrappedNormal st = WrappedNormal::standard(d);
    CHECK(std::abs(lprior.data()[r] - stats::log_prob(st, geo::BallPoint(zv))) < 1e-9);
  }
}

TEST_CASE("KL estimates: self-KL is zero, MC agrees with quadrature") {
  Rng rng(33);
  const WrappedNormal q(geo::BallPoint(geo::Vec{0.45, -0.15}), geo::Vec{0.7, 0.5});
  CHECK(stats::kl_mc(q, q, rng, 64) == 0.0);

  const WrappedNormal p = WrappedNormal::standard(2);
  const double kl_quad = ball_integral_2d([&](const geo::BallPoint& z) {
    const double lq = stats::log_prob(q, z);
    return std::exp(lq) * (lq - stats::log_prob(p, z));
  });
  Rng rng2(34);
  const double kl_est = stats::kl_mc(q, p, rng2, 40000);
  CHECK(kl_quad > 0.1);  // non-trivial divergence
  CHECK(std::abs(kl_est - kl_quad) / kl_quad < 0.03);
}

TEST_CASE("Euclidean normal helpers match closed forms") {
  Rng rng(35);
  Tensor mu = Tensor::randn({5, 3}, rng);
  Tensor ls = Tensor::randn({5, 3}, rng, 0.3);
  Tensor z = Tensor::randn({5, 3}, rng);
  Tensor lp = stats::normal_log_prob_rows(mu, ls, z);
  for (std::int64_t r = 0; r < 5; ++r) {
    double expect = 0.0;
    for (std::int64_t j = 0; j < 3; ++j) {
      const double s = std::exp(ls.data()[r * 3 + j]);
      const double diff = z.data()[r * 3 + j] - mu.data()[r * 3 + j];
      expect += -0.5 * diff * diff / (s * s) - std::log(s) -
                0.5 * std::log(2.0 * 3.14159265358979323846);
    }
    CHECK(std::abs(lp.data()[r] - expect) < 1e-10);
  }
  Tensor s = stats::normal_sample_rows(mu, ls, Tensor::zeros({5, 3}));
  for (std::int64_t i = 0; i < 15; ++i) CHECK(s.data()[i] == mu.data()[i]);
}

TEST_CASE("finite-difference gradients: wrapped normal pipeline") {
  Rng rng(36);
  const std::int64_t n = 4, d = 2;
  Tensor mu = ball_rows(rng, n, d, 0.6, true);
  Tensor ls = Tensor::randn({n, d}, rng, 0.3, true);
  Tensor noise = Tensor::randn({n, d}, rng);
  Tensor zq = ball_rows(rng, n, d, 0.8, true);
  std::vector<Tensor> in{mu, ls, zq};

  {
    std::vector<Tensor> inputs{mu, ls, zq};
    auto f = [](const std::vector<Tensor>& in) {
      return mean(stats::wrapped_log_prob_rows(in[0], in[1], in[2]));
    };
    CHECK(max_rel_grad_err(f, inputs, 1e-6) < 1e-4);
  }
  {
    std::vector<Tensor> inputs{mu, ls, zq};
    auto f = [](const std::vector<Tensor>& in) {
      return mean(stats::wrapped_prior_log_prob_rows(in[2]));
    };
    CHECK(max_rel_grad_err(f, inputs, 1e-6) < 1e-4);
  }
  {
    // Full reparameterized MC-KL path, as used by training.
    std::vector<Tensor> inputs{mu, ls};
    auto f = [&noise](const std::vector<Tensor>& in) {
      Tensor z = stats::wrapped_sample_rows(in[0], in[1], noise);
      Tensor lq = stats::wrapped_log_prob_rows(in[0], in[1], z);
      Tensor lp = stats::wrapped_prior_log_prob_rows(z);
      return mean(lq - lp);
    };
    CHECK(max_rel_grad_err(f, inputs, 1e-6) < 1e-4);
  }
  {
    std::vector<Tensor> inputs{mu, ls};
    auto f = [&noise](const std::vector<Tensor>& in) {
      Tensor z = stats::normal_sample_rows(in[0], in[1], noise);
      Tensor lq = stats::normal_log_prob_rows(in[0], in[1], z);
      Tensor lp = stats::normal_prior_log_prob_rows(z);
      return mean(lq - lp);
    };
    CHECK(max_rel_grad_err(f, inputs, 1e-6) < 1e-4);
  }
}

TEST_CASE("wrapped normal validation") {
  CHECK_THROWS_AS(WrappedNormal(geo::BallPoint(geo::Vec{0.1, 0.2}), geo::Vec{1.0}),
                  DimensionError);
  CHECK_THROWS_AS(WrappedNormal(geo::BallPoint(geo::Vec{0.1}), geo::Vec{-1.0}), Error);
  Rng rng(37);
  const WrappedNormal q = WrappedNormal::standard(2);
  CHECK_THROWS_AS(stats::kl_mc(q, WrappedNormal::standard(3), rng, 4), DimensionError);
  CHECK_THROWS_AS(stats::kl_mc(q, q, rng, 0), Error);
}
