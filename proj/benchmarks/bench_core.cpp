// Microbenchmarks for the hot paths: ball arithmetic, the smooth-kernel
// tensor ops, 3D convolutions, encoding, and clustering.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hyperseg/cluster.hpp"
#include "hyperseg/geometry.hpp"
#include "hyperseg/hyperbolic_ops.hpp"
#include "hyperseg/model.hpp"
#include "hyperseg/patch.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/sampler.hpp"
#include "hyperseg/stats.hpp"
#include "hyperseg/synthgen.hpp"
#include "hyperseg/tensor.hpp"

namespace {

using namespace hyperseg;

geometry::BallPoint random_ball_point(Rng& rng, std::size_t dim, double max_norm = 0.85) {
  geometry::Vec v(dim);
  for (auto& x : v) x = rng.normal();
  double norm = 0.0;
  for (const double x : v) norm += x * x;
  norm = std::sqrt(std::max(norm, 1e-300));
  const double r = max_norm * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  for (auto& x : v) x *= r / norm;
  return geometry::BallPoint(v);
}

void BM_MobiusAdd(benchmark::State& state) {
  Rng rng(1);
  const auto x = random_ball_point(rng, 8);
  const auto y = random_ball_point(rng, 8);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::mobius_add(x, y));
}
BENCHMARK(BM_MobiusAdd);

void BM_Distance(benchmark::State& state) {
  Rng rng(2);
  const auto x = random_ball_point(rng, 8);
  const auto y = random_ball_point(rng, 8);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::distance(x, y));
}
BENCHMARK(BM_Distance);

void BM_ExpLogRoundTrip(benchmark::State& state) {
  Rng rng(3);
  const auto x = random_ball_point(rng, 8);
  const auto y = random_ball_point(rng, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::exp_map(geometry::log_map(x, y)));
  }
}
BENCHMARK(BM_ExpLogRoundTrip);

void BM_Gyroplane(benchmark::State& state) {
  Rng rng(4);
  const auto p = random_ball_point(rng, 8);
  const auto z = random_ball_point(rng, 8);
  geometry::Vec a(8);
  for (auto& v : a) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(geometry::gyroplane(a, p, z));
}
BENCHMARK(BM_Gyroplane);

void BM_WrappedNormalLogProb(benchmark::State& state) {
  Rng rng(5);
  const stats::WrappedNormal wn(random_ball_point(rng, 8), geometry::Vec(8, 0.9));
  const auto z = random_ball_point(rng, 8);
  for (auto _ : state) benchmark::DoNotOptimize(stats::log_prob(wn, z));
}
BENCHMARK(BM_WrappedNormalLogProb);

nn::Tensor random_tensor(std::vector<std::int64_t> dims, std::uint64_t seed,
                         bool requires_grad = false) {
  Rng rng(seed);
  nn::Tensor t = nn::Tensor::zeros(std::move(dims), requires_grad);
  for (auto& v : t.mutable_data()) v = rng.normal();
  return t;
}

void BM_Conv3dForward(benchmark::State& state) {
  nn::NoGradGuard guard;
  const auto x = random_tensor({1, 16, 16, 16}, 6);
  const auto w = random_tensor({16, 1, 5, 5, 5}, 7);
  const auto b = nn::Tensor::zeros({16});
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv3d(x, w, b, 2, 2));
}
BENCHMARK(BM_Conv3dForward);

void BM_Conv3dBackward(benchmark::State& state) {
  const auto x = random_tensor({1, 16, 16, 16}, 8);
  for (auto _ : state) {
    auto w = random_tensor({16, 1, 5, 5, 5}, 9, /*requires_grad=*/true);
    auto y = nn::sum(nn::conv3d(x, w, nn::Tensor::zeros({16}), 2, 2));
    y.backward();
    benchmark::DoNotOptimize(w.grad());
  }
}
BENCHMARK(BM_Conv3dBackward);

void BM_ModelEncode(benchmark::State& state) {
  nn::NoGradGuard guard;
  model::ModelConfig cfg;
  const model::Model net(cfg, 1);
  const auto patch = random_tensor({1, 16, 16, 16}, 10);
  for (auto _ : state) benchmark::DoNotOptimize(net.encode(patch));
}
BENCHMARK(BM_ModelEncode);

void BM_KMeansHyperbolic(benchmark::State& state) {
  Rng rng(11);
  std::vector<geometry::Vec> points;
  for (int c = 0; c < 3; ++c) {
    const auto center = random_ball_point(rng, 2, 0.6);
    for (int i = 0; i < 64; ++i) {
      const geometry::Vec noise{0.05 * rng.normal(), 0.05 * rng.normal()};
      points.push_back(geometry::exp_map(center, noise).coords());
    }
  }
  cluster::KMeansConfig cfg;
  cfg.k = 3;
  for (auto _ : state) benchmark::DoNotOptimize(cluster::kmeans(points, cfg));
}
BENCHMARK(BM_KMeansHyperbolic);

void BM_FrechetMean(benchmark::State& state) {
  Rng rng(12);
  std::vector<geometry::BallPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(random_ball_point(rng, 2, 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(cluster::frechet_mean(pts));
}
BENCHMARK(BM_FrechetMean);

void BM_PinkNoise(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthgen::pink_noise(32, 32, 32, 0.25, 13));
  }
}
BENCHMARK(BM_PinkNoise);

}  // namespace

BENCHMARK_MAIN();
