#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "hyperseg/geometry.hpp"
#include "hyperseg/patch.hpp"
#include "hyperseg/pipeline.hpp"

using namespace hyperseg;

namespace {

Volume noisy_volume(std::int64_t n, std::uint64_t seed) {
  Volume vol(n, n, n);
  Rng rng(seed);
  for (std::int64_t z = 0; z < n; ++z) {
    for (std::int64_t y = 0; y < n; ++y) {
      for (std::int64_t x = 0; x < n; ++x) {
        const double c = (n - 1) / 2.0;
        const double r = std::sqrt((x - c) * (x - c) + (y - c) * (y - c) +
                                   (z - c) * (z - c));
        vol.at(x, y, z) =
            static_cast<float>((r < n / 3.0 ? 1.0 : 0.0) + 0.1 * rng.normal());
      }
    }
  }
  return vol;
}

}  // namespace

TEST_CASE("patch helpers: standardize, extraction, reflection") {
  Volume vol(4, 3, 2);
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    vol.data[i] = static_cast<float>(i);
  }

  const Volume std_vol = pipeline::standardize(vol);
  double mean = 0.0, var = 0.0;
  for (float v : std_vol.data) mean += v;
  mean /= static_cast<double>(std_vol.data.size());
  for (float v : std_vol.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(std_vol.data.size());
  CHECK(std::abs(mean) < 1e-6);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-5));

  const Volume flat = pipeline::standardize(Volume(3, 3, 3, 2.5f));
  for (float v : flat.data) CHECK(v == 0.0f);

  // Interior extraction matches direct indexing.
  sampler::PatchSpec spec;
  spec.center = {2, 1, 1};
  spec.edge = 2;
  const nn::Tensor t = pipeline::patch_to_tensor(vol, spec);
  CHECK(t.shape() == nn::Shape{1, 2, 2, 2});
  // lo = center - edge/2 = (1, 0, 0).
  CHECK(t.data()[0] == doctest::Approx(vol.at(1, 0, 0)));
  CHECK(t.data()[1] == doctest::Approx(vol.at(2, 0, 0)));
  CHECK(t.data()[2] == doctest::Approx(vol.at(1, 1, 0)));
  CHECK(t.data()[7] == doctest::Approx(vol.at(2, 1, 1)));

  sampler::PatchSpec outside = spec;
  outside.center = {0, 0, 0};
  outside.edge = 3;
  CHECK_THROWS_AS(pipeline::patch_to_tensor(vol, outside), ShapeError);

  // Reflection at the low corner: index -1 maps to 1, -2 maps to 2.
  const nn::Tensor r = pipeline::patch_to_tensor_reflect(vol, {0, 0, 0}, 3);
  CHECK(r.shape() == nn::Shape{1, 3, 3, 3});
  const auto at = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return r.data()[static_cast<std::size_t>((z * 3 + y) * 3 + x)];
  };
  CHECK(at(1, 1, 1) == doctest::Approx(vol.at(0, 0, 0)));
  CHECK(at(0, 1, 1) == doctest::Approx(vol.at(1, 0, 0)));
  CHECK(at(1, 0, 1) == doctest::Approx(vol.at(0, 1, 0)));
  CHECK(at(1, 1, 0) == doctest::Approx(vol.at(0, 0, 1)));
  CHECK(at(2, 1, 1) == doctest::Approx(vol.at(1, 0, 0)));

  // High corner of the shortest axis (nz = 2): index 2 reflects to 0.
  const nn::Tensor rh = pipeline::patch_to_tensor_reflect(vol, {3, 2, 1}, 3);
  const auto ath = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return rh.data()[static_cast<std::size_t>((z * 3 + y) * 3 + x)];
  };
  CHECK(ath(1, 1, 1) == doctest::Approx(vol.at(3, 2, 1)));
  CHECK(ath(2, 1, 1) == doctest::Approx(vol.at(2, 2, 1)));  // x = 4 -> 2
  CHECK(ath(1, 2, 1) == doctest::Approx(vol.at(3, 1, 1)));  // y = 3 -> 1
  CHECK(ath(1, 1, 2) == doctest::Approx(vol.at(3, 2, 0)));  // z = 2 -> 0

  // Resize keeps a (1, m, m, m) patch untouched.
  Rng rng(4);
  const nn::Tensor same = nn::Tensor::randn({1, 16, 16, 16}, rng);
  const nn::Tensor kept = pipeline::resize_patch(same, 16);
  CHECK(kept.data() == same.data());
  CHECK(pipeline::resize_patch(same, 8).shape() == nn::Shape{1, 8, 8, 8});
}

TEST_CASE("embed_volume: grid dims, ball invariant, constant volume") {
  model::ModelConfig mcfg;
  const model::Model net(mcfg, 42);

  pipeline::InferenceConfig cfg;
  cfg.stride = 2;

  const Volume vol = noisy_volume(9, 1);  // 9 not divisible by 2: grid = 5
  const pipeline::EmbeddedVolume emb = pipeline::embed_volume(vol, net, cfg);
  CHECK(emb.gx == 5);
  CHECK(emb.gy == 5);
  CHECK(emb.gz == 5);
  CHECK(emb.d == mcfg.d);
  CHECK(emb.hyperbolic);
  CHECK(emb.mu.size() == static_cast<std::size_t>(125 * mcfg.d));
  for (std::int64_t i = 0; i < emb.rows(); ++i) {
    double sq = 0.0;
    for (std::int64_t j = 0; j < emb.d; ++j) {
      const double v = emb.mu[static_cast<std::size_t>(i * emb.d + j)];
      sq += v * v;
    }
    CHECK(sq < 1.0);
  }

  // Constant input: every patch is identical, so every embedding is too.
  const Volume flat(8, 8, 8, 3.0f);
  pipeline::InferenceConfig fcfg;
  fcfg.stride = 4;
  const pipeline::EmbeddedVolume femb = pipeline::embed_volume(flat, net, fcfg);
  REQUIRE(femb.rows() == 8);
  for (std::int64_t i = 1; i < femb.rows(); ++i) {
    for (std::int64_t j = 0; j < femb.d; ++j) {
      CHECK(femb.mu[static_cast<std::size_t>(i * femb.d + j)] ==
            femb.mu[static_cast<std::size_t>(j)]);
    }
  }

  pipeline::InferenceConfig bad;
  bad.p = 4;
  CHECK_THROWS_AS(pipeline::embed_volume(vol, net, bad), Error);
  bad = pipeline::InferenceConfig{};
  bad.stride = 0;
  CHECK_THROWS_AS(pipeline::embed_volume(vol, net, bad), Error);
}

TEST_CASE("segment: mask dims, label range, determinism, nearest fill") {
  model::ModelConfig mcfg;
  const model::Model net(mcfg, 7);

  pipeline::InferenceConfig cfg;
  cfg.stride = 3;
  cfg.k = 3;
  cfg.seed = 11;

  const Volume vol = noisy_volume(11, 2);
  const Mask mask = pipeline::segment(vol, net, cfg);
  CHECK(mask.nx == vol.nx);
  CHECK(mask.ny == vol.ny);
  CHECK(mask.nz == vol.nz);
  std::set<std::uint16_t> used;
  for (std::uint16_t v : mask.data) used.insert(v);
  CHECK(static_cast<int>(used.size()) <= cfg.k);
  for (std::uint16_t v : mask.data) CHECK(v < cfg.k);

  const Mask again = pipeline::segment(vol, net, cfg);
  CHECK(mask.data == again.data);

  // The mask is exactly the nearest-grid-point expansion of the label grid.
  const pipeline::EmbeddedVolume emb = pipeline::embed_volume(vol, net, cfg);
  const cluster::KMeansResult res = pipeline::cluster_embeddings(emb, cfg);
  for (std::int64_t z = 0; z < vol.nz; ++z) {
    for (std::int64_t y = 0; y < vol.ny; ++y) {
      for (std::int64_t x = 0; x < vol.nx; ++x) {
        const auto g = [&](std::int64_t v, std::int64_t gdim) {
          return std::min((v + cfg.stride / 2) / cfg.stride, gdim - 1);
        };
        const std::int64_t row =
            (g(z, emb.gz) * emb.gy + g(y, emb.gy)) * emb.gx + g(x, emb.gx);
        CHECK(mask.at(x, y, z) == res.labels[static_cast<std::size_t>(row)]);
      }
    }
  }

  // k = 1 collapses to a single class.
  pipeline::InferenceConfig one = cfg;
  one.k = 1;
  const Mask single = pipeline::segment(vol, net, one);
  for (std::uint16_t v : single.data) CHECK(v == 0);
}

TEST_CASE("segment: euclidean ablation and checkpoint path") {
  model::ModelConfig euc;
  euc.hyperbolic = false;
  euc.use_gyro = false;
  euc.use_triplet = false;
  const model::Model net(euc, 5);

  pipeline::InferenceConfig cfg;
  cfg.stride = 4;
  cfg.k = 2;

  const Volume vol = noisy_volume(8, 3);
  const pipeline::EmbeddedVolume emb = pipeline::embed_volume(vol, net, cfg);
  CHECK_FALSE(emb.hyperbolic);
  const Mask mask = pipeline::segment(vol, net, cfg);
  CHECK(mask.numel() == vol.numel());

  // Checkpoint-driven overloads and mismatch reporting.
  const io::Checkpoint ckpt = net.to_checkpoint(nullptr, 0);
  const Mask via_ckpt = pipeline::segment(vol, ckpt, cfg);
  CHECK(via_ckpt.data == mask.data);

  io::Checkpoint broken = ckpt;
  broken.config_json = "{]";
  CHECK_THROWS_AS(pipeline::segment(vol, broken, cfg), CheckpointMismatchError);
}
