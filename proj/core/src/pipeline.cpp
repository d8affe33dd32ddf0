#include "hyperseg/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hyperseg/errors.hpp"

namespace hyperseg::pipeline {

void InferenceConfig::validate() const {
  if (p < 1 || p % 2 == 0) throw Error("InferenceConfig: p must be odd and positive");
  if (k < 1) throw InvalidKError("InferenceConfig: k must be >= 1");
  if (stride < 1) throw Error("InferenceConfig: stride must be >= 1");
  if (batch < 1) throw Error("InferenceConfig: batch must be >= 1");
  if (kmeans_max_iter < 1) throw Error("InferenceConfig: kmeans_max_iter must be >= 1");
}

namespace {

std::int64_t grid_len(std::int64_t n, std::int64_t stride) {
  return (n + stride - 1) / stride;  // ceil
}

}  // namespace

EmbeddedVolume embed_volume(const Volume& vol, const model::Model& net,
                            const InferenceConfig& cfg) {
  cfg.validate();
  if (vol.numel() == 0) throw ShapeError("embed_volume: empty volume");

  const Volume std_vol = standardize(vol);
  const model::ModelConfig& mcfg = net.config();

  EmbeddedVolume out;
  out.gx = grid_len(vol.nx, cfg.stride);
  out.gy = grid_len(vol.ny, cfg.stride);
  out.gz = grid_len(vol.nz, cfg.stride);
  out.d = mcfg.d;
  out.hyperbolic = mcfg.hyperbolic;
  out.mu.resize(static_cast<std::size_t>(out.rows() * out.d));

  nn::NoGradGuard no_grad;
  std::size_t row = 0;
  for (std::int64_t gz = 0; gz < out.gz; ++gz) {
    for (std::int64_t gy = 0; gy < out.gy; ++gy) {
      for (std::int64_t gx = 0; gx < out.gx; ++gx) {
        const std::array<std::int64_t, 3> center{gx * cfg.stride, gy * cfg.stride,
                                                 gz * cfg.stride};
        const nn::Tensor patch = patch_to_tensor_reflect(std_vol, center, cfg.p);
        const nn::Tensor resized = resize_patch(patch, mcfg.m);
        const model::LatentState st = net.encode(resized);
        const nn::Tensor emb = net.patch_embedding(st);
        const std::vector<double>& e = emb.data();
        for (std::int64_t j = 0; j < out.d; ++j) {
          out.mu[row * static_cast<std::size_t>(out.d) + static_cast<std::size_t>(j)] =
              e[static_cast<std::size_t>(j)];
        }
        ++row;
      }
    }
  }
  return out;
}

EmbeddedVolume embed_volume(const Volume& vol, const io::Checkpoint& ckpt,
                            const InferenceConfig& cfg) {
  const model::Model net = model::Model::from_checkpoint(ckpt);
  return embed_volume(vol, net, cfg);
}

cluster::KMeansResult cluster_embeddings(const EmbeddedVolume& emb,
                                         const InferenceConfig& cfg) {
  std::vector<geometry::Vec> points;
  points.reserve(static_cast<std::size_t>(emb.rows()));
  for (std::int64_t i = 0; i < emb.rows(); ++i) {
    geometry::Vec v(static_cast<std::size_t>(emb.d));
    for (std::int64_t j = 0; j < emb.d; ++j) {
      v[static_cast<std::size_t>(j)] =
          emb.mu[static_cast<std::size_t>(i * emb.d + j)];
    }
    points.push_back(std::move(v));
  }
  cluster::KMeansConfig kcfg;
  kcfg.k = cfg.k;
  kcfg.max_iter = cfg.kmeans_max_iter;
  kcfg.seed = cfg.seed;
  kcfg.euclidean = !emb.hyperbolic;
  return cluster::kmeans(points, kcfg);
}

Mask labels_to_mask(const EmbeddedVolume& emb, const std::vector<int>& labels,
                    std::int64_t nx, std::int64_t ny, std::int64_t nz,
                    std::int64_t stride) {
  if (static_cast<std::int64_t>(labels.size()) != emb.rows()) {
    throw ShapeError("labels_to_mask: one label per embedding row required");
  }
  Mask mask(nx, ny, nz);
  const auto nearest = [&](std::int64_t v, std::int64_t g) {
    const std::int64_t i = (v + stride / 2) / stride;  // round to nearest grid point
    return std::min(i, g - 1);
  };
  for (std::int64_t z = 0; z < nz; ++z) {
    const std::int64_t gz = nearest(z, emb.gz);
    for (std::int64_t y = 0; y < ny; ++y) {
      const std::int64_t gy = nearest(y, emb.gy);
      for (std::int64_t x = 0; x < nx; ++x) {
        const std::int64_t gx = nearest(x, emb.gx);
        const std::int64_t row = (gz * emb.gy + gy) * emb.gx + gx;
        mask.at(x, y, z) =
            static_cast<std::uint16_t>(labels[static_cast<std::size_t>(row)]);
      }
    }
  }
  return mask;
}

Mask segment(const Volume& vol, const model::Model& net, const InferenceConfig& cfg) {
  const EmbeddedVolume emb = embed_volume(vol, net, cfg);
  const cluster::KMeansResult res = cluster_embeddings(emb, cfg);
  return labels_to_mask(emb, res.labels, vol.nx, vol.ny, vol.nz, cfg.stride);
}

Mask segment(const Volume& vol, const io::Checkpoint& ckpt, const InferenceConfig& cfg) {
  const model::Model net = model::Model::from_checkpoint(ckpt);
  return segment(vol, net, cfg);
}

}  // namespace hyperseg::pipeline
