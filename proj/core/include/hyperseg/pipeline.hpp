#pragma once

#include <cstdint>
#include <vector>

#include "hyperseg/cluster.hpp"
#include "hyperseg/io.hpp"
#include "hyperseg/model.hpp"
#include "hyperseg/patch.hpp"
#include "hyperseg/volume.hpp"

namespace hyperseg::pipeline {

struct InferenceConfig {
  std::int64_t p = 5;       // inference patch edge (odd)
  int k = 7;                // clusters
  std::int64_t stride = 1;  // voxel step of the embedding grid
  std::int64_t batch = 64;  // patches per forward block
  std::uint64_t seed = 0;   // k-means seed
  int kmeans_max_iter = 100;

  void validate() const;  // throws Error
};

// Per-voxel embeddings on the stride grid; rows are x-fastest like volumes.
struct EmbeddedVolume {
  std::int64_t gx = 0, gy = 0, gz = 0;  // grid dims, ceil(volume dim / stride)
  std::int64_t d = 0;
  std::vector<double> mu;  // (gx*gy*gz) x d, row-major
  bool hyperbolic = true;

  std::int64_t rows() const { return gx * gy * gz; }
};

// Dense patch -> embedding pass: a p-edge patch with reflection padding is
// extracted around every stride-grid voxel, resized to the encoder input, and
// encoded (no gradients). The volume is standardized internally.
EmbeddedVolume embed_volume(const Volume& vol, const model::Model& net,
                            const InferenceConfig& cfg);
EmbeddedVolume embed_volume(const Volume& vol, const io::Checkpoint& ckpt,
                            const InferenceConfig& cfg);

// Embeddings -> k-means (hyperbolic or Euclidean per the model config) ->
// label mask at full volume resolution; off-grid voxels inherit the label of
// their nearest grid point.
Mask segment(const Volume& vol, const model::Model& net, const InferenceConfig& cfg);
Mask segment(const Volume& vol, const io::Checkpoint& ckpt, const InferenceConfig& cfg);

// The clustering step alone, exposed for reuse and tests.
cluster::KMeansResult cluster_embeddings(const EmbeddedVolume& emb,
                                         const InferenceConfig& cfg);

// Label grid -> full-resolution mask via nearest grid point.
Mask labels_to_mask(const EmbeddedVolume& emb, const std::vector<int>& labels,
                    std::int64_t nx, std::int64_t ny, std::int64_t nz,
                    std::int64_t stride);

}  // namespace hyperseg::pipeline
