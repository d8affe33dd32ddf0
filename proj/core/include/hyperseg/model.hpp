#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperseg/adam.hpp"
#include "hyperseg/conv.hpp"
#include "hyperseg/geometry.hpp"
#include "hyperseg/hyperbolic_ops.hpp"
#include "hyperseg/io.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/sampler.hpp"
#include "hyperseg/tensor.hpp"
#include "hyperseg/volume.hpp"

namespace hyperseg::model {

// Architecture and loss weights. The three booleans span the ablation grid:
// {hyperbolic, use_gyro, use_triplet} = (1,1,1) is the full model; Euclidean
// variants (hyperbolic = false) always use a plain first decoder layer.
struct ModelConfig {
  std::int64_t m = 16;  // encoder input edge (voxels); power of 2, >= 16
  std::int64_t d = 2;   // latent dimension
  std::vector<std::int64_t> filters{16, 32, 64, 128};
  std::int64_t kernel = 5;
  double beta = 1e3;   // triplet weight
  double alpha = 0.2;  // triplet margin
  std::int64_t latent_grid = 1;  // latent spatial edge; must equal m / 16
  bool hyperbolic = true;
  bool use_gyro = true;
  bool use_triplet = true;
  int kl_samples = 1;

  void validate() const;  // throws Error on any violated invariant
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// Posterior parameters for one encoded patch: rows index latent grid cells.
// mu rows are ball points when the config is hyperbolic, raw coordinates
// otherwise; z is filled by sample_latent.
struct LatentState {
  nn::Tensor mu;         // (cells, d)
  nn::Tensor log_sigma;  // (cells, d)
  nn::Tensor z;          // (cells, d), undefined until sampled
};

class Model {
 public:
  Model(ModelConfig cfg, std::uint64_t seed);
  static Model from_checkpoint(const io::Checkpoint& ckpt);

  const ModelConfig& config() const { return cfg_; }

  // (1, m, m, m) -> posterior (mu, log_sigma); z left undefined.
  LatentState encode(const nn::Tensor& patch) const;

  // Reparameterized posterior draw, (cells, d).
  nn::Tensor sample_latent(const LatentState& st, Rng& rng) const;

  // (cells, d) -> reconstruction (1, m, m, m).
  nn::Tensor decode(const nn::Tensor& z) const;

  // 0.5 * sum((patch - recon)^2): unit-variance Gaussian likelihood up to
  // constants.
  nn::Tensor recon_nll(const nn::Tensor& patch, const nn::Tensor& recon) const;

  // Single-draw KL integrand log q(z) - log p(z), averaged over latent cells.
  nn::Tensor kl_term(const LatentState& st, const nn::Tensor& z) const;

  // Negative ELBO: recon_nll + mean of kl_term over the provided draws (the
  // first draw is the one the reconstruction came from).
  nn::Tensor elbo_loss(const nn::Tensor& patch, const LatentState& st,
                       const nn::Tensor& recon,
                       const std::vector<nn::Tensor>& z_draws) const;

  // Patch-level embedding (1, d): the single cell, or the tangent-space mean
  // at the origin over cells when the latent grid is larger.
  nn::Tensor patch_embedding(const LatentState& st) const;

  // Leaf parameter tensors in checkpoint order.
  std::vector<nn::Tensor> parameters() const;
  const std::vector<std::pair<std::string, nn::Tensor>>& named_parameters() const {
    return params_;
  }

  // Re-clamp ball-valued leaves (gyroplane base points) after an optimizer
  // step; a no-op for configs without them.
  void constrain_parameters();

  io::Checkpoint to_checkpoint(const nn::Adam* opt, std::uint64_t rng_seed) const;
  // Restores Adam moments and step count saved by to_checkpoint; the Adam
  // instance must wrap this model's parameters() in order.
  void load_optimizer_state(const io::Checkpoint& ckpt, nn::Adam& opt) const;

 private:
  nn::Tensor param(const std::string& name) const;

  ModelConfig cfg_;
  std::vector<std::pair<std::string, nn::Tensor>> params_;
  nn::GyroConvParams gyro_;  // defined only when hyperbolic && use_gyro
};

// Hinge triplet: max(0, d(mu, mu_pos) - d(mu, mu_neg) + alpha), hyperbolic
// distance on the ball.
double triplet_loss(const geometry::BallPoint& mu, const geometry::BallPoint& mu_pos,
                    const geometry::BallPoint& mu_neg, double alpha);

// Differentiable version over (1, d) embeddings; Euclidean distance when
// euclidean is set.
nn::Tensor triplet_loss_rows(const nn::Tensor& mu, const nn::Tensor& mu_pos,
                             const nn::Tensor& mu_neg, double alpha, bool euclidean);

double total_loss(double elbo, double triplet, double beta);
nn::Tensor total_loss(const nn::Tensor& elbo, const nn::Tensor& triplet, double beta);

// ---------------------------------------------------------------------------
// Training loop.
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 8;
  sampler::SamplerConfig sampler;  // anchors_per_volume lives here
  nn::AdamConfig adam;             // lr 1e-4, betas (0.9, 0.999)
  std::uint64_t seed = 0;
  std::string loss_log_path;  // JSON-lines written here when non-empty
};

struct TrainResult {
  io::Checkpoint checkpoint;
  std::vector<double> epoch_total;  // mean total loss per epoch
  std::vector<double> epoch_elbo;
  std::vector<double> epoch_triplet;
  std::string loss_log;  // the JSON-lines text
};

// e epochs of triplet sampling + Adam over all volumes; volumes are
// standardized internally. Throws EmptyDatasetError on an empty list and
// NonFiniteError if any step's total loss is not finite.
TrainResult train(const std::vector<Volume>& volumes, const ModelConfig& mcfg,
                  const TrainConfig& tcfg);

// A full run specification as read from a key = value configuration file.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

// Maps configuration keys onto model, optimizer, and sampler settings; every
// key defaults to the corresponding struct default, so an empty map yields the
// stock full-model recipe. Unknown keys raise Error (typo guard).
RunConfig parse_run_config(const io::ConfigMap& cfg);

}  // namespace hyperseg::model
