#pragma once

#include <cstdint>
#include <vector>

#include "hyperseg/tensor.hpp"

namespace hyperseg::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Parameters without an accumulated gradient are
// skipped for that step (their moments decay as if the gradient were zero).
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void zero_grad();
  void step();

  std::int64_t steps() const { return steps_; }
  std::size_t n_params() const { return params_.size(); }

  // Checkpoint access; order matches the constructor's parameter list.
  const std::vector<double>& m(std::size_t i) const { return m_[i]; }
  const std::vector<double>& v(std::size_t i) const { return v_[i]; }
  void load_state(std::size_t i, std::vector<double> m, std::vector<double> v);
  void set_steps(std::int64_t t) { steps_ = t; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t steps_ = 0;
};

}  // namespace hyperseg::nn
