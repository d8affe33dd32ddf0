#include "hyperseg/adam.hpp"

#include <cmath>

namespace hyperseg::nn {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    if (!p.defined()) throw ShapeError("Adam: undefined parameter");
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

void Adam::step() {
  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const auto& node = p.node();
    if (node->grad.size() != node->data.size()) continue;  // no gradient this step
    auto& m = m_[i];
    auto& v = v_[i];
    auto& data = p.mutable_data();
    const auto& g = node->grad;
    for (std::size_t j = 0; j < data.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      data[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::load_state(std::size_t i, std::vector<double> m, std::vector<double> v) {
  if (i >= params_.size() || m.size() != m_[i].size() || v.size() != v_[i].size()) {
    throw CheckpointMismatchError("Adam: optimizer state size mismatch");
  }
  m_[i] = std::move(m);
  v_[i] = std::move(v);
}

}  // namespace hyperseg::nn
