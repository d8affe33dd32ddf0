#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hyperseg/tensor.hpp"

namespace hyperseg::testing {

// Compares reverse-mode gradients of a scalar-valued builder against central
// finite differences over every element of every input. The builder must be a
// deterministic pure function of the input tensors' current data.
inline double max_rel_grad_err(
    const std::function<nn::Tensor(const std::vector<nn::Tensor>&)>& f,
    std::vector<nn::Tensor>& inputs, double h = 1e-6) {
  nn::Tensor out = f(inputs);
  for (nn::Tensor& t : inputs) t.zero_grad();
  out = f(inputs);
  out.backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(inputs.size());
  for (nn::Tensor& t : inputs) analytic.push_back(t.grad());

  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& data = inputs[i].mutable_data();
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double keep = data[j];
      double fp, fm;
      {
        nn::NoGradGuard ng;
        data[j] = keep + h;
        fp = f(inputs).item();
        data[j] = keep - h;
        fm = f(inputs).item();
        data[j] = keep;
      }
      const double fd = (fp - fm) / (2.0 * h);
      const double g = analytic[i][j];
      const double err = std::abs(fd - g) / std::max({1.0, std::abs(fd), std::abs(g)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace hyperseg::testing
