#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hyperseg/errors.hpp"
#include "hyperseg/rng.hpp"

namespace hyperseg::nn {

using Shape = std::vector<std::int64_t>;

std::int64_t numel_of(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

struct Node {
  std::vector<double> data;
  Shape shape;
  bool requires_grad = false;
  std::vector<double> grad;  // allocated lazily, same length as data
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;  // reads this->grad, accumulates into parents

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

bool grad_mode_enabled();

}  // namespace detail

// Disables graph recording for its lifetime (inference / plain numerics).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// Dense double tensor with a dynamically built reverse-mode graph. Data is
// row-major over the shape. Copying a Tensor copies the handle, not the
// storage; graphs are kept alive by shared ownership of the nodes.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value);
  static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(n_); }
  const Shape& shape() const;
  std::int64_t numel() const;
  std::int64_t size(std::size_t axis) const;
  bool requires_grad() const;

  const std::vector<double>& data() const;
  // Direct access for leaf parameters (optimizer updates, checkpoint loads).
  std::vector<double>& mutable_data();
  const std::vector<double>& grad() const;
  double item() const;
  Tensor detach() const;  // same values, no graph

  void zero_grad();
  // Reverse pass from a scalar; accumulates into .grad of reachable leaves.
  void backward();

  // Internal: node handle used by op implementations.
  const std::shared_ptr<detail::Node>& node() const { return n_; }
  static Tensor wrap(std::shared_ptr<detail::Node> n) { return Tensor(std::move(n)); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : n_(std::move(n)) {}
  std::shared_ptr<detail::Node> n_;
};

// ---- elementwise (broadcasting: equal rank with 1-dims, or numel-1 scalar) ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);

Tensor neg(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor asinh(const Tensor& a);
// artanh with input clamped into the open interval (-1, 1).
Tensor atanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor clamp_min(const Tensor& a, double lo);

// Smooth ratio kernels on s = t^2 >= 0; all are analytic at s = 0, which keeps
// exp/log-map style formulas differentiable at their removable singularities:
//   tanh_ratio(s)  = tanh(sqrt(s)) / sqrt(s)
//   atanh_ratio(s) = artanh(sqrt(s)) / sqrt(s)   (s clamped below 1)
//   sinh_ratio(s)  = sinh(sqrt(s)) / sqrt(s)
Tensor tanh_ratio(const Tensor& s);
Tensor atanh_ratio(const Tensor& s);
Tensor sinh_ratio(const Tensor& s);

// ---- reductions / structure ----
Tensor sum(const Tensor& a);                   // -> {1}
Tensor mean(const Tensor& a);                  // -> {1}
Tensor row_sums(const Tensor& a);              // (N, d) -> (N, 1)
Tensor col_sums(const Tensor& a);              // (N, d) -> (1, d)
Tensor reshape(const Tensor& a, Shape shape);  // numel-preserving copy
Tensor row(const Tensor& a, std::int64_t i);   // (N, d) -> (1, d)
Tensor concat_rows(const std::vector<Tensor>& rows);  // k x (Ni, d) -> (sum Ni, d)

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator+(const Tensor& a, double s) { return add_scalar(a, s); }
inline Tensor operator+(double s, const Tensor& a) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor& a, double s) { return add_scalar(a, -s); }
inline Tensor operator-(double s, const Tensor& a) { return add_scalar(neg(a), s); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator*(const Tensor& a, double s) { return mul_scalar(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return mul_scalar(a, s); }
inline Tensor operator/(const Tensor& a, double s) { return mul_scalar(a, 1.0 / s); }
inline Tensor operator/(double s, const Tensor& a) { return div(Tensor::scalar(s), a); }

// Internal helper shared by op implementations: builds a node, wiring parents
// and the backward closure only when grad mode is on and some parent needs it.
Tensor make_op(Shape shape, std::vector<double> data, const std::vector<Tensor>& parents,
               std::function<void(detail::Node&)> backward);

}  // namespace hyperseg::nn
