#include "hyperseg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace hyperseg::nn {

namespace detail {

namespace {
thread_local bool g_grad_mode = true;
}

bool grad_mode_enabled() { return g_grad_mode; }

void set_grad_mode(bool on) { g_grad_mode = on; }

}  // namespace detail

NoGradGuard::NoGradGuard() : prev_(detail::grad_mode_enabled()) {
  detail::set_grad_mode(false);
}

NoGradGuard::~NoGradGuard() { detail::set_grad_mode(prev_); }

std::int64_t numel_of(const Shape& s) {
  std::int64_t n = 1;
  for (std::int64_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  out += ")";
  return out;
}

namespace {

void require_defined(const Tensor& t, const char* what) {
  if (!t.defined()) throw ShapeError(std::string(what) + ": undefined tensor");
}

void require_rank2(const Tensor& t, const char* what) {
  if (t.shape().size() != 2) {
    throw ShapeError(std::string(what) + ": expected rank-2 tensor, got " +
                     shape_str(t.shape()));
  }
}

}  // namespace

Tensor make_op(Shape shape, std::vector<double> data, const std::vector<Tensor>& parents,
               std::function<void(detail::Node&)> backward) {
  if (numel_of(shape) != static_cast<std::int64_t>(data.size())) {
    throw ShapeError("make_op: shape " + shape_str(shape) + " does not match data size " +
                     std::to_string(data.size()));
  }
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  bool need = false;
  if (detail::grad_mode_enabled()) {
    for (const Tensor& p : parents) {
      if (p.defined() && p.node()->requires_grad) {
        need = true;
        break;
      }
    }
  }
  if (need) {
    n->requires_grad = true;
    for (const Tensor& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::move(backward);
  }
  return Tensor::wrap(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
  if (numel_of(shape) != static_cast<std::int64_t>(data.size())) {
    throw ShapeError("from_data: shape " + shape_str(shape) + " does not match data size " +
                     std::to_string(data.size()));
  }
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = numel_of(shape);
  return from_data(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value) { return from_data({1}, {value}); }

Tensor Tensor::randn(Shape shape, Rng& rng, double stddev, bool requires_grad) {
  std::vector<double> d(numel_of(shape));
  for (double& e : d) e = stddev * rng.normal();
  return from_data(std::move(shape), std::move(d), requires_grad);
}

const Shape& Tensor::shape() const {
  require_defined(*this, "shape");
  return n_->shape;
}

std::int64_t Tensor::numel() const {
  require_defined(*this, "numel");
  return n_->numel();
}

std::int64_t Tensor::size(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) throw ShapeError("size: axis out of range");
  return s[axis];
}

bool Tensor::requires_grad() const {
  require_defined(*this, "requires_grad");
  return n_->requires_grad;
}

const std::vector<double>& Tensor::data() const {
  require_defined(*this, "data");
  return n_->data;
}

std::vector<double>& Tensor::mutable_data() {
  require_defined(*this, "mutable_data");
  return n_->data;
}

const std::vector<double>& Tensor::grad() const {
  require_defined(*this, "grad");
  if (n_->grad.size() != n_->data.size()) {
    throw Error("grad: no gradient accumulated for this tensor");
  }
  return n_->grad;
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item: tensor has " + std::to_string(numel()) +
                                     " elements, expected 1");
  return n_->data[0];
}

Tensor Tensor::detach() const {
  require_defined(*this, "detach");
  return from_data(n_->shape, n_->data, false);
}

void Tensor::zero_grad() {
  require_defined(*this, "zero_grad");
  n_->grad.assign(n_->data.size(), 0.0);
}

void Tensor::backward() {
  require_defined(*this, "backward");
  if (numel() != 1) throw ShapeError("backward: root must be a scalar");
  if (!n_->requires_grad) return;

  // Iterative post-order topological sort over grad-requiring ancestry.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(n_.get(), 0);
  visited.insert(n_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  n_->ensure_grad();
  n_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward_fn) node->backward_fn(*node);
  }
}

// ---------------------------------------------------------------------------
// elementwise helpers

namespace {

// df(x, y) is dy/dx given input x and output y.
template <class F, class DF>
Tensor unary_op(const Tensor& a, const char* what, F f, DF df) {
  require_defined(a, what);
  const auto& ad = a.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < ad.size(); ++i) out[i] = f(ad[i]);
  auto pa = a.node();
  return make_op(a.shape(), std::move(out), {a}, [pa, df](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      pa->grad[i] += self.grad[i] * df(pa->data[i], self.data[i]);
    }
  });
}

struct BroadcastPlan {
  Shape out;
  std::vector<std::int64_t> stride_a;  // per out-dim strides, 0 where broadcast
  std::vector<std::int64_t> stride_b;
};

BroadcastPlan broadcast_plan(const Shape& a, const Shape& b, const char* what) {
  // numel-1 tensors broadcast against anything.
  if (numel_of(a) == 1) {
    BroadcastPlan p;
    p.out = b;
    p.stride_a.assign(b.size(), 0);
    p.stride_b.resize(b.size());
    std::int64_t s = 1;
    for (int i = static_cast<int>(b.size()) - 1; i >= 0; --i) {
      p.stride_b[i] = s;
      s *= b[i];
    }
    if (b.empty()) {
      p.out = {1};
      p.stride_a = {0};
      p.stride_b = {1};
    }
    return p;
  }
  if (numel_of(b) == 1) {
    BroadcastPlan p = broadcast_plan(b, a, what);
    std::swap(p.stride_a, p.stride_b);
    return p;
  }
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": rank mismatch " + shape_str(a) + " vs " +
                     shape_str(b));
  }
  BroadcastPlan p;
  p.out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i] || a[i] == 1 || b[i] == 1) {
      p.out[i] = std::max(a[i], b[i]);
    } else {
      throw ShapeError(std::string(what) + ": incompatible shapes " + shape_str(a) + " vs " +
                       shape_str(b));
    }
  }
  auto strides_for = [&](const Shape& s) {
    std::vector<std::int64_t> st(s.size());
    std::int64_t acc = 1;
    for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
      st[i] = (s[i] == 1 && p.out[i] != 1) ? 0 : acc;
      acc *= s[i];
    }
    return st;
  };
  p.stride_a = strides_for(a);
  p.stride_b = strides_for(b);
  return p;
}

// dfa(av, bv) = d out / d a, dfb likewise.
template <class F, class DFA, class DFB>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* what, F f, DFA dfa, DFB dfb) {
  require_defined(a, what);
  require_defined(b, what);
  const BroadcastPlan plan = broadcast_plan(a.shape(), b.shape(), what);
  const auto& ad = a.data();
  const auto& bd = b.data();
  const std::int64_t n = numel_of(plan.out);
  const std::size_t rank = plan.out.size();

  std::vector<double> out(n);
  std::vector<std::int64_t> idx(rank, 0);
  std::int64_t ia = 0, ib = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = f(ad[ia], bd[ib]);
    // odometer increment
    for (int d = static_cast<int>(rank) - 1; d >= 0; --d) {
      ia += plan.stride_a[d];
      ib += plan.stride_b[d];
      if (++idx[d] < plan.out[d]) break;
      ia -= plan.stride_a[d] * plan.out[d];
      ib -= plan.stride_b[d] * plan.out[d];
      idx[d] = 0;
    }
  }

  auto pa = a.node();
  auto pb = b.node();
  return make_op(plan.out, std::move(out), {a, b},
                 [pa, pb, plan, dfa, dfb](detail::Node& self) {
                   const bool ga = pa->requires_grad;
                   const bool gb = pb->requires_grad;
                   if (ga) pa->ensure_grad();
                   if (gb) pb->ensure_grad();
                   const std::size_t rank = plan.out.size();
                   std::vector<std::int64_t> idx(rank, 0);
                   std::int64_t ia = 0, ib = 0;
                   const std::int64_t n = static_cast<std::int64_t>(self.data.size());
                   for (std::int64_t i = 0; i < n; ++i) {
                     const double g = self.grad[i];
                     if (ga) pa->grad[ia] += g * dfa(pa->data[ia], pb->data[ib]);
                     if (gb) pb->grad[ib] += g * dfb(pa->data[ia], pb->data[ib]);
                     for (int d = static_cast<int>(rank) - 1; d >= 0; --d) {
                       ia += plan.stride_a[d];
                       ib += plan.stride_b[d];
                       if (++idx[d] < plan.out[d]) break;
                       ia -= plan.stride_a[d] * plan.out[d];
                       ib -= plan.stride_b[d] * plan.out[d];
                       idx[d] = 0;
                     }
                   }
                 });
}

constexpr double kAtanhClamp = 1.0 - 1e-12;
constexpr double kRatioSeries = 1e-8;

double tanh_ratio_val(double s) {
  s = std::max(s, 0.0);
  if (s < kRatioSeries) return 1.0 - s / 3.0 + 2.0 * s * s / 15.0;
  const double t = std::sqrt(s);
  return std::tanh(t) / t;
}

double tanh_ratio_deriv(double s) {
  s = std::max(s, 0.0);
  if (s < kRatioSeries) return -1.0 / 3.0 + 4.0 * s / 15.0 - 17.0 * s * s / 105.0;
  const double t = std::sqrt(s);
  const double th = std::tanh(t);
  return ((1.0 - th * th) * t - th) / (2.0 * t * t * t);
}

double atanh_ratio_val(double s) {
  s = std::clamp(s, 0.0, kAtanhClamp);
  if (s < kRatioSeries) return 1.0 + s / 3.0 + s * s / 5.0;
  const double t = std::sqrt(s);
  return std::atanh(t) / t;
}

double atanh_ratio_deriv(double s) {
  s = std::clamp(s, 0.0, kAtanhClamp);
  if (s < kRatioSeries) return 1.0 / 3.0 + 2.0 * s / 5.0 + 3.0 * s * s / 7.0;
  return (1.0 / (1.0 - s) - atanh_ratio_val(s)) / (2.0 * s);
}

double sinh_ratio_val(double s) {
  s = std::max(s, 0.0);
  if (s < kRatioSeries) return 1.0 + s / 6.0 + s * s / 120.0;
  const double t = std::sqrt(s);
  return std::sinh(t) / t;
}

double sinh_ratio_deriv(double s) {
  s = std::max(s, 0.0);
  if (s < kRatioSeries) return 1.0 / 6.0 + s / 60.0 + s * s / 1680.0;
  const double t = std::sqrt(s);
  return (std::cosh(t) * t - std::sinh(t)) / (2.0 * t * t * t);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary_op(
      a, "add_scalar", [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary_op(
      a, "mul_scalar", [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor neg(const Tensor& a) {
  return unary_op(
      a, "neg", [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor exp(const Tensor& a) {
  return unary_op(
      a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary_op(
      a, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  return unary_op(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor tanh(const Tensor& a) {
  return unary_op(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor asinh(const Tensor& a) {
  return unary_op(
      a, "asinh", [](double x) { return std::asinh(x); },
      [](double x, double) { return 1.0 / std::sqrt(1.0 + x * x); });
}

Tensor atanh(const Tensor& a) {
  return unary_op(
      a, "atanh",
      [](double x) { return std::atanh(std::clamp(x, -kAtanhClamp, kAtanhClamp)); },
      [](double x, double) {
        const double t = std::clamp(x, -kAtanhClamp, kAtanhClamp);
        return 1.0 / (1.0 - t * t);
      });
}

Tensor relu(const Tensor& a) {
  return unary_op(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor clamp_min(const Tensor& a, double lo) {
  return unary_op(
      a, "clamp_min", [lo](double x) { return x > lo ? x : lo; },
      [lo](double x, double) { return x > lo ? 1.0 : 0.0; });
}

Tensor tanh_ratio(const Tensor& s) {
  return unary_op(
      s, "tanh_ratio", [](double x) { return tanh_ratio_val(x); },
      [](double x, double) { return tanh_ratio_deriv(x); });
}

Tensor atanh_ratio(const Tensor& s) {
  return unary_op(
      s, "atanh_ratio", [](double x) { return atanh_ratio_val(x); },
      [](double x, double) { return atanh_ratio_deriv(x); });
}

Tensor sinh_ratio(const Tensor& s) {
  return unary_op(
      s, "sinh_ratio", [](double x) { return sinh_ratio_val(x); },
      [](double x, double) { return sinh_ratio_deriv(x); });
}

Tensor sum(const Tensor& a) {
  require_defined(a, "sum");
  double acc = 0.0;
  for (double e : a.data()) acc += e;
  auto pa = a.node();
  return make_op({1}, {acc}, {a}, [pa](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    const double g = self.grad[0];
    for (double& e : pa->grad) e += g;
  });
}

Tensor mean(const Tensor& a) {
  require_defined(a, "mean");
  if (a.numel() == 0) throw ShapeError("mean: empty tensor");
  return mul_scalar(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor row_sums(const Tensor& a) {
  require_rank2(a, "row_sums");
  const std::int64_t n = a.size(0), d = a.size(1);
  std::vector<double> out(n, 0.0);
  const auto& ad = a.data();
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t j = 0; j < d; ++j) out[r] += ad[r * d + j];
  }
  auto pa = a.node();
  return make_op({n, 1}, std::move(out), {a}, [pa, n, d](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    for (std::int64_t r = 0; r < n; ++r) {
      const double g = self.grad[r];
      for (std::int64_t j = 0; j < d; ++j) pa->grad[r * d + j] += g;
    }
  });
}

Tensor col_sums(const Tensor& a) {
  require_rank2(a, "col_sums");
  const std::int64_t n = a.size(0), d = a.size(1);
  std::vector<double> out(d, 0.0);
  const auto& ad = a.data();
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t j = 0; j < d; ++j) out[j] += ad[r * d + j];
  }
  auto pa = a.node();
  return make_op({1, d}, std::move(out), {a}, [pa, n, d](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    for (std::int64_t r = 0; r < n; ++r) {
      for (std::int64_t j = 0; j < d; ++j) pa->grad[r * d + j] += self.grad[j];
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  require_defined(a, "reshape");
  if (numel_of(shape) != a.numel()) {
    throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                     shape_str(shape));
  }
  auto pa = a.node();
  return make_op(std::move(shape), a.data(), {a}, [pa](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    for (std::size_t i = 0; i < self.data.size(); ++i) pa->grad[i] += self.grad[i];
  });
}

Tensor row(const Tensor& a, std::int64_t i) {
  require_rank2(a, "row");
  const std::int64_t n = a.size(0), d = a.size(1);
  if (i < 0 || i >= n) throw ShapeError("row: index out of range");
  std::vector<double> out(a.data().begin() + i * d, a.data().begin() + (i + 1) * d);
  auto pa = a.node();
  return make_op({1, d}, std::move(out), {a}, [pa, i, d](detail::Node& self) {
    if (!pa->requires_grad) return;
    pa->ensure_grad();
    for (std::int64_t j = 0; j < d; ++j) pa->grad[i * d + j] += self.grad[j];
  });
}

Tensor concat_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw ShapeError("concat_rows: empty input");
  const std::int64_t d = rows.front().shape().size() == 2 ? rows.front().size(1) : -1;
  if (d < 0) throw ShapeError("concat_rows: expected rank-2 tensors");
  std::int64_t total = 0;
  for (const Tensor& t : rows) {
    require_rank2(t, "concat_rows");
    if (t.size(1) != d) throw ShapeError("concat_rows: column count mismatch");
    total += t.size(0);
  }
  std::vector<double> out;
  out.reserve(total * d);
  for (const Tensor& t : rows) out.insert(out.end(), t.data().begin(), t.data().end());
  std::vector<std::shared_ptr<detail::Node>> pnodes;
  pnodes.reserve(rows.size());
  for (const Tensor& t : rows) pnodes.push_back(t.node());
  return make_op({total, d}, std::move(out), rows, [pnodes](detail::Node& self) {
    std::size_t off = 0;
    for (const auto& p : pnodes) {
      const std::size_t sz = p->data.size();
      if (p->requires_grad) {
        p->ensure_grad();
        for (std::size_t i = 0; i < sz; ++i) p->grad[i] += self.grad[off + i];
      }
      off += sz;
    }
  });
}

}  // namespace hyperseg::nn
