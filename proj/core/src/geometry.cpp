#include "hyperseg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hyperseg::geometry {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_curvature(double c, const char* what) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(std::string(what) + ": curvature parameter must be finite and >= 0");
  }
}

BallPoint neg(const BallPoint& x) {
  Vec v = x.coords();
  for (double& e : v) e = -e;
  return BallPoint(std::move(v));
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) { return dot(a, a); }

double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

double artanh(double t) {
  t = std::clamp(t, -kArtanhClamp, kArtanhClamp);
  return std::atanh(t);
}

BallPoint::BallPoint(Vec coords) : coords_(std::move(coords)) {
  double s = 0.0;
  for (double e : coords_) {
    if (!std::isfinite(e)) throw NonFiniteError("BallPoint: non-finite coordinate");
    s += e * e;
  }
  if (!(s < 1.0)) throw Error("BallPoint: norm must be strictly below 1");
}

BallPoint BallPoint::origin(std::size_t dim) { return BallPoint(Vec(dim, 0.0)); }

double BallPoint::norm_sq() const { return geometry::norm_sq(coords_); }

double BallPoint::norm() const { return std::sqrt(norm_sq()); }

BallPoint project_to_ball(Vec x, double eps_ball) {
  double s = 0.0;
  for (double e : x) {
    if (!std::isfinite(e)) throw NonFiniteError("project_to_ball: non-finite coordinate");
    s += e * e;
  }
  const double max_norm = 1.0 - eps_ball;
  const double n = std::sqrt(s);
  if (n > max_norm) {
    const double f = max_norm / n;
    for (double& e : x) e *= f;
  }
  return BallPoint(std::move(x));
}

double conformal_factor(const BallPoint& x, double c) {
  require_curvature(c, "conformal_factor");
  const double den = 1.0 - c * x.norm_sq();
  if (!(den > 0.0)) throw Error("conformal_factor: point outside the radius-1/sqrt(c) ball");
  return 2.0 / den;
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y, double c) {
  require_same_dim(x.dim(), y.dim(), "mobius_add");
  require_curvature(c, "mobius_add");
  const double xy = dot(x.coords(), y.coords());
  const double x2 = x.norm_sq();
  const double y2 = y.norm_sq();
  const double den = 1.0 + 2.0 * c * xy + c * c * x2 * y2;
  const double ax = (1.0 + 2.0 * c * xy + c * y2) / den;
  const double ay = (1.0 - c * x2) / den;
  Vec out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ax * x[i] + ay * y[i];
  return project_to_ball(std::move(out));
}

BallPoint mobius_scalar_mul(double r, const BallPoint& x, double c) {
  require_curvature(c, "mobius_scalar_mul");
  if (!std::isfinite(r)) throw NonFiniteError("mobius_scalar_mul: non-finite scalar");
  const double n = x.norm();
  if (n < kZeroDirEps) return BallPoint::origin(x.dim());
  double scale;
  if (c == 0.0) {
    scale = r;  // Euclidean limit of tanh(r*artanh(sqrt(c)*n)) / (sqrt(c)*n)
  } else {
    const double sc = std::sqrt(c);
    scale = std::tanh(r * artanh(sc * n)) / (sc * n);
  }
  Vec out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * x[i];
  return project_to_ball(std::move(out));
}

double distance(const BallPoint& x, const BallPoint& y, double c) {
  require_same_dim(x.dim(), y.dim(), "distance");
  require_curvature(c, "distance");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double e = x[i] - y[i];
    d2 += e * e;
  }
  if (c == 0.0) return 2.0 * std::sqrt(d2);
  const double denom = (1.0 - c * x.norm_sq()) * (1.0 - c * y.norm_sq());
  if (!(denom > 0.0)) throw Error("distance: point outside the radius-1/sqrt(c) ball");
  // acosh(1 + s) written as log1p for stability near s = 0.
  const double s = 2.0 * c * d2 / denom;
  return std::log1p(s + std::sqrt(s * (s + 2.0))) / std::sqrt(c);
}

BallPoint exp_map(const BallPoint& z, const Vec& v, double c) {
  require_same_dim(z.dim(), v.size(), "exp_map");
  require_curvature(c, "exp_map");
  double n2 = 0.0;
  for (double e : v) {
    if (!std::isfinite(e)) throw NonFiniteError("exp_map: non-finite tangent vector");
    n2 += e * e;
  }
  const double n = std::sqrt(n2);
  if (n < kZeroDirEps) return z;
  Vec q(v.size());
  if (c == 0.0) {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = z[i] + v[i];
    return project_to_ball(std::move(q));
  }
  const double sc = std::sqrt(c);
  const double lam = conformal_factor(z, c);
  const double t = std::tanh(sc * lam * n / 2.0) / (sc * n);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = t * v[i];
  return mobius_add(z, project_to_ball(std::move(q)), c);
}

BallPoint exp_map(const TangentVector& t, double c) { return exp_map(t.base, t.v, c); }

TangentVector log_map(const BallPoint& z, const BallPoint& y, double c) {
  require_same_dim(z.dim(), y.dim(), "log_map");
  require_curvature(c, "log_map");
  if (c == 0.0) {
    Vec v(z.dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = y[i] - z[i];
    return {z, std::move(v)};
  }
  const BallPoint w = mobius_add(neg(z), y, c);
  const double n = w.norm();
  if (n < kZeroDirEps) return {z, Vec(z.dim(), 0.0)};
  const double sc = std::sqrt(c);
  const double lam = conformal_factor(z, c);
  const double scale = 2.0 * artanh(sc * n) / (sc * lam * n);
  Vec v(z.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * w[i];
  return {z, std::move(v)};
}

double gyroplane(const Vec& a, const BallPoint& p, const BallPoint& z) {
  require_same_dim(a.size(), p.dim(), "gyroplane");
  require_same_dim(p.dim(), z.dim(), "gyroplane");
  const double an = norm(a);
  if (!std::isfinite(an)) throw NonFiniteError("gyroplane: non-finite normal");
  if (an == 0.0) throw ZeroNormError("gyroplane: normal vector must be nonzero");
  const BallPoint w = mobius_add(neg(p), z);
  const double arg = 2.0 * dot(w.coords(), a) / ((1.0 - w.norm_sq()) * an);
  return conformal_factor(p) * an * std::asinh(arg);
}

}  // namespace hyperseg::geometry
