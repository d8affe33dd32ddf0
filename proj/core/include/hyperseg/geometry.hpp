#pragma once

#include <cstddef>
#include <vector>

#include "hyperseg/errors.hpp"

namespace hyperseg::geometry {

using Vec = std::vector<double>;

// Radius margin kept between valid points and the unit sphere. Conformal
// factors stay <= 2/eps_ball * (1 + o(1)), which keeps every downstream
// formula comfortably inside double range.
inline constexpr double kEpsBall = 1e-5;

// artanh inputs are clamped to this magnitude before evaluation.
inline constexpr double kArtanhClamp = 1.0 - 1e-12;

// Below this norm a direction is treated as degenerate (exact zero result).
inline constexpr double kZeroDirEps = 1e-15;

double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& a);
double norm(const Vec& a);

// artanh with the argument clamped into (-1, 1).
double artanh(double t);

// A point of the open unit ball. The constructor enforces the invariant
// (finite coordinates, norm strictly below 1); use project_to_ball to build a
// point from unconstrained data.
class BallPoint {
 public:
  BallPoint() = default;
  explicit BallPoint(Vec coords);

  static BallPoint origin(std::size_t dim);

  const Vec& coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double norm() const;
  double norm_sq() const;

 private:
  Vec coords_;
};

// Tangent vector attached to a base point.
struct TangentVector {
  BallPoint base;
  Vec v;
};

// Clamp an arbitrary finite vector into the ball of radius 1 - eps_ball.
// Points already inside that radius are returned unchanged (exact identity).
BallPoint project_to_ball(Vec x, double eps_ball = kEpsBall);

// lambda_x = 2 / (1 - c * ||x||^2)
double conformal_factor(const BallPoint& x, double c = 1.0);

// Mobius addition x (+) y for curvature parameter c >= 0 (c = 0 degenerates
// to vector addition). Result is re-projected into the eps_ball-safe radius.
BallPoint mobius_add(const BallPoint& x, const BallPoint& y, double c = 1.0);

// Mobius scalar multiplication r (x) x.
BallPoint mobius_scalar_mul(double r, const BallPoint& x, double c = 1.0);

// Geodesic distance. c = 0 gives the gyro-limit 2 * ||x - y||.
double distance(const BallPoint& x, const BallPoint& y, double c = 1.0);

// Riemannian exponential map of tangent vector v at z.
BallPoint exp_map(const BallPoint& z, const Vec& v, double c = 1.0);
BallPoint exp_map(const TangentVector& t, double c = 1.0);

// Riemannian logarithm map of y at z; inverse of exp_map.
TangentVector log_map(const BallPoint& z, const BallPoint& y, double c = 1.0);

// Signed gyroplane response at z for the hyperplane through p with normal a
// (curvature fixed at c = 1): lambda_p * ||a|| * asinh(2<w,a> / ((1-||w||^2)*||a||))
// with w = (-p) (+) z. Odd in a and zero exactly on the hyperplane.
double gyroplane(const Vec& a, const BallPoint& p, const BallPoint& z);

}  // namespace hyperseg::geometry
