#include "hyperseg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperseg::cluster {

using geometry::BallPoint;
using geometry::Vec;

namespace {

constexpr double kSafeRadius = 1.0 - geometry::kEpsBall;

double dot_n(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

double dist_hyp(const double* a, const double* b, int d) {
  double d2 = 0.0, a2 = 0.0, b2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = a[i] - b[i];
    d2 += e * e;
    a2 += a[i] * a[i];
    b2 += b[i] * b[i];
  }
  const double s = 2.0 * d2 / ((1.0 - a2) * (1.0 - b2));
  return std::log1p(s + std::sqrt(s * (s + 2.0)));
}

double dist2_eucl(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}

// out = (-m) (+) x, Mobius addition with negated first argument.
void mobius_neg_add(const double* m, const double* x, int d, double* out) {
  double xy = 0.0, m2 = 0.0, x2 = 0.0;
  for (int i = 0; i < d; ++i) {
    xy += -m[i] * x[i];
    m2 += m[i] * m[i];
    x2 += x[i] * x[i];
  }
  const double den = 1.0 + 2.0 * xy + m2 * x2;
  const double cm = (1.0 + 2.0 * xy + x2) / den;
  const double cx = (1.0 - m2) / den;
  for (int i = 0; i < d; ++i) out[i] = cm * -m[i] + cx * x[i];
}

void log_at(const double* m, const double* x, int d, double* out) {
  mobius_neg_add(m, x, d, out);
  double w2 = dot_n(out, out, d);
  const double wn = std::sqrt(w2);
  const double m2 = dot_n(m, m, d);
  if (wn < 1e-15) {
    std::fill(out, out + d, 0.0);
    return;
  }
  const double scale = (1.0 - m2) * geometry::artanh(wn) / wn;
  for (int i = 0; i < d; ++i) out[i] *= scale;
}

void exp_at(const double* m, const double* v, int d, double* out) {
  const double vn = std::sqrt(dot_n(v, v, d));
  if (vn < 1e-15) {
    std::copy(m, m + d, out);
    return;
  }
  const double m2 = dot_n(m, m, d);
  const double t = std::tanh(vn / (1.0 - m2)) / vn;  // tanh(lambda*|v|/2)/|v|
  std::vector<double> q(d);
  for (int i = 0; i < d; ++i) q[i] = t * v[i];
  // m (+) q
  double mq = 0.0, q2 = 0.0;
  for (int i = 0; i < d; ++i) {
    mq += m[i] * q[i];
    q2 += q[i] * q[i];
  }
  const double den = 1.0 + 2.0 * mq + m2 * q2;
  const double cm = (1.0 + 2.0 * mq + q2) / den;
  const double cq = (1.0 - m2) / den;
  double n2 = 0.0;
  for (int i = 0; i < d; ++i) {
    out[i] = cm * m[i] + cq * q[i];
    n2 += out[i] * out[i];
  }
  const double n = std::sqrt(n2);
  if (n > kSafeRadius) {
    const double f = kSafeRadius / n;
    for (int i = 0; i < d; ++i) out[i] *= f;
  }
}

// Karcher flow on flat storage; pts is n x d, w normalized weights (or null).
std::vector<double> frechet_raw(const double* pts, const double* w, std::size_t n, int d,
                                const FrechetConfig& cfg) {
  std::vector<double> m(pts, pts + d);
  std::vector<double> t(d), lg(d);
  double step = cfg.init_step;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iter; ++it) {
    std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      log_at(m.data(), pts + i * d, d, lg.data());
      const double wi = w ? w[i] : 1.0 / static_cast<double>(n);
      for (int j = 0; j < d; ++j) t[j] += wi * lg[j];
    }
    const double res = std::sqrt(dot_n(t.data(), t.data(), d));
    if (res < cfg.tol) return m;
    if (res > prev_res) step = std::max(step * 0.5, 1e-3);
    prev_res = res;
    for (int j = 0; j < d; ++j) t[j] *= step;
    std::vector<double> next(d);
    exp_at(m.data(), t.data(), d, next.data());
    m = std::move(next);
  }
  throw NonConvergenceError("frechet_mean: no convergence after " +
                            std::to_string(cfg.max_iter) + " iterations");
}

}  // namespace

BallPoint frechet_mean(const std::vector<BallPoint>& pts, const std::vector<double>& weights,
                       const FrechetConfig& cfg) {
  if (pts.empty()) throw EmptySetError("frechet_mean: empty point set");
  const int d = static_cast<int>(pts[0].dim());
  std::vector<double> flat(pts.size() * d);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<int>(pts[i].dim()) != d) {
      throw DimensionError("frechet_mean: mixed dimensions");
    }
    std::copy(pts[i].coords().begin(), pts[i].coords().end(), flat.begin() + i * d);
  }
  std::vector<double> wn;
  const double* wptr = nullptr;
  if (!weights.empty()) {
    if (weights.size() != pts.size()) {
      throw DimensionError("frechet_mean: weight count mismatch");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw Error("frechet_mean: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw Error("frechet_mean: weights sum to zero");
    wn.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) wn[i] = weights[i] / total;
    wptr = wn.data();
  }
  return BallPoint(frechet_raw(flat.data(), wptr, pts.size(), d, cfg));
}

KMeansResult kmeans(const std::vector<Vec>& points, const KMeansConfig& cfg) {
  const std::size_t n = points.size();
  if (n == 0) throw EmptySetError("kmeans: empty point set");
  const int d = static_cast<int>(points[0].size());
  if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > n) {
    throw InvalidKError("kmeans: k = " + std::to_string(cfg.k) + " with n = " +
                        std::to_string(n));
  }
  std::vector<double> flat(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(points[i].size()) != d) {
      throw DimensionError("kmeans: mixed dimensions");
    }
    if (!cfg.euclidean) {
      double s = 0.0;
      for (double e : points[i]) s += e * e;
      if (!(s < 1.0)) throw Error("kmeans: point outside the unit ball in hyperbolic mode");
    }
    std::copy(points[i].begin(), points[i].end(), flat.begin() + i * d);
  }

  auto dist2 = [&](const double* a, const double* b) {
    if (cfg.euclidean) return dist2_eucl(a, b, d);
    const double dist = dist_hyp(a, b, d);
    return dist * dist;
  };

  const int k = cfg.k;
  Rng rng(cfg.seed);
  std::vector<double> centroids(k * d);

  // k-means++ seeding with squared-distance weights.
  {
    const std::size_t first = rng.uniform_int(n);
    std::copy(flat.begin() + first * d, flat.begin() + (first + 1) * d, centroids.begin());
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        best[i] = std::min(best[i], dist2(flat.data() + i * d,
                                          centroids.data() + (c - 1) * d));
        total += best[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        const double r = rng.uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += best[i];
          if (acc >= r) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.uniform_int(n);
      }
      std::copy(flat.begin() + pick * d, flat.begin() + (pick + 1) * d,
                centroids.begin() + c * d);
    }
  }

  KMeansResult res;
  res.labels.assign(n, -1);
  std::vector<int> prev_labels(n, -2);
  std::vector<std::size_t> counts(k, 0);
  std::vector<double> point_dist2(n, 0.0);
  std::vector<double> scratch;

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    // Assignment (ties resolved to the lowest index by strict comparison).
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = dist2(flat.data() + i * d, centroids.data());
      for (int c = 1; c < k; ++c) {
        const double dd = dist2(flat.data() + i * d, centroids.data() + c * d);
        if (dd < best_d) {
          best_d = dd;
          best_c = c;
        }
      }
      res.labels[i] = best_c;
      point_dist2[i] = best_d;
      objective += best_d;
    }
    if (!res.objective_history.empty() &&
        objective > res.objective_history.back() * (1.0 + 1e-6) + 1e-9) {
      throw Error("kmeans: objective increased between iterations");
    }
    res.objective_history.push_back(objective);
    if (res.labels == prev_labels) break;
    prev_labels = res.labels;

    // Update step.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[res.labels[i]];
    std::vector<std::size_t> used_reseeds;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Reseed to the point farthest from its assigned centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (std::find(used_reseeds.begin(), used_reseeds.end(), i) !=
              used_reseeds.end()) {
            continue;
          }
          if (point_dist2[i] > far_d) {
            far_d = point_dist2[i];
            far = i;
          }
        }
        used_reseeds.push_back(far);
        std::copy(flat.begin() + far * d, flat.begin() + (far + 1) * d,
                  centroids.begin() + c * d);
        continue;
      }
      if (cfg.euclidean) {
        std::vector<double> mean(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (res.labels[i] != c) continue;
          for (int j = 0; j < d; ++j) mean[j] += flat[i * d + j];
        }
        for (int j = 0; j < d; ++j) centroids[c * d + j] = mean[j] / counts[c];
      } else {
        scratch.resize(counts[c] * d);
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (res.labels[i] != c) continue;
          std::copy(flat.begin() + i * d, flat.begin() + (i + 1) * d,
                    scratch.begin() + m * d);
          ++m;
        }
        const std::vector<double> fm =
            frechet_raw(scratch.data(), nullptr, counts[c], d, cfg.frechet);
        std::copy(fm.begin(), fm.end(), centroids.begin() + c * d);
      }
    }
  }

  res.iterations = it;
  res.objective = res.objective_history.back();
  res.centroids.resize(k);
  for (int c = 0; c < k; ++c) {
    res.centroids[c] = Vec(centroids.begin() + c * d, centroids.begin() + (c + 1) * d);
  }
  return res;
}

}  // namespace hyperseg::cluster
