#pragma once

#include <cstdint>
#include <vector>

#include "hyperseg/geometry.hpp"
#include "hyperseg/rng.hpp"

namespace hyperseg::cluster {

struct FrechetConfig {
  int max_iter = 200;
  double tol = 1e-9;  // on the tangent residual norm
  double init_step = 1.0;
};

// Weighted Fréchet mean on the Poincare ball via Karcher flow: repeatedly move
// along the weighted mean of log-mapped points. Empty weights mean uniform.
geometry::BallPoint frechet_mean(const std::vector<geometry::BallPoint>& pts,
                                 const std::vector<double>& weights = {},
                                 const FrechetConfig& cfg = {});

struct KMeansConfig {
  int k = 7;
  int max_iter = 100;
  std::uint64_t seed = 0;
  bool euclidean = false;  // ablation: plain Lloyd in R^d
  FrechetConfig frechet;
};

struct KMeansResult {
  std::vector<geometry::Vec> centroids;    // k rows
  std::vector<int> labels;                 // per input point
  std::vector<double> objective_history;   // sum of squared distances after
                                           // each assignment step
  double objective = 0.0;
  int iterations = 0;
};

// Lloyd iterations with k-means++ seeding (squared-distance weighting). In
// hyperbolic mode all points must lie in the unit ball, distances are
// geodesic, and centroids are Fréchet means; ties in assignment go to the
// lowest centroid index. Empty clusters are reseeded to the point farthest
// from its assigned centroid.
KMeansResult kmeans(const std::vector<geometry::Vec>& points, const KMeansConfig& cfg);

}  // namespace hyperseg::cluster
