#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hyperseg/volume.hpp"

namespace hyperseg::metrics {

// DICE overlap of a label in pred against a label in gt. Two empty sets are a
// perfect match (1.0).
double dice(const Mask& pred, std::uint16_t pred_label, const Mask& gt,
            std::uint16_t gt_label);

// Minimum-cost assignment for a square cost matrix (O(n^3) potentials method).
// Returns col index per row; total cost in *cost if non-null.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost,
                           double* total_cost = nullptr);

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

using Point3 = std::array<double, 3>;

// Exact brute-force point-set Hausdorff measures (throws EmptySetError on
// empty inputs).
double directed_hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b);
double hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b);
// Mean of the two directed average surface distances.
double average_hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b);
// Symmetric 95th percentile (nearest-rank on each directed distance list).
double hausdorff95(const std::vector<Point3>& a, const std::vector<Point3>& b);

// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher),
// distance to the nearest voxel where mask != 0; INF where no voxel is set.
std::vector<double> squared_edt(const Mask& mask, std::uint16_t label);

struct MaskDistances {
  double hausdorff = 0.0;
  double average = 0.0;
  double percentile95 = 0.0;
};

// Voxel-scale Hausdorff family between two label regions, computed with the
// distance transform (identical values to the brute-force point-set ops).
MaskDistances mask_hausdorff(const Mask& pred, std::uint16_t pred_label, const Mask& gt,
                             std::uint16_t gt_label);

struct LevelReport {
  int level = 0;
  int n_classes = 0;
  int n_clusters = 0;
  std::vector<int> cluster_to_class;     // per cluster, matched class or -1
  std::vector<double> class_dice;        // per class, 0 when unmatched
  double avg_class_dice = 0.0;           // mean over all classes (incl. background)
  double avg_class_dice_fg = 0.0;        // mean over classes >= 1
  std::vector<double> class_hausdorff95; // per class, inf when undefined
};

// Match pred clusters (labels 0..n_clusters-1) to gt classes (0..n_classes-1)
// by Hungarian assignment on 1 - DICE, rectangular cases padded with dummies.
LevelReport evaluate_level(const Mask& pred, int n_clusters, const Mask& gt,
                           int n_classes, int level, bool with_hausdorff = true);

struct Report {
  std::vector<LevelReport> levels;
  std::string to_json(int indent = 2) const;
};

// Evaluate one predicted mask against a hierarchy of ground-truth masks.
Report evaluate_levels(const Mask& pred, int n_clusters,
                       const std::vector<Mask>& gt_levels,
                       const std::vector<int>& n_classes_per_level,
                       bool with_hausdorff = true);

// Rewrite cluster ids into matched class ids (unmatched clusters -> 0).
Mask apply_matching(const Mask& pred, const std::vector<int>& cluster_to_class);

}  // namespace hyperseg::metrics
