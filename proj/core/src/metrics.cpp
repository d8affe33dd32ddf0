#include "hyperseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <json.hpp>

namespace hyperseg::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dims(const Mask& a, const Mask& b, const char* what) {
  if (!same_dims(a, b)) throw ShapeError(std::string(what) + ": mask dimensions differ");
}

double percentile95_nearest_rank(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

// One-dimensional squared distance transform over a sampled function; INF
// entries are skipped (no parabola).
void dt_1d(const double* f, double* d, int n, std::vector<int>& v,
           std::vector<double>& z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    for (;;) {
      const int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = -kInf;
        z[1] = kInf;
        s = kInf;
        break;
      }
    }
    if (s == kInf) continue;  // q replaced the whole lower envelope
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d, d + n, kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

double dice(const Mask& pred, std::uint16_t pred_label, const Mask& gt,
            std::uint16_t gt_label) {
  require_same_dims(pred, gt, "dice");
  std::int64_t both = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool a = pred.data[i] == pred_label;
    const bool b = gt.data[i] == gt_label;
    both += a && b;
    na += a;
    nb += b;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost,
                           double* total_cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) throw ShapeError("hungarian: empty cost matrix");
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw ShapeError("hungarian: cost matrix must be square");
    }
    for (double c : row) {
      if (!std::isfinite(c)) throw Error("hungarian: non-finite cost");
    }
  }

  // Potentials method over a (n+1) x (n+1) one-indexed frame.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) {
      row_to_col[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  if (total_cost) *total_cost = total;
  return row_to_col;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionError("adjusted_rand_index: size mismatch");
  if (a.empty()) throw EmptySetError("adjusted_rand_index: empty labelings");
  const double n = static_cast<double>(a.size());

  std::unordered_map<long long, double> cont;
  std::unordered_map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cont[(static_cast<long long>(a[i]) << 32) ^ static_cast<unsigned int>(b[i])] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [k, c] : cont) sum_ij += comb2(c);
  for (const auto& [k, c] : ra) sum_a += comb2(c);
  for (const auto& [k, c] : rb) sum_b += comb2(c);
  const double total = comb2(n);
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_ij - expected) / (max_index - expected);
}

namespace {

double point_dist(const Point3& p, const Point3& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<double> directed_min_dists(const std::vector<Point3>& a,
                                       const std::vector<Point3>& b) {
  if (a.empty() || b.empty()) throw EmptySetError("hausdorff: empty point set");
  std::vector<double> mins(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = kInf;
    for (const Point3& q : b) best = std::min(best, point_dist(a[i], q));
    mins[i] = best;
  }
  return mins;
}

}  // namespace

double directed_hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  const auto mins = directed_min_dists(a, b);
  return *std::max_element(mins.begin(), mins.end());
}

double hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double average_hausdorff(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  const auto ab = directed_min_dists(a, b);
  const auto ba = directed_min_dists(b, a);
  double sa = 0.0, sb = 0.0;
  for (double d : ab) sa += d;
  for (double d : ba) sb += d;
  return 0.5 * (sa / ab.size() + sb / ba.size());
}

double hausdorff95(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  return std::max(percentile95_nearest_rank(directed_min_dists(a, b)),
                  percentile95_nearest_rank(directed_min_dists(b, a)));
}

std::vector<double> squared_edt(const Mask& mask, std::uint16_t label) {
  const std::int64_t nx = mask.nx, ny = mask.ny, nz = mask.nz;
  std::vector<double> d(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    d[i] = mask.data[i] == label ? 0.0 : kInf;
  }
  const int max_n = static_cast<int>(std::max({nx, ny, nz}));
  std::vector<int> v(max_n);
  std::vector<double> z(max_n + 1), f(max_n), out(max_n);

  // Along x.
  for (std::int64_t zz = 0; zz < nz; ++zz) {
    for (std::int64_t y = 0; y < ny; ++y) {
      double* rowp = &d[(zz * ny + y) * nx];
      dt_1d(rowp, out.data(), static_cast<int>(nx), v, z);
      std::copy(out.begin(), out.begin() + nx, rowp);
    }
  }
  // Along y.
  for (std::int64_t zz = 0; zz < nz; ++zz) {
    for (std::int64_t x = 0; x < nx; ++x) {
      for (std::int64_t y = 0; y < ny; ++y) f[y] = d[(zz * ny + y) * nx + x];
      dt_1d(f.data(), out.data(), static_cast<int>(ny), v, z);
      for (std::int64_t y = 0; y < ny; ++y) d[(zz * ny + y) * nx + x] = out[y];
    }
  }
  // Along z.
  for (std::int64_t y = 0; y < ny; ++y) {
    for (std::int64_t x = 0; x < nx; ++x) {
      for (std::int64_t zz = 0; zz < nz; ++zz) f[zz] = d[(zz * ny + y) * nx + x];
      dt_1d(f.data(), out.data(), static_cast<int>(nz), v, z);
      for (std::int64_t zz = 0; zz < nz; ++zz) d[(zz * ny + y) * nx + x] = out[zz];
    }
  }
  return d;
}

MaskDistances mask_hausdorff(const Mask& pred, std::uint16_t pred_label, const Mask& gt,
                             std::uint16_t gt_label) {
  require_same_dims(pred, gt, "mask_hausdorff");
  std::int64_t npred = 0, ngt = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    npred += pred.data[i] == pred_label;
    ngt += gt.data[i] == gt_label;
  }
  MaskDistances md;
  if (npred == 0 && ngt == 0) return md;  // vacuous match: all zeros
  if (npred == 0 || ngt == 0) {
    md.hausdorff = md.average = md.percentile95 = kInf;
    return md;
  }

  const std::vector<double> edt_gt = squared_edt(gt, gt_label);
  const std::vector<double> edt_pred = squared_edt(pred, pred_label);
  std::vector<double> dp, dg;
  dp.reserve(npred);
  dg.reserve(ngt);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    if (pred.data[i] == pred_label) dp.push_back(std::sqrt(edt_gt[i]));
    if (gt.data[i] == gt_label) dg.push_back(std::sqrt(edt_pred[i]));
  }
  double sp = 0.0, sg = 0.0;
  for (double e : dp) sp += e;
  for (double e : dg) sg += e;
  md.hausdorff = std::max(*std::max_element(dp.begin(), dp.end()),
                          *std::max_element(dg.begin(), dg.end()));
  md.average = 0.5 * (sp / dp.size() + sg / dg.size());
  md.percentile95 = std::max(percentile95_nearest_rank(dp),
                             percentile95_nearest_rank(dg));
  return md;
}

LevelReport evaluate_level(const Mask& pred, int n_clusters, const Mask& gt, int n_classes,
                           int level, bool with_hausdorff) {
  require_same_dims(pred, gt, "evaluate_level");
  if (n_clusters < 1 || n_classes < 1) throw Error("evaluate_level: empty label spaces");

  // Contingency counts in one pass.
  std::vector<std::int64_t> inter(n_clusters * n_classes, 0);
  std::vector<std::int64_t> csize(n_clusters, 0), gsize(n_classes, 0);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const int c = pred.data[i];
    const int g = gt.data[i];
    if (c >= n_clusters) throw Error("evaluate_level: cluster id out of range");
    if (g >= n_classes) throw Error("evaluate_level: class id out of range");
    ++inter[c * n_classes + g];
    ++csize[c];
    ++gsize[g];
  }
  auto pair_dice = [&](int c, int g) {
    const std::int64_t denom = csize[c] + gsize[g];
    if (denom == 0) return 1.0;
    return 2.0 * static_cast<double>(inter[c * n_classes + g]) /
           static_cast<double>(denom);
  };

  // Square cost with dummy padding (dummy pairs have DICE 0 -> cost 1).
  const int m = std::max(n_clusters, n_classes);
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 1.0));
  for (int c = 0; c < n_clusters; ++c) {
    for (int g = 0; g < n_classes; ++g) cost[c][g] = 1.0 - pair_dice(c, g);
  }
  const std::vector<int> match = hungarian(cost);

  LevelReport rep;
  rep.level = level;
  rep.n_classes = n_classes;
  rep.n_clusters = n_clusters;
  rep.cluster_to_class.assign(n_clusters, -1);
  rep.class_dice.assign(n_classes, 0.0);
  rep.class_hausdorff95.assign(n_classes, kInf);

  for (int c = 0; c < n_clusters; ++c) {
    const int g = match[c];
    if (g < n_classes) {
      rep.cluster_to_class[c] = g;
      rep.class_dice[g] = pair_dice(c, g);
      if (with_hausdorff) {
        rep.class_hausdorff95[g] =
            mask_hausdorff(pred, static_cast<std::uint16_t>(c), gt,
                           static_cast<std::uint16_t>(g))
                .percentile95;
      }
    }
  }
  double acc = 0.0, acc_fg = 0.0;
  for (int g = 0; g < n_classes; ++g) {
    acc += rep.class_dice[g];
    if (g >= 1) acc_fg += rep.class_dice[g];
  }
  rep.avg_class_dice = acc / n_classes;
  rep.avg_class_dice_fg = n_classes > 1 ? acc_fg / (n_classes - 1) : 0.0;
  return rep;
}

Report evaluate_levels(const Mask& pred, int n_clusters, const std::vector<Mask>& gt_levels,
                       const std::vector<int>& n_classes_per_level, bool with_hausdorff) {
  if (gt_levels.size() != n_classes_per_level.size()) {
    throw DimensionError("evaluate_levels: level count mismatch");
  }
  Report rep;
  for (std::size_t l = 0; l < gt_levels.size(); ++l) {
    rep.levels.push_back(evaluate_level(pred, n_clusters, gt_levels[l],
                                        n_classes_per_level[l], static_cast<int>(l) + 1,
                                        with_hausdorff));
  }
  return rep;
}

Mask apply_matching(const Mask& pred, const std::vector<int>& cluster_to_class) {
  Mask out(pred.nx, pred.ny, pred.nz);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const int c = pred.data[i];
    const int g = c < static_cast<int>(cluster_to_class.size()) ? cluster_to_class[c] : -1;
    out.data[i] = g > 0 ? static_cast<std::uint16_t>(g) : 0;
  }
  return out;
}

std::string Report::to_json(int indent) const {
  nlohmann::json root;
  root["levels"] = nlohmann::json::array();
  for (const LevelReport& lr : levels) {
    nlohmann::json jl;
    jl["level"] = lr.level;
    jl["n_classes"] = lr.n_classes;
    jl["n_clusters"] = lr.n_clusters;
    jl["cluster_to_class"] = lr.cluster_to_class;
    jl["class_dice"] = lr.class_dice;
    jl["avg_class_dice"] = lr.avg_class_dice;
    jl["avg_class_dice_fg"] = lr.avg_class_dice_fg;
    nlohmann::json h = nlohmann::json::array();
    for (double v : lr.class_hausdorff95) {
      if (std::isfinite(v)) {
        h.push_back(v);
      } else {
        h.push_back(nullptr);
      }
    }
    jl["class_hausdorff95"] = h;
    root["levels"].push_back(jl);
  }
  return root.dump(indent);
}

}  // namespace hyperseg::metrics
