#include "hyperseg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperseg::sampler {

namespace {

std::int64_t smallest_edge(const Dims& dims) {
  return std::min({dims[0], dims[1], dims[2]});
}

// Uniform corner position for a cube of the given edge on one axis of length
// n; assumes edge <= n.
std::int64_t place_lo(std::int64_t n, std::int64_t edge, Rng& rng) {
  return static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n - edge + 1)));
}

PatchSpec make_patch(std::int64_t lo_x, std::int64_t lo_y, std::int64_t lo_z,
                     std::int64_t edge) {
  PatchSpec p;
  p.edge = edge;
  p.center = {lo_x + edge / 2, lo_y + edge / 2, lo_z + edge / 2};
  return p;
}

double center_dist(const PatchSpec& a, const PatchSpec& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = static_cast<double>(a.center[i] - b.center[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

bool patch_inside(const PatchSpec& p, const Dims& dims) {
  for (int i = 0; i < 3; ++i) {
    if (p.lo(i) < 0 || p.hi(i) > dims[i]) return false;
  }
  return p.edge > 0;
}

bool patches_overlap(const PatchSpec& a, const PatchSpec& b) {
  for (int i = 0; i < 3; ++i) {
    if (a.hi(i) <= b.lo(i) || b.hi(i) <= a.lo(i)) return false;
  }
  return true;
}

bool patch_contains(const PatchSpec& outer, const PatchSpec& inner) {
  for (int i = 0; i < 3; ++i) {
    if (inner.lo(i) < outer.lo(i) || inner.hi(i) > outer.hi(i)) return false;
  }
  return true;
}

void validate(const SamplerConfig& cfg) {
  if (cfg.l_min < 1) throw Error("sampler: l_min must be positive");
  if (cfg.r_gap < 0) throw Error("sampler: r_gap must be non-negative");
  if (cfg.r_min < 1 || cfg.r_max < cfg.r_min) {
    throw Error("sampler: need 1 <= r_min <= r_max");
  }
  if (cfg.r_max <= cfg.l_min + cfg.r_gap) {
    throw Error("sampler: r_max must exceed l_min + r_gap or no anchor admits a child");
  }
  if (cfg.max_reject < 1) throw Error("sampler: max_reject must be >= 1");
  if (cfg.anchors_per_volume < 1) throw Error("sampler: anchors_per_volume must be >= 1");
  if (cfg.min_center_dist < 0.0) throw Error("sampler: min_center_dist must be >= 0");
}

PatchSpec sample_anchor(const Dims& dims, const SamplerConfig& cfg, Rng& rng) {
  validate(cfg);
  const std::int64_t vmin = smallest_edge(dims);
  if (vmin < cfg.r_min) {
    throw VolumeTooSmallError("sample_anchor: smallest volume edge " +
                              std::to_string(vmin) + " is below r_min = " +
                              std::to_string(cfg.r_min));
  }
  const std::int64_t r_eff = std::min<std::int64_t>(cfg.r_max, vmin);

  std::int64_t edge;
  if (cfg.scheme == Scheme::kUniform) {
    edge = cfg.r_min +
           static_cast<std::int64_t>(rng.uniform_int(
               static_cast<std::uint64_t>(r_eff - cfg.r_min + 1)));
  } else {
    const double lo = std::log(static_cast<double>(cfg.r_min));
    const double hi = std::log(static_cast<double>(r_eff));
    const double r = std::exp(rng.uniform(lo, hi));
    edge = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(r)),
                                    cfg.r_min, r_eff);
  }
  return make_patch(place_lo(dims[0], edge, rng), place_lo(dims[1], edge, rng),
                    place_lo(dims[2], edge, rng), edge);
}

PatchSpec sample_positive(const PatchSpec& anchor, const SamplerConfig& cfg, Rng& rng) {
  const std::int64_t upper = anchor.edge - cfg.r_gap;
  if (upper <= cfg.l_min) {
    throw ChildInfeasibleError("sample_positive: anchor edge " +
                               std::to_string(anchor.edge) +
                               " leaves no room for a child");
  }
  const std::int64_t edge =
      cfg.l_min + static_cast<std::int64_t>(
                      rng.uniform_int(static_cast<std::uint64_t>(upper - cfg.l_min + 1)));
  PatchSpec p;
  p.edge = edge;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t lo =
        anchor.lo(i) + static_cast<std::int64_t>(rng.uniform_int(
                           static_cast<std::uint64_t>(anchor.edge - edge + 1)));
    p.center[i] = lo + edge / 2;
  }
  return p;
}

PatchSpec sample_negative(const PatchSpec& anchor, std::int64_t child_edge,
                          const Dims& dims, const SamplerConfig& cfg, Rng& rng) {
  if (child_edge < 1 || child_edge > smallest_edge(dims)) {
    throw NegativeInfeasibleError("sample_negative: child edge does not fit the volume");
  }
  for (int attempt = 0; attempt < cfg.max_reject; ++attempt) {
    const PatchSpec candidate =
        make_patch(place_lo(dims[0], child_edge, rng), place_lo(dims[1], child_edge, rng),
                   place_lo(dims[2], child_edge, rng), child_edge);
    if (patches_overlap(candidate, anchor)) continue;
    if (center_dist(candidate, anchor) < cfg.min_center_dist) continue;
    return candidate;
  }
  throw NegativeInfeasibleError("sample_negative: no non-overlapping placement in " +
                                std::to_string(cfg.max_reject) + " tries");
}

Triplet sample_triplet(const Dims& dims, const SamplerConfig& cfg, Rng& rng) {
  for (int attempt = 0;; ++attempt) {
    const PatchSpec anchor = sample_anchor(dims, cfg, rng);
    try {
      Triplet t;
      t.anchor = anchor;
      t.positive = sample_positive(anchor, cfg, rng);
      t.negative = sample_negative(anchor, t.positive.edge, dims, cfg, rng);
      return t;
    } catch (const ChildInfeasibleError&) {
      if (attempt + 1 >= cfg.max_reject) throw;
    } catch (const NegativeInfeasibleError&) {
      if (attempt + 1 >= cfg.max_reject) throw;
    }
  }
}

}  // namespace hyperseg::sampler
