#pragma once

#include <array>
#include <cstdint>

#include "hyperseg/errors.hpp"
#include "hyperseg/rng.hpp"

namespace hyperseg::sampler {

enum class Scheme { kUniform, kLogUniform };

struct SamplerConfig {
  int r_min = 8;               // smallest anchor edge (voxels)
  int r_max = 45;              // largest anchor edge (voxels)
  int l_min = 5;               // smallest child edge (voxels)
  int r_gap = 5;               // required edge gap between anchor and child
  Scheme scheme = Scheme::kUniform;
  int anchors_per_volume = 32;
  int max_reject = 100;        // rejection cap for negative placement
  double min_center_dist = 0.0;  // extra separation between negative and anchor
};

// Axis-aligned cubic patch: occupies [lo(), lo() + edge) on each axis, with
// lo = center - edge / 2 (integer halving).
struct PatchSpec {
  std::array<std::int64_t, 3> center{0, 0, 0};
  std::int64_t edge = 0;

  std::int64_t lo(int axis) const { return center[axis] - edge / 2; }
  std::int64_t hi(int axis) const { return lo(axis) + edge; }  // exclusive
};

using Dims = std::array<std::int64_t, 3>;

// True when the patch cube lies fully inside [0, dims) on every axis.
bool patch_inside(const PatchSpec& p, const Dims& dims);

// True when the two cubes share at least one voxel.
bool patches_overlap(const PatchSpec& a, const PatchSpec& b);

// True when the inner cube lies fully within the outer cube.
bool patch_contains(const PatchSpec& outer, const PatchSpec& inner);

// Validates config-level invariants that do not depend on a volume; throws
// Error when violated. The child-patch machinery additionally needs
// r_max > l_min + r_gap so that positives are feasible for some anchors.
void validate(const SamplerConfig& cfg);

// Anchor patch: edge drawn uniformly (or log-uniformly) on [r_min, r_eff]
// where r_eff caps r_max at the smallest volume edge; center placed uniformly
// among positions where the patch fits.
PatchSpec sample_anchor(const Dims& dims, const SamplerConfig& cfg, Rng& rng);

// Positive child: edge ~ Uniform{l_min, ..., anchor.edge - r_gap}, placed
// uniformly inside the anchor. Throws ChildInfeasibleError when
// anchor.edge - r_gap <= l_min (caller resamples the anchor).
PatchSpec sample_positive(const PatchSpec& anchor, const SamplerConfig& cfg, Rng& rng);

// Negative child: same edge as the positive, placed uniformly in the volume
// by rejection until it shares no voxel with the anchor (and its center is at
// least min_center_dist from the anchor's). Throws NegativeInfeasibleError
// after max_reject failed tries.
PatchSpec sample_negative(const PatchSpec& anchor, std::int64_t child_edge,
                          const Dims& dims, const SamplerConfig& cfg, Rng& rng);

struct Triplet {
  PatchSpec anchor;
  PatchSpec positive;
  PatchSpec negative;
};

// Full anchor/positive/negative draw; infeasible anchors are resampled (up to
// max_reject times) before the infeasibility error escapes.
Triplet sample_triplet(const Dims& dims, const SamplerConfig& cfg, Rng& rng);

}  // namespace hyperseg::sampler
