#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hyperseg/errors.hpp"
#include "hyperseg/volume.hpp"

namespace hyperseg::synthgen {

enum class ShapeKind { kSphere, kCuboid };

// One placed object; `size` is the radius for spheres and the half-side for
// cuboids (so a cuboid's full side is 2 * size).
struct ShapeInstance {
  int level = 1;  // 1..3
  ShapeKind kind = ShapeKind::kSphere;
  std::array<double, 3> center{0, 0, 0};
  double size = 0.0;
  double intensity = 0.0;       // base value, standard normal
  std::uint64_t texture_seed = 0;
  int parent = -1;              // index into the instance list, -1 at level 1
};

struct SynthConfig {
  std::int64_t volume_edge = 50;
  int n_volumes = 120;
  std::array<int, 3> split{80, 20, 20};  // train / val / test, by index

  double level1_radius_mean = 25.0, level1_radius_std = 1.0;
  double level2_sphere_radius_mean = 8.0, level2_sphere_radius_std = 0.5;
  double level2_cuboid_half_mean = 8.0, level2_cuboid_half_std = 0.5;
  double level3_sphere_radius_mean = 2.0, level3_sphere_radius_std = 0.2;
  double level3_cuboid_half_mean = 3.0, level3_cuboid_half_std = 0.15;

  int n_level2_spheres = 2;
  int n_level2_cuboids = 2;
  int n_level3_per_parent = 2;

  double pink_noise_mag = 0.25;
  double texture_amplitude = 0.15;

  bool irregular = false;
  double warp_amplitude = 2.0;  // voxels
  int warp_grid = 4;            // control points per axis (4^3 = 64 total)

  int max_place_tries = 2000;
  // A greedy sibling arrangement can dead-end (an early object blocking the
  // rest); when that happens the whole level is re-rolled up to this many
  // times before objects are dropped with a warning.
  int max_level_restarts = 25;
  // Exact-shape separation between siblings; anything above sqrt(3) keeps two
  // different objects out of any single trilinear interpolation cell, which
  // the irregular variant's label warping relies on.
  double sibling_margin = 1.75;
  std::uint64_t seed = 0;
};

// Label classes: level 1 {0 bg, 1 outer sphere}; levels 2 and 3
// {0 bg, 1 sphere kind, 2 cuboid kind}.
struct LabeledVolume {
  Volume intensities;
  std::array<Mask, 3> labels;
  std::vector<ShapeInstance> instances;
  std::vector<std::string> warnings;  // dropped placements etc.
};

// Zero-mean field whose radially averaged power spectrum falls off as 1/f,
// normalized to unit standard deviation and scaled by `magnitude`.
Volume pink_noise(std::int64_t nx, std::int64_t ny, std::int64_t nz, double magnitude,
                  std::uint64_t seed);

// One hierarchical volume: textured outer sphere, nested level-2 and level-3
// objects, plus background noise. Deterministic in `seed`.
LabeledVolume generate_volume(const SynthConfig& cfg, std::uint64_t seed);

// Irregular variant: a smooth random displacement field perturbs the
// boundaries of the three largest shapes; intensities and all label levels
// move together, and voxels away from those shapes are untouched.
LabeledVolume irregularize(const LabeledVolume& vol, const SynthConfig& cfg,
                           std::uint64_t seed);

// Number of ground-truth classes (background included) per level.
std::array<int, 3> classes_per_level();

// Writes `n_volumes` volumes plus label masks and a JSON manifest into
// `out_dir` (created if needed); returns the manifest path.
std::string generate_dataset(const SynthConfig& cfg, const std::string& out_dir);

// Manifest access for downstream commands.
struct DatasetEntry {
  int id = 0;
  std::uint64_t seed = 0;
  std::string split;  // "train" | "val" | "test"
  std::string volume_path;
  std::array<std::string, 3> label_paths;
};

struct DatasetIndex {
  std::int64_t volume_edge = 0;
  bool irregular = false;
  std::vector<DatasetEntry> entries;

  std::vector<DatasetEntry> with_split(const std::string& split) const;
};

DatasetIndex read_manifest(const std::string& manifest_path);

}  // namespace hyperseg::synthgen
