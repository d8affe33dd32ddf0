#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <set>
#include <vector>

#include <doctest.h>

#include "hyperseg/errors.hpp"
#include "hyperseg/fft.hpp"
#include "hyperseg/io.hpp"
#include "hyperseg/synthgen.hpp"
#include "hyperseg/volume.hpp"

using namespace hyperseg;
namespace fs = std::filesystem;

namespace {

// Config for fast structural tests: no background noise.
synthgen::SynthConfig quiet_config() {
  synthgen::SynthConfig cfg;
  cfg.pink_noise_mag = 0.0;
  return cfg;
}

void check_nesting(const synthgen::LabeledVolume& vol) {
  for (std::size_t i = 0; i < vol.labels[0].data.size(); ++i) {
    if (vol.labels[2].data[i] != 0) REQUIRE(vol.labels[1].data[i] != 0);
    if (vol.labels[1].data[i] != 0) REQUIRE(vol.labels[0].data[i] != 0);
  }
}

}  // namespace

TEST_CASE("pink noise: magnitude, mean, and determinism") {
  const Volume zero = synthgen::pink_noise(20, 20, 20, 0.0, 5);
  for (float v : zero.data) CHECK(v == 0.0f);

  const Volume field = synthgen::pink_noise(50, 50, 50, 0.25, 5);
  double mean = 0.0;
  for (float v : field.data) mean += v;
  mean /= static_cast<double>(field.numel());
  double var = 0.0;
  for (float v : field.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(field.numel());
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(std::sqrt(var) - 0.25) / 0.25 < 0.02);

  const Volume again = synthgen::pink_noise(50, 50, 50, 0.25, 5);
  CHECK(again.data == field.data);
  const Volume other = synthgen::pink_noise(50, 50, 50, 0.25, 6);
  CHECK(other.data != field.data);

  CHECK_THROWS_AS(synthgen::pink_noise(8, 8, 8, -0.1, 0), Error);
}

TEST_CASE("pink noise: radially averaged power falls off like 1/f") {
  const std::size_t n = 64;
  const Volume field = synthgen::pink_noise(n, n, n, 1.0, 77);

  std::vector<std::complex<double>> buf(n * n * n);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = std::complex<double>(field.data[i], 0.0);
  }
  fft::fft_3d(buf, n, false);

  // Shell-average the power spectrum over integer frequency bins.
  std::vector<double> power(n, 0.0);
  std::vector<double> count(n, 0.0);
  for (std::size_t kz = 0; kz < n; ++kz) {
    const double fz = static_cast<double>(std::min(kz, n - kz));
    for (std::size_t ky = 0; ky < n; ++ky) {
      const double fy = static_cast<double>(std::min(ky, n - ky));
      for (std::size_t kx = 0; kx < n; ++kx) {
        const double fx = static_cast<double>(std::min(kx, n - kx));
        const double f = std::sqrt(fx * fx + fy * fy + fz * fz);
        const std::size_t bin = static_cast<std::size_t>(std::llround(f));
        if (bin < n) {
          power[bin] += std::norm(buf[(kz * n + ky) * n + kx]);
          count[bin] += 1.0;
        }
      }
    }
  }

  // Least-squares slope of log P against log f over mid frequencies.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t f = 2; f <= 20; ++f) {
    REQUIRE(count[f] > 0);
    const double lx = std::log(static_cast<double>(f));
    const double ly = std::log(power[f] / count[f]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope > -1.3);
  CHECK(slope < -0.7);
}

TEST_CASE("generate volume: determinism and hierarchy invariants") {
  const synthgen::SynthConfig cfg = quiet_config();
  const synthgen::LabeledVolume a = synthgen::generate_volume(cfg, 42);
  const synthgen::LabeledVolume b = synthgen::generate_volume(cfg, 42);

  CHECK(a.intensities.data == b.intensities.data);
  for (int level = 0; level < 3; ++level) CHECK(a.labels[level].data == b.labels[level].data);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].center == b.instances[i].center);
    CHECK(a.instances[i].size == b.instances[i].size);
    CHECK(a.instances[i].texture_seed == b.instances[i].texture_seed);
  }

  const synthgen::LabeledVolume c = synthgen::generate_volume(cfg, 43);
  CHECK(c.intensities.data != a.intensities.data);

  // Voxel-exact nesting and label ranges.
  check_nesting(a);
  for (std::uint16_t v : a.labels[0].data) CHECK(v <= 1);
  for (std::uint16_t v : a.labels[1].data) CHECK(v <= 2);
  for (std::uint16_t v : a.labels[2].data) CHECK(v <= 2);

  // The outer sphere comes first and covers a plausible volume fraction.
  REQUIRE(!a.instances.empty());
  CHECK(a.instances[0].level == 1);
  CHECK(a.instances[0].kind == synthgen::ShapeKind::kSphere);
  std::int64_t l1_voxels = 0;
  for (std::uint16_t v : a.labels[0].data) l1_voxels += v != 0;
  const double r = a.instances[0].size;
  const double expect = 4.0 / 3.0 * 3.14159265358979 * r * r * r;
  CHECK(std::abs(static_cast<double>(l1_voxels) - expect) / expect < 0.05);

  // Distinct texture per instance.
  std::set<std::uint64_t> seeds;
  for (const auto& inst : a.instances) seeds.insert(inst.texture_seed);
  CHECK(seeds.size() == a.instances.size());

  // The default geometry is tight (two side-16 cuboids inside a radius-25
  // sphere), but nearly every seed should place the full hierarchy.
  int complete = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const synthgen::LabeledVolume v = synthgen::generate_volume(cfg, seed);
    if (v.warnings.empty()) {
      CHECK(v.instances.size() == 1 + 4 + 4 * 2);
      ++complete;
    }
  }
  CHECK(complete >= 9);
}

TEST_CASE("generate volume: level-1 radius statistics match the sampler") {
  const synthgen::SynthConfig cfg = quiet_config();
  double acc = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const synthgen::LabeledVolume vol =
        synthgen::generate_volume(cfg, 9000 + static_cast<std::uint64_t>(i));
    REQUIRE(vol.instances[0].level == 1);
    acc += vol.instances[0].size;
  }
  CHECK(std::abs(acc / n - 25.0) <= 0.3);
}

TEST_CASE("irregularize: identity at zero amplitude, locality, nesting") {
  synthgen::SynthConfig cfg = quiet_config();
  const synthgen::LabeledVolume vol = synthgen::generate_volume(cfg, 7);

  synthgen::SynthConfig still = cfg;
  still.warp_amplitude = 0.0;
  const synthgen::LabeledVolume same = synthgen::irregularize(vol, still, 3);
  CHECK(same.intensities.data == vol.intensities.data);
  for (int level = 0; level < 3; ++level) {
    CHECK(same.labels[level].data == vol.labels[level].data);
  }

  const synthgen::LabeledVolume warped = synthgen::irregularize(vol, cfg, 3);
  CHECK(warped.intensities.data != vol.intensities.data);
  check_nesting(warped);

  // Determinism.
  const synthgen::LabeledVolume warped2 = synthgen::irregularize(vol, cfg, 3);
  CHECK(warped2.intensities.data == warped.intensities.data);

  // Voxels well past the influence radius of the three largest shapes (the
  // outer sphere dominates) stay bit-identical.
  const auto& outer = vol.instances[0];
  const double keep_out = outer.size + std::ceil(cfg.warp_amplitude) + 3.0;
  std::int64_t checked = 0;
  const std::int64_t n = vol.intensities.nx;
  for (std::int64_t z = 0; z < n; ++z) {
    for (std::int64_t y = 0; y < n; ++y) {
      for (std::int64_t x = 0; x < n; ++x) {
        const double dx = x - outer.center[0], dy = y - outer.center[1],
                     dz = z - outer.center[2];
        if (std::sqrt(dx * dx + dy * dy + dz * dz) <= keep_out) continue;
        const std::int64_t i = vol.intensities.index(x, y, z);
        CHECK(warped.intensities.data[i] == vol.intensities.data[i]);
        CHECK(warped.labels[0].data[i] == vol.labels[0].data[i]);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("irregularize: intensities and labels move together") {
  synthgen::SynthConfig cfg = quiet_config();
  synthgen::LabeledVolume vol = synthgen::generate_volume(cfg, 11);

  // Replace intensities by the level-1 foreground indicator; after warping,
  // thresholding the intensities must reproduce the warped label mask.
  for (std::size_t i = 0; i < vol.intensities.data.size(); ++i) {
    vol.intensities.data[i] = vol.labels[0].data[i] != 0 ? 1.0f : 0.0f;
  }
  const synthgen::LabeledVolume warped = synthgen::irregularize(vol, cfg, 19);

  std::int64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < warped.intensities.data.size(); ++i) {
    const bool from_intensity = warped.intensities.data[i] > 0.5f;
    const bool from_label = warped.labels[0].data[i] != 0;
    inter += from_intensity && from_label;
    uni += from_intensity || from_label;
  }
  REQUIRE(uni > 0);
  CHECK(static_cast<double>(inter) / static_cast<double>(uni) > 0.99);
}

TEST_CASE("dataset generation: artifacts, manifest, splits") {
  synthgen::SynthConfig cfg = quiet_config();
  cfg.n_volumes = 6;
  cfg.split = {3, 2, 1};
  cfg.seed = 1234;

  const fs::path dir = fs::temp_directory_path() / "hyperseg_synth_test";
  fs::remove_all(dir);
  const std::string manifest_path = synthgen::generate_dataset(cfg, dir.string());
  CHECK(fs::exists(manifest_path));

  const synthgen::DatasetIndex idx = synthgen::read_manifest(manifest_path);
  CHECK(idx.volume_edge == 50);
  CHECK(!idx.irregular);
  REQUIRE(idx.entries.size() == 6);
  CHECK(idx.with_split("train").size() == 3);
  CHECK(idx.with_split("val").size() == 2);
  CHECK(idx.with_split("test").size() == 1);
  CHECK(idx.entries[0].split == "train");
  CHECK(idx.entries[3].split == "val");
  CHECK(idx.entries[5].split == "test");

  // Every referenced artifact exists, loads, and matches a regeneration.
  for (const auto& entry : idx.entries) {
    const Volume vol = io::read_volume(entry.volume_path);
    CHECK(vol.nx == 50);
    const synthgen::LabeledVolume regen = synthgen::generate_volume(cfg, entry.seed);
    CHECK(vol.data == regen.intensities.data);
    for (int level = 0; level < 3; ++level) {
      const Mask mask = io::read_mask(entry.label_paths[level]);
      CHECK(mask.data == regen.labels[level].data);
    }
  }

  // Split must account for every volume.
  synthgen::SynthConfig bad = cfg;
  bad.split = {3, 2, 2};
  CHECK_THROWS_AS(synthgen::generate_dataset(bad, dir.string()), Error);
  fs::remove_all(dir);
}
