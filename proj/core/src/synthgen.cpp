#include "hyperseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "hyperseg/fft.hpp"
#include "hyperseg/io.hpp"
#include "hyperseg/metrics.hpp"
#include "hyperseg/rng.hpp"

namespace hyperseg::synthgen {

namespace fs = std::filesystem;

namespace {

struct Shape {
  ShapeKind kind;
  std::array<double, 3> c;
  double size;  // radius or half-side
};

Shape as_shape(const ShapeInstance& inst) { return {inst.kind, inst.center, inst.size}; }

bool contains_point(const Shape& s, double x, double y, double z) {
  const double dx = x - s.c[0], dy = y - s.c[1], dz = z - s.c[2];
  if (s.kind == ShapeKind::kSphere) {
    return dx * dx + dy * dy + dz * dz <= s.size * s.size;
  }
  return std::abs(dx) <= s.size && std::abs(dy) <= s.size && std::abs(dz) <= s.size;
}

// Lower bound on the distance between the two point sets; any positive value
// certifies disjointness with that much clearance.
double shape_gap(const Shape& a, const Shape& b) {
  const double dx = std::abs(a.c[0] - b.c[0]);
  const double dy = std::abs(a.c[1] - b.c[1]);
  const double dz = std::abs(a.c[2] - b.c[2]);
  if (a.kind == ShapeKind::kSphere && b.kind == ShapeKind::kSphere) {
    return std::sqrt(dx * dx + dy * dy + dz * dz) - a.size - b.size;
  }
  if (a.kind == ShapeKind::kCuboid && b.kind == ShapeKind::kCuboid) {
    return std::max({dx, dy, dz}) - a.size - b.size;  // separating axis
  }
  const Shape& sph = a.kind == ShapeKind::kSphere ? a : b;
  const Shape& box = a.kind == ShapeKind::kSphere ? b : a;
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = std::max(0.0, std::abs(sph.c[i] - box.c[i]) - box.size);
    s += e * e;
  }
  return std::sqrt(s) - sph.size;
}

// Analytic containment that also certifies voxelized containment: every point
// of `inner` (hence every voxel center) lies inside `outer`.
bool shape_inside(const Shape& outer, const Shape& inner) {
  const double dx = std::abs(inner.c[0] - outer.c[0]);
  const double dy = std::abs(inner.c[1] - outer.c[1]);
  const double dz = std::abs(inner.c[2] - outer.c[2]);
  if (outer.kind == ShapeKind::kSphere) {
    if (inner.kind == ShapeKind::kSphere) {
      return std::sqrt(dx * dx + dy * dy + dz * dz) + inner.size <= outer.size;
    }
    const double ex = dx + inner.size, ey = dy + inner.size, ez = dz + inner.size;
    return std::sqrt(ex * ex + ey * ey + ez * ez) <= outer.size;  // farthest corner
  }
  // Cuboid outer.
  return dx + inner.size <= outer.size && dy + inner.size <= outer.size &&
         dz + inner.size <= outer.size;
}

// Band-limited value noise: a coarse lattice of uniform(-1, 1) values,
// trilinearly interpolated; one lattice per shape instance.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, std::int64_t volume_edge, double cell = 4.0)
      : cell_(cell), m_(static_cast<std::int64_t>(volume_edge / cell) + 2) {
    Rng rng(seed);
    values_.resize(m_ * m_ * m_);
    for (double& v : values_) v = rng.uniform(-1.0, 1.0);
  }

  double at(double x, double y, double z) const {
    return interp(x / cell_, y / cell_, z / cell_);
  }

 private:
  double grid(std::int64_t i, std::int64_t j, std::int64_t k) const {
    i = std::clamp<std::int64_t>(i, 0, m_ - 1);
    j = std::clamp<std::int64_t>(j, 0, m_ - 1);
    k = std::clamp<std::int64_t>(k, 0, m_ - 1);
    return values_[(k * m_ + j) * m_ + i];
  }
  double interp(double gx, double gy, double gz) const {
    const std::int64_t i = static_cast<std::int64_t>(std::floor(gx));
    const std::int64_t j = static_cast<std::int64_t>(std::floor(gy));
    const std::int64_t k = static_cast<std::int64_t>(std::floor(gz));
    const double fx = gx - i, fy = gy - j, fz = gz - k;
    double acc = 0.0;
    for (int dz = 0; dz < 2; ++dz) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
          acc += w * grid(i + dx, j + dy, k + dz);
        }
      }
    }
    return acc;
  }

  double cell_;
  std::int64_t m_;
  std::vector<double> values_;
};

double positive_normal(Rng& rng, double mean, double stddev) {
  for (;;) {
    const double v = rng.normal(mean, stddev);
    if (v > 0.1) return v;
  }
}

std::uint16_t kind_class(ShapeKind kind) { return kind == ShapeKind::kSphere ? 1 : 2; }

void paint(LabeledVolume& out, const ShapeInstance& inst, double texture_amplitude) {
  const std::int64_t n = out.intensities.nx;
  const Shape s = as_shape(inst);
  const ValueNoise tex(inst.texture_seed, n);
  const std::uint16_t cls = inst.level == 1 ? 1 : kind_class(inst.kind);
  Mask& label = out.labels[inst.level - 1];

  const auto lo = [&](double c) {
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(c - s.size - 1.0)));
  };
  const auto hi = [&](double c) {
    return std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::ceil(c + s.size + 1.0)));
  };
  for (std::int64_t z = lo(s.c[2]); z <= hi(s.c[2]); ++z) {
    for (std::int64_t y = lo(s.c[1]); y <= hi(s.c[1]); ++y) {
      for (std::int64_t x = lo(s.c[0]); x <= hi(s.c[0]); ++x) {
        if (!contains_point(s, static_cast<double>(x), static_cast<double>(y),
                            static_cast<double>(z))) {
          continue;
        }
        label.at(x, y, z) = cls;
        const double t = tex.at(static_cast<double>(x), static_cast<double>(y),
                                static_cast<double>(z));
        out.intensities.at(x, y, z) =
            static_cast<float>(inst.intensity * (1.0 + texture_amplitude * t));
      }
    }
  }
}

double analytic_volume(const ShapeInstance& inst) {
  if (inst.kind == ShapeKind::kSphere) {
    return 4.0 / 3.0 * 3.14159265358979323846 * inst.size * inst.size * inst.size;
  }
  const double side = 2.0 * inst.size;
  return side * side * side;
}

float sample_trilinear(const Volume& vol, double x, double y, double z) {
  const auto cl = [](double v, std::int64_t n) {
    return std::clamp(v, 0.0, static_cast<double>(n - 1));
  };
  x = cl(x, vol.nx);
  y = cl(y, vol.ny);
  z = cl(z, vol.nz);
  const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(x), vol.nx - 2 >= 0 ? vol.nx - 2 : 0);
  const std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(y), vol.ny - 2 >= 0 ? vol.ny - 2 : 0);
  const std::int64_t k = std::min<std::int64_t>(static_cast<std::int64_t>(z), vol.nz - 2 >= 0 ? vol.nz - 2 : 0);
  const double fx = x - i, fy = y - j, fz = z - k;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
        const std::int64_t xi = std::min(i + dx, vol.nx - 1);
        const std::int64_t yj = std::min(j + dy, vol.ny - 1);
        const std::int64_t zk = std::min(k + dz, vol.nz - 1);
        acc += w * vol.at(xi, yj, zk);
      }
    }
  }
  return static_cast<float>(acc);
}

// Majority label under the same trilinear weights; ties resolve toward the
// lowest class id, so background wins drawn votes.
std::uint16_t sample_label(const Mask& mask, double x, double y, double z, int n_classes) {
  const auto cl = [](double v, std::int64_t n) {
    return std::clamp(v, 0.0, static_cast<double>(n - 1));
  };
  x = cl(x, mask.nx);
  y = cl(y, mask.ny);
  z = cl(z, mask.nz);
  const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(x), mask.nx - 2 >= 0 ? mask.nx - 2 : 0);
  const std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(y), mask.ny - 2 >= 0 ? mask.ny - 2 : 0);
  const std::int64_t k = std::min<std::int64_t>(static_cast<std::int64_t>(z), mask.nz - 2 >= 0 ? mask.nz - 2 : 0);
  const double fx = x - i, fy = y - j, fz = z - k;
  double w_class[8] = {0};  // supports up to 8 classes per level
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
        const std::int64_t xi = std::min(i + dx, mask.nx - 1);
        const std::int64_t yj = std::min(j + dy, mask.ny - 1);
        const std::int64_t zk = std::min(k + dz, mask.nz - 1);
        const std::uint16_t c = mask.at(xi, yj, zk);
        if (c < 8) w_class[c] += w;
      }
    }
  }
  int best = 0;
  for (int c = 1; c < n_classes && c < 8; ++c) {
    if (w_class[c] > w_class[best]) best = c;
  }
  return static_cast<std::uint16_t>(best);
}

}  // namespace

Volume pink_noise(std::int64_t nx, std::int64_t ny, std::int64_t nz, double magnitude,
                  std::uint64_t seed) {
  if (magnitude < 0.0) throw Error("pink_noise: magnitude must be >= 0");
  Volume out(nx, ny, nz);
  if (magnitude == 0.0) return out;

  const std::size_t n = fft::next_pow2(static_cast<std::size_t>(std::max({nx, ny, nz})));
  std::vector<std::complex<double>> buf(n * n * n);
  Rng rng(seed);
  for (auto& v : buf) v = std::complex<double>(rng.normal(), 0.0);

  fft::fft_3d(buf, n, false);
  // Shape the spectrum: power ~ 1/f, i.e. amplitude ~ f^(-1/2); kill DC.
  for (std::size_t kz = 0; kz < n; ++kz) {
    const double fz = static_cast<double>(std::min(kz, n - kz));
    for (std::size_t ky = 0; ky < n; ++ky) {
      const double fy = static_cast<double>(std::min(ky, n - ky));
      for (std::size_t kx = 0; kx < n; ++kx) {
        const double fx = static_cast<double>(std::min(kx, n - kx));
        const double f = std::sqrt(fx * fx + fy * fy + fz * fz);
        buf[(kz * n + ky) * n + kx] *= f == 0.0 ? 0.0 : 1.0 / std::sqrt(f);
      }
    }
  }
  fft::fft_3d(buf, n, true);

  double mean = 0.0;
  for (std::int64_t z = 0; z < nz; ++z) {
    for (std::int64_t y = 0; y < ny; ++y) {
      for (std::int64_t x = 0; x < nx; ++x) {
        const double v = buf[(static_cast<std::size_t>(z) * n + y) * n + x].real();
        out.at(x, y, z) = static_cast<float>(v);
        mean += v;
      }
    }
  }
  mean /= static_cast<double>(out.numel());
  double var = 0.0;
  for (float& v : out.data) {
    const double d = v - mean;
    var += d * d;
  }
  var /= static_cast<double>(out.numel());
  const double scale = magnitude / std::sqrt(std::max(var, 1e-300));
  for (float& v : out.data) v = static_cast<float>((v - mean) * scale);
  return out;
}

LabeledVolume generate_volume(const SynthConfig& cfg, std::uint64_t seed) {
  const std::int64_t n = cfg.volume_edge;
  if (n < 10) throw Error("generate_volume: volume_edge must be at least 10");
  if (cfg.n_level2_spheres < 0 || cfg.n_level2_cuboids < 0 || cfg.n_level3_per_parent < 0) {
    throw Error("generate_volume: object counts must be non-negative");
  }

  LabeledVolume out;
  out.intensities = Volume(n, n, n);
  for (Mask& m : out.labels) m = Mask(n, n, n);

  Rng rng(seed);
  const double half = static_cast<double>(n - 1) / 2.0;
  std::uint64_t next_texture = 0;
  const auto texture_seed = [&] { return Rng::derive_seed(seed, 100 + next_texture++); };

  // Level 1: the outer sphere, centered up to whatever slack its radius leaves.
  {
    const double r1 = positive_normal(rng, cfg.level1_radius_mean, cfg.level1_radius_std);
    const double slack = std::max(0.0, half - r1);
    ShapeInstance inst;
    inst.level = 1;
    inst.kind = ShapeKind::kSphere;
    for (int i = 0; i < 3; ++i) inst.center[i] = half + rng.uniform(-slack, slack);
    inst.size = r1;
    inst.intensity = rng.normal();
    inst.texture_seed = texture_seed();
    out.instances.push_back(inst);
  }
  const Shape outer = as_shape(out.instances[0]);

  // Level 2: cuboids ("mitochondria") then spheres ("vesicles") inside the
  // outer sphere, mutually separated by the sibling margin. Cuboids go first:
  // their corner-containment constraint is the tight one, so they get the
  // empty sphere to work with. A greedy pass can still dead-end (the first
  // cuboid landing dead-center leaves no axis gap for the second), so an
  // incomplete arrangement is re-rolled from scratch before anything is
  // dropped.
  std::vector<int> level2_ids;
  const int n_level2 = cfg.n_level2_spheres + cfg.n_level2_cuboids;
  {
    std::vector<ShapeInstance> best;
    for (int round = 0; round < std::max(1, cfg.max_level_restarts); ++round) {
      std::vector<ShapeInstance> pass;
      for (int obj = 0; obj < n_level2; ++obj) {
        const ShapeKind kind =
            obj < cfg.n_level2_cuboids ? ShapeKind::kCuboid : ShapeKind::kSphere;
        for (int attempt = 0; attempt < cfg.max_place_tries; ++attempt) {
          const double size =
              kind == ShapeKind::kSphere
                  ? positive_normal(rng, cfg.level2_sphere_radius_mean,
                                    cfg.level2_sphere_radius_std)
                  : positive_normal(rng, cfg.level2_cuboid_half_mean,
                                    cfg.level2_cuboid_half_std);
          const double reach = outer.size - size;
          if (reach <= 0.0) continue;
          Shape cand{kind, {}, size};
          for (int i = 0; i < 3; ++i) cand.c[i] = outer.c[i] + rng.uniform(-reach, reach);
          if (!shape_inside(outer, cand)) continue;
          bool clear = true;
          for (const ShapeInstance& prev : pass) {
            if (shape_gap(as_shape(prev), cand) < cfg.sibling_margin) {
              clear = false;
              break;
            }
          }
          if (!clear) continue;

          ShapeInstance inst;
          inst.level = 2;
          inst.kind = kind;
          inst.center = cand.c;
          inst.size = size;
          inst.intensity = rng.normal();
          inst.texture_seed = texture_seed();
          inst.parent = 0;
          pass.push_back(inst);
          break;
        }
      }
      if (pass.size() > best.size()) best = std::move(pass);
      if (static_cast<int>(best.size()) == n_level2) break;
    }
    for (ShapeInstance& inst : best) {
      level2_ids.push_back(static_cast<int>(out.instances.size()));
      out.instances.push_back(inst);
    }
    for (int missing = static_cast<int>(best.size()); missing < n_level2; ++missing) {
      out.warnings.push_back("level-2 object dropped: no feasible placement");
    }
  }

  // Level 3: children of the same kind nested in each level-2 object, with
  // the same per-parent restart policy as level 2.
  std::vector<int> level3_ids;
  for (int parent_id : level2_ids) {
    const ShapeInstance& parent = out.instances[parent_id];
    const Shape parent_shape = as_shape(parent);
    std::vector<ShapeInstance> best;
    for (int round = 0; round < std::max(1, cfg.max_level_restarts); ++round) {
      std::vector<ShapeInstance> pass;
      for (int child = 0; child < cfg.n_level3_per_parent; ++child) {
        for (int attempt = 0; attempt < cfg.max_place_tries; ++attempt) {
          const double size =
              parent.kind == ShapeKind::kSphere
                  ? positive_normal(rng, cfg.level3_sphere_radius_mean,
                                    cfg.level3_sphere_radius_std)
                  : positive_normal(rng, cfg.level3_cuboid_half_mean,
                                    cfg.level3_cuboid_half_std);
          const double reach = parent_shape.size - size;
          if (reach <= 0.0) continue;
          Shape cand{parent.kind, {}, size};
          for (int i = 0; i < 3; ++i) cand.c[i] = parent_shape.c[i] + rng.uniform(-reach, reach);
          if (!shape_inside(parent_shape, cand)) continue;
          bool clear = true;
          for (int id : level3_ids) {
            if (shape_gap(as_shape(out.instances[id]), cand) < cfg.sibling_margin) {
              clear = false;
              break;
            }
          }
          for (const ShapeInstance& prev : pass) {
            if (!clear) break;
            if (shape_gap(as_shape(prev), cand) < cfg.sibling_margin) clear = false;
          }
          if (!clear) continue;

          ShapeInstance inst;
          inst.level = 3;
          inst.kind = parent.kind;
          inst.center = cand.c;
          inst.size = size;
          inst.intensity = rng.normal();
          inst.texture_seed = texture_seed();
          inst.parent = parent_id;
          pass.push_back(inst);
          break;
        }
      }
      if (pass.size() > best.size()) best = std::move(pass);
      if (static_cast<int>(best.size()) == cfg.n_level3_per_parent) break;
    }
    for (ShapeInstance& inst : best) {
      level3_ids.push_back(static_cast<int>(out.instances.size()));
      out.instances.push_back(inst);
    }
    for (int missing = static_cast<int>(best.size()); missing < cfg.n_level3_per_parent;
         ++missing) {
      out.warnings.push_back("level-3 child of object " + std::to_string(parent_id) +
                             " dropped: no feasible placement");
    }
  }

  // Deepest object wins the voxel: paint level by level.
  for (const ShapeInstance& inst : out.instances) {
    paint(out, inst, cfg.texture_amplitude);
  }

  if (cfg.pink_noise_mag > 0.0) {
    const Volume noise = pink_noise(n, n, n, cfg.pink_noise_mag, Rng::derive_seed(seed, 7));
    for (std::size_t i = 0; i < out.intensities.data.size(); ++i) {
      out.intensities.data[i] += noise.data[i];
    }
  }
  return out;
}

std::array<int, 3> classes_per_level() { return {2, 3, 3}; }

LabeledVolume irregularize(const LabeledVolume& vol, const SynthConfig& cfg,
                           std::uint64_t seed) {
  LabeledVolume out = vol;
  if (cfg.warp_amplitude == 0.0) return out;
  if (cfg.warp_grid < 2) throw Error("irregularize: warp_grid must be at least 2");
  const std::int64_t nx = vol.intensities.nx, ny = vol.intensities.ny,
                     nz = vol.intensities.nz;

  // The three largest shapes by analytic volume.
  std::vector<int> order(vol.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return analytic_volume(vol.instances[a]) > analytic_volume(vol.instances[b]);
  });
  order.resize(std::min<std::size_t>(order.size(), 3));
  if (order.empty()) return out;

  // Influence region: voxels within ceil(amplitude) + 1 of any of those shapes.
  Mask region(nx, ny, nz);
  for (int id : order) {
    const Shape s = as_shape(vol.instances[id]);
    for (std::int64_t z = 0; z < nz; ++z) {
      for (std::int64_t y = 0; y < ny; ++y) {
        for (std::int64_t x = 0; x < nx; ++x) {
          if (contains_point(s, static_cast<double>(x), static_cast<double>(y),
                             static_cast<double>(z))) {
            region.at(x, y, z) = 1;
          }
        }
      }
    }
  }
  const std::vector<double> edt = metrics::squared_edt(region, 1);
  const double reach = std::ceil(cfg.warp_amplitude) + 1.0;
  const double reach2 = reach * reach;

  // Smooth displacement: one coarse grid of Gaussian control values per axis.
  const int m = cfg.warp_grid;
  Rng rng(seed);
  std::array<std::vector<double>, 3> ctrl;
  for (auto& grid : ctrl) {
    grid.resize(static_cast<std::size_t>(m) * m * m);
    for (double& v : grid) v = cfg.warp_amplitude * rng.normal();
  }
  const auto displacement = [&](int axis, double x, double y, double z) {
    const double gx = x / static_cast<double>(nx - 1) * (m - 1);
    const double gy = y / static_cast<double>(ny - 1) * (m - 1);
    const double gz = z / static_cast<double>(nz - 1) * (m - 1);
    const int i = std::min(static_cast<int>(gx), m - 2);
    const int j = std::min(static_cast<int>(gy), m - 2);
    const int k = std::min(static_cast<int>(gz), m - 2);
    const double fx = gx - i, fy = gy - j, fz = gz - k;
    double acc = 0.0;
    for (int dz = 0; dz < 2; ++dz) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const double w =
              (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
          acc += w * ctrl[axis][(static_cast<std::size_t>(k + dz) * m + (j + dy)) * m +
                                (i + dx)];
        }
      }
    }
    return acc;
  };

  const std::array<int, 3> n_classes = classes_per_level();
  for (std::int64_t z = 0; z < nz; ++z) {
    for (std::int64_t y = 0; y < ny; ++y) {
      for (std::int64_t x = 0; x < nx; ++x) {
        if (edt[region.index(x, y, z)] > reach2) continue;  // untouched outside
        const double fx = static_cast<double>(x);
        const double fy = static_cast<double>(y);
        const double fz = static_cast<double>(z);
        const double sx = fx + displacement(0, fx, fy, fz);
        const double sy = fy + displacement(1, fx, fy, fz);
        const double sz = fz + displacement(2, fx, fy, fz);
        out.intensities.at(x, y, z) = sample_trilinear(vol.intensities, sx, sy, sz);
        for (int level = 0; level < 3; ++level) {
          out.labels[level].at(x, y, z) =
              sample_label(vol.labels[level], sx, sy, sz, n_classes[level]);
        }
      }
    }
  }
  return out;
}

namespace {

std::string pad4(int i) {
  std::string s = std::to_string(i);
  while (s.size() < 4) s.insert(s.begin(), '0');
  return s;
}

nlohmann::json instance_json(const ShapeInstance& inst) {
  nlohmann::json j;
  j["level"] = inst.level;
  j["kind"] = inst.kind == ShapeKind::kSphere ? "sphere" : "cuboid";
  j["center"] = {inst.center[0], inst.center[1], inst.center[2]};
  j["size"] = inst.size;
  j["intensity"] = inst.intensity;
  j["texture_seed"] = inst.texture_seed;
  j["parent"] = inst.parent;
  return j;
}

}  // namespace

std::string generate_dataset(const SynthConfig& cfg, const std::string& out_dir) {
  if (cfg.split[0] + cfg.split[1] + cfg.split[2] != cfg.n_volumes) {
    throw Error("generate_dataset: split must sum to n_volumes");
  }
  fs::create_directories(out_dir);

  nlohmann::json manifest;
  manifest["volume_edge"] = cfg.volume_edge;
  manifest["n_volumes"] = cfg.n_volumes;
  manifest["seed"] = cfg.seed;
  manifest["irregular"] = cfg.irregular;
  manifest["split"] = {{"train", cfg.split[0]}, {"val", cfg.split[1]}, {"test", cfg.split[2]}};
  manifest["volumes"] = nlohmann::json::array();

  for (int i = 0; i < cfg.n_volumes; ++i) {
    const std::uint64_t vseed = Rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    LabeledVolume vol = generate_volume(cfg, vseed);
    if (cfg.irregular) {
      vol = irregularize(vol, cfg, Rng::derive_seed(vseed, 0x1dd));
    }

    const std::string stem = "vol_" + pad4(i);
    const std::string vol_name = stem + ".vox";
    io::write_volume((fs::path(out_dir) / vol_name).string(), vol.intensities);
    std::array<std::string, 3> label_names;
    for (int level = 0; level < 3; ++level) {
      label_names[level] = stem + ".l" + std::to_string(level + 1) + ".vox";
      io::write_mask((fs::path(out_dir) / label_names[level]).string(), vol.labels[level],
                     io::VoxDtype::kU8);
    }

    const char* split = i < cfg.split[0]                  ? "train"
                        : i < cfg.split[0] + cfg.split[1] ? "val"
                                                          : "test";
    nlohmann::json entry;
    entry["id"] = i;
    entry["seed"] = vseed;
    entry["split"] = split;
    entry["volume"] = vol_name;
    entry["labels"] = {label_names[0], label_names[1], label_names[2]};
    entry["instances"] = nlohmann::json::array();
    for (const ShapeInstance& inst : vol.instances) {
      entry["instances"].push_back(instance_json(inst));
    }
    entry["warnings"] = vol.warnings;
    manifest["volumes"].push_back(entry);
  }

  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  io::write_text_file(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

std::vector<DatasetEntry> DatasetIndex::with_split(const std::string& split) const {
  std::vector<DatasetEntry> out;
  for (const DatasetEntry& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

DatasetIndex read_manifest(const std::string& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path + ": " + e.what(), e.byte);
  }
  const fs::path dir = fs::path(manifest_path).parent_path();

  DatasetIndex idx;
  idx.volume_edge = j.at("volume_edge").get<std::int64_t>();
  idx.irregular = j.value("irregular", false);
  for (const auto& entry : j.at("volumes")) {
    DatasetEntry e;
    e.id = entry.at("id").get<int>();
    e.seed = entry.at("seed").get<std::uint64_t>();
    e.split = entry.at("split").get<std::string>();
    e.volume_path = (dir / entry.at("volume").get<std::string>()).string();
    const auto& labels = entry.at("labels");
    for (int level = 0; level < 3; ++level) {
      e.label_paths[level] = (dir / labels.at(level).get<std::string>()).string();
    }
    idx.entries.push_back(std::move(e));
  }
  return idx;
}

}  // namespace hyperseg::synthgen
