#pragma once

#include <cstdint>
#include <vector>

#include "hyperseg/errors.hpp"

namespace hyperseg {

// Dense scalar volume, x-fastest storage: index = (z * ny + y) * nx + x.
struct Volume {
  std::int64_t nx = 0, ny = 0, nz = 0;
  std::vector<float> data;

  Volume() = default;
  Volume(std::int64_t nx_, std::int64_t ny_, std::int64_t nz_, float fill = 0.0f)
      : nx(nx_), ny(ny_), nz(nz_), data(static_cast<std::size_t>(nx_ * ny_ * nz_), fill) {}

  std::int64_t numel() const { return nx * ny * nz; }
  std::int64_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return (z * ny + y) * nx + x;
  }
  float& at(std::int64_t x, std::int64_t y, std::int64_t z) { return data[index(x, y, z)]; }
  float at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[index(x, y, z)];
  }
};

// Label volume with the same layout.
struct Mask {
  std::int64_t nx = 0, ny = 0, nz = 0;
  std::vector<std::uint16_t> data;

  Mask() = default;
  Mask(std::int64_t nx_, std::int64_t ny_, std::int64_t nz_, std::uint16_t fill = 0)
      : nx(nx_), ny(ny_), nz(nz_), data(static_cast<std::size_t>(nx_ * ny_ * nz_), fill) {}

  std::int64_t numel() const { return nx * ny * nz; }
  std::int64_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return (z * ny + y) * nx + x;
  }
  std::uint16_t& at(std::int64_t x, std::int64_t y, std::int64_t z) {
    return data[index(x, y, z)];
  }
  std::uint16_t at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[index(x, y, z)];
  }
};

inline bool same_dims(const Mask& a, const Mask& b) {
  return a.nx == b.nx && a.ny == b.ny && a.nz == b.nz;
}

}  // namespace hyperseg
