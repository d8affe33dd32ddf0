#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hyperseg/errors.hpp"
#include "hyperseg/volume.hpp"

namespace hyperseg::io {

// ---------------------------------------------------------------------------
// VOX1 dense volume container.
//
// Layout (all integers little-endian):
//   magic "VOX1" | version u32 = 1 | nx, ny, nz u32 | dtype u8 | 3 zero bytes
//   | payload, x-fastest, nx*ny*nz elements of the dtype.
// ---------------------------------------------------------------------------

enum class VoxDtype : std::uint8_t { kF32 = 0, kU16 = 1, kU8 = 2 };

void write_volume(const std::string& path, const Volume& vol);
Volume read_volume(const std::string& path);  // requires dtype f32

// Masks serialize as u16 by default; u8 is accepted when all labels fit.
void write_mask(const std::string& path, const Mask& mask, VoxDtype dtype = VoxDtype::kU16);
Mask read_mask(const std::string& path);  // accepts u16 or u8

// Dtype of an existing VOX1 file without loading the payload.
VoxDtype peek_dtype(const std::string& path);

// ---------------------------------------------------------------------------
// HVC1 checkpoint container.
//
// Layout: magic "HVC1" | version u32 = 1 | config length u32 + UTF-8 JSON |
// parameter count u32 | per entry: name length u32 + name, rank u32, one u32
// per dim, f32 data | optimizer entries in the same scheme | rng seed u64.
// ---------------------------------------------------------------------------

struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> dims;
  std::vector<float> data;
};

struct Checkpoint {
  std::string config_json;
  std::vector<NamedTensor> params;
  std::vector<NamedTensor> opt_state;
  std::uint64_t rng_seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// ---------------------------------------------------------------------------
// Run configuration: UTF-8 text, one `key = value` per line, `#` comments.
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config(const std::string& path);
std::string serialize_config(const ConfigMap& cfg);

// Typed lookups; the default is returned when the key is absent, and a
// ParseError raised when the stored text does not parse as the type.
std::string config_get(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback);
double config_get_double(const ConfigMap& cfg, const std::string& key, double fallback);
std::int64_t config_get_int(const ConfigMap& cfg, const std::string& key,
                            std::int64_t fallback);
bool config_get_bool(const ConfigMap& cfg, const std::string& key, bool fallback);

// Small file helpers shared by the CLI and the dataset generator.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hyperseg::io
