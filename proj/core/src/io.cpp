#include "hyperseg/io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <limits>

namespace hyperseg::io {

namespace {

// --- little-endian encoding helpers -----------------------------------------

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

// --- cursor over a loaded file with offset-carrying errors ------------------

class Reader {
 public:
  Reader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }
  bool exhausted() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw ParseError(path_ + ": truncated while reading " + std::string(what), pos_);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) {
      v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_magic(const char* magic) {
    const std::size_t at = pos_;
    const std::string got = str(4, "magic");
    if (got != magic) {
      throw ParseError(path_ + ": bad magic, expected \"" + magic + "\"", at);
    }
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(path_ + ": " + msg, pos_); }

 private:
  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

std::string vox_header(std::uint32_t nx, std::uint32_t ny, std::uint32_t nz, VoxDtype dtype) {
  std::string out;
  out += "VOX1";
  put_u32(out, 1);
  put_u32(out, nx);
  put_u32(out, ny);
  put_u32(out, nz);
  out.push_back(static_cast<char>(dtype));
  out.append(3, '\0');
  return out;
}

struct VoxHeader {
  std::uint32_t nx, ny, nz;
  VoxDtype dtype;
};

VoxHeader read_vox_header(Reader& r) {
  r.expect_magic("VOX1");
  const std::uint32_t version = r.u32("version");
  if (version != 1) r.fail("unsupported VOX1 version " + std::to_string(version));
  VoxHeader h;
  h.nx = r.u32("nx");
  h.ny = r.u32("ny");
  h.nz = r.u32("nz");
  const std::uint8_t dt = r.u8("dtype");
  if (dt > 2) r.fail("unknown dtype code " + std::to_string(dt));
  h.dtype = static_cast<VoxDtype>(dt);
  for (int i = 0; i < 3; ++i) {
    if (r.u8("reserved") != 0) r.fail("reserved bytes must be zero");
  }
  return h;
}

}  // namespace

void write_volume(const std::string& path, const Volume& vol) {
  std::string out = vox_header(static_cast<std::uint32_t>(vol.nx),
                               static_cast<std::uint32_t>(vol.ny),
                               static_cast<std::uint32_t>(vol.nz), VoxDtype::kF32);
  out.reserve(out.size() + vol.data.size() * 4);
  for (float v : vol.data) put_f32(out, v);
  spill(path, out);
}

Volume read_volume(const std::string& path) {
  Reader r(slurp(path), path);
  const VoxHeader h = read_vox_header(r);
  if (h.dtype != VoxDtype::kF32) r.fail("expected f32 volume payload");
  Volume vol(h.nx, h.ny, h.nz);
  for (float& v : vol.data) v = r.f32("payload");
  if (!r.exhausted()) r.fail("trailing bytes after payload");
  return vol;
}

void write_mask(const std::string& path, const Mask& mask, VoxDtype dtype) {
  if (dtype != VoxDtype::kU16 && dtype != VoxDtype::kU8) {
    throw Error("write_mask: masks must be u16 or u8");
  }
  std::string out = vox_header(static_cast<std::uint32_t>(mask.nx),
                               static_cast<std::uint32_t>(mask.ny),
                               static_cast<std::uint32_t>(mask.nz), dtype);
  if (dtype == VoxDtype::kU16) {
    for (std::uint16_t v : mask.data) put_u16(out, v);
  } else {
    for (std::uint16_t v : mask.data) {
      if (v > 0xff) throw Error("write_mask: label does not fit in u8");
      out.push_back(static_cast<char>(v));
    }
  }
  spill(path, out);
}

Mask read_mask(const std::string& path) {
  Reader r(slurp(path), path);
  const VoxHeader h = read_vox_header(r);
  if (h.dtype == VoxDtype::kF32) r.fail("expected integer mask payload");
  Mask mask(h.nx, h.ny, h.nz);
  for (std::uint16_t& v : mask.data) {
    v = h.dtype == VoxDtype::kU16 ? r.u16("payload") : r.u8("payload");
  }
  if (!r.exhausted()) r.fail("trailing bytes after payload");
  return mask;
}

VoxDtype peek_dtype(const std::string& path) {
  Reader r(slurp(path), path);
  return read_vox_header(r).dtype;
}

namespace {

void put_named_tensor(std::string& out, const NamedTensor& t) {
  put_u32(out, static_cast<std::uint32_t>(t.name.size()));
  out += t.name;
  put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  std::size_t numel = 1;
  for (std::int64_t d : t.dims) {
    put_u32(out, static_cast<std::uint32_t>(d));
    numel *= static_cast<std::size_t>(d);
  }
  if (numel != t.data.size()) {
    throw Error("save_checkpoint: tensor \"" + t.name + "\" dims do not match data size");
  }
  for (float v : t.data) put_f32(out, v);
}

NamedTensor get_named_tensor(Reader& r) {
  NamedTensor t;
  const std::uint32_t name_len = r.u32("tensor name length");
  t.name = r.str(name_len, "tensor name");
  const std::uint32_t rank = r.u32("tensor rank");
  std::size_t numel = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = r.u32("tensor dim");
    t.dims.push_back(d);
    numel *= d;
  }
  t.data.resize(numel);
  for (float& v : t.data) v = r.f32("tensor data");
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::string out;
  out += "HVC1";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(ckpt.config_json.size()));
  out += ckpt.config_json;
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const NamedTensor& t : ckpt.params) put_named_tensor(out, t);
  put_u32(out, static_cast<std::uint32_t>(ckpt.opt_state.size()));
  for (const NamedTensor& t : ckpt.opt_state) put_named_tensor(out, t);
  put_u64(out, ckpt.rng_seed);
  spill(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  Reader r(slurp(path), path);
  r.expect_magic("HVC1");
  const std::uint32_t version = r.u32("version");
  if (version != 1) r.fail("unsupported HVC1 version " + std::to_string(version));
  Checkpoint ckpt;
  const std::uint32_t cfg_len = r.u32("config length");
  ckpt.config_json = r.str(cfg_len, "config blob");
  const std::uint32_t n_params = r.u32("parameter count");
  for (std::uint32_t i = 0; i < n_params; ++i) ckpt.params.push_back(get_named_tensor(r));
  const std::uint32_t n_opt = r.u32("optimizer entry count");
  for (std::uint32_t i = 0; i < n_opt; ++i) ckpt.opt_state.push_back(get_named_tensor(r));
  ckpt.rng_seed = r.u64("rng seed");
  if (!r.exhausted()) r.fail("trailing bytes after checkpoint");
  return ckpt;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string line = text.substr(line_start, line_end - line_start);

    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);

    const auto trim = [](std::string s) {
      std::size_t b = 0, e = s.size();
      while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
      return s.substr(b, e - b);
    };

    const std::string stripped = trim(line);
    if (!stripped.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParseError("config line has no '='", line_start);
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("config line has an empty key", line_start);
      cfg[key] = value;
    }

    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return cfg;
}

ConfigMap load_config(const std::string& path) { return parse_config_text(slurp(path)); }

std::string serialize_config(const ConfigMap& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string config_get(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

double config_get_double(const ConfigMap& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key \"" + key + "\" is not a number: " + it->second, 0);
  }
}

std::int64_t config_get_int(const ConfigMap& cfg, const std::string& key,
                            std::int64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key \"" + key + "\" is not an integer: " + it->second, 0);
  }
}

bool config_get_bool(const ConfigMap& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("config key \"" + key + "\" is not a boolean: " + v, 0);
}

std::string read_text_file(const std::string& path) { return slurp(path); }

void write_text_file(const std::string& path, const std::string& content) {
  spill(path, content);
}

}  // namespace hyperseg::io
