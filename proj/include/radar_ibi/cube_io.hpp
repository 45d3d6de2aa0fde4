#pragma once

// On-disk radar cube: a single-line JSON header terminated by '\n', then the
// samples as little-endian float32 (re, im) pairs in slow-time, range,
// channel order. The header carries an FNV-1a 64 digest of the payload
// bytes; readers verify it when present.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/radar_cube.hpp"

namespace radar_ibi {

inline constexpr int kCubeSchemaVersion = 1;

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create " + tmp.string());
    body(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at " + path.string());
  }
}

inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  atomic_write(path, [&](std::ostream& out) { out << text; });
}

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

/// FNV-1a, 64 bit. Each byte step is a bijection of the state, so any
/// single-byte change alters the digest.
class Fnv1a64 {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[15 - i] = digits[(state_ >> (4 * i)) & 0xf];
    return s;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::vector<std::uint32_t> encode_payload(const RadarCube& cube) {
  const auto data = cube.data();
  std::vector<std::uint32_t> buf;
  buf.reserve(2 * data.size());
  for (const auto& v : data) {
    buf.push_back(to_little_endian(std::bit_cast<std::uint32_t>(v.real())));
    buf.push_back(to_little_endian(std::bit_cast<std::uint32_t>(v.imag())));
  }
  return buf;
}

inline nlohmann::json cube_header(const RadarCube& cube) {
  return {{"schema_version", kCubeSchemaVersion},
          {"n_t", cube.n_time()},
          {"n_range", cube.n_range()},
          {"n_virtual", cube.n_channels()},
          {"n_tx", cube.n_tx()},
          {"n_rx", cube.n_rx()},
          {"wavelength_m", cube.wavelength()},
          {"slow_time_fs_hz", cube.slow_time_fs()},
          {"range_axis_m", cube.range_axis()},
          {"duration_s", cube.duration()}};
}

}  // namespace detail

inline void write_radar_cube(const std::filesystem::path& path, const RadarCube& cube) {
  cube.validate();
  const auto payload = detail::encode_payload(cube);
  detail::Fnv1a64 digest;
  digest.update(payload.data(), payload.size() * 4);
  auto h = detail::cube_header(cube);
  h["payload_fnv1a64"] = digest.hex();
  const std::string header = h.dump() + "\n";
  atomic_write(path, [&](std::ostream& out) {
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size() * 4));
  });
}

inline RadarCube read_radar_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataIntegrity("cannot open radar cube " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataIntegrity(path.string() + ": missing header line");

  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataIntegrity(path.string() + ": header is not valid JSON (" + e.what() + ")");
  }
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!h.is_object() || !h.contains(key)) throw DataIntegrity(path.string() + ": header lacks '" + key + "'");
    return h.at(key);
  };

  std::size_t n_t = 0, n_range = 0, n_virtual = 0, n_tx = 0, n_rx = 0;
  double wavelength = 0.0, fs = 0.0;
  std::vector<double> range_axis;
  try {
    const int version = field("schema_version").get<int>();
    if (version != kCubeSchemaVersion)
      throw DataIntegrity(path.string() + ": unsupported schema_version " + std::to_string(version));
    n_t = field("n_t").get<std::size_t>();
    n_range = field("n_range").get<std::size_t>();
    n_virtual = field("n_virtual").get<std::size_t>();
    n_tx = field("n_tx").get<std::size_t>();
    n_rx = field("n_rx").get<std::size_t>();
    wavelength = field("wavelength_m").get<double>();
    fs = field("slow_time_fs_hz").get<double>();
    range_axis = field("range_axis_m").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataIntegrity(path.string() + ": malformed header field (" + e.what() + ")");
  }
  if (n_virtual != n_tx * n_rx)
    throw DataIntegrity(path.string() + ": header declares n_virtual = " + std::to_string(n_virtual) +
                        " but n_tx * n_rx = " + std::to_string(n_tx * n_rx));
  if (range_axis.size() != n_range)
    throw DataIntegrity(path.string() + ": range axis has " + std::to_string(range_axis.size()) +
                        " entries, header declares " + std::to_string(n_range));

  const auto payload_start = static_cast<std::uintmax_t>(in.tellg());
  const auto file_size = std::filesystem::file_size(path);
  const std::uintmax_t actual = file_size - payload_start;
  const std::uintmax_t expected = std::uintmax_t{8} * n_t * n_range * n_virtual;
  if (actual != expected)
    throw DataIntegrity(path.string() + ": payload size mismatch, expected " + std::to_string(expected) +
                        " bytes, found " + std::to_string(actual));

  RadarCube cube;
  try {
    cube = RadarCube(n_t, std::move(range_axis), n_tx, n_rx, fs, wavelength);
  } catch (const InvalidArgument& e) {
    throw DataIntegrity(path.string() + ": invalid header (" + e.what() + ")");
  }
  std::vector<std::uint32_t> raw(2 * cube.data().size());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (static_cast<std::uintmax_t>(in.gcount()) != expected)
    throw DataIntegrity(path.string() + ": payload truncated while reading");
  if (h.contains("payload_fnv1a64")) {
    detail::Fnv1a64 digest;
    digest.update(raw.data(), raw.size() * 4);
    const auto declared = h.at("payload_fnv1a64").is_string() ? h.at("payload_fnv1a64").get<std::string>() : "";
    if (declared != digest.hex())
      throw DataIntegrity(path.string() + ": payload digest " + digest.hex() + " does not match header " + declared);
  }
  auto data = cube.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float re = std::bit_cast<float>(detail::to_little_endian(raw[2 * i]));
    const float im = std::bit_cast<float>(detail::to_little_endian(raw[2 * i + 1]));
    data[i] = cfloat(re, im);
  }
  return cube;
}

}  // namespace radar_ibi
