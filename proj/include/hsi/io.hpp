#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsi/layout.hpp"
#include "hsi/volume.hpp"

// Container layout shared by .hsc (cubes) and .msk (filter layouts):
//   uint32 little-endian header length H | H bytes of UTF-8 JSON | payload
// .hsc payload: float32 little-endian, band-sequential (band, row, column).
// .msk payload: uint16 little-endian one-based band indices, row-major.

namespace hsi {

/// Metadata stored in the JSON header of a cube file.
struct VolumeHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  std::optional<std::vector<double>> wavelengths_nm;
  std::optional<double> x_max;
  /// Additional keys (for instance the subband map of a coefficient dump).
  nlohmann::json extra = nlohmann::json::object();
};

struct CubeFile {
  VolumeHeader header;
  HyperCube cube;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write to '" + path + "' failed");
}

inline std::string frame(const nlohmann::json& header) {
  const std::string text = header.dump();
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  return out;
}

struct Framed {
  nlohmann::json header;
  std::string_view payload;
};

inline Framed unframe(std::string_view bytes, std::string_view expected_format) {
  if (bytes.size() < 4) throw MalformedHeaderError("file shorter than the 4-byte header length");
  const std::uint32_t hlen = get_u32(bytes, 0);
  if (bytes.size() - 4 < hlen) throw MalformedHeaderError("header length exceeds file size");
  Framed f;
  try {
    f.header = nlohmann::json::parse(bytes.substr(4, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedHeaderError(std::string("header is not valid JSON: ") + e.what());
  }
  if (!f.header.is_object() || f.header.value("format", std::string()) != expected_format) {
    throw MalformedHeaderError("header is not a '" + std::string(expected_format) + "' header");
  }
  f.payload = bytes.substr(4 + hlen);
  return f;
}

inline std::size_t header_dim(const nlohmann::json& h, const char* key) {
  if (!h.contains(key) || !h[key].is_number_unsigned()) {
    throw MalformedHeaderError(std::string("header key '") + key + "' missing or not a non-negative integer");
  }
  const auto v = h[key].get<std::uint64_t>();
  if (v == 0) throw MalformedHeaderError(std::string("header key '") + key + "' must be >= 1");
  if (v > std::numeric_limits<std::size_t>::max()) throw DimensionOverflowError(std::string(key) + " overflows");
  return static_cast<std::size_t>(v);
}

inline std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw DimensionOverflowError("dimensions overflow the address space");
  return r;
}

}  // namespace detail

inline std::string encode_cube(const HyperCube& cube, const VolumeHeader& meta = {}) {
  nlohmann::json h = meta.extra.is_object() ? meta.extra : nlohmann::json::object();
  h["format"] = "hsc";
  h["version"] = 1;
  h["rows"] = cube.rows();
  h["cols"] = cube.cols();
  h["bands"] = cube.bands();
  h["dtype"] = "float32le";
  if (meta.wavelengths_nm) h["wavelengths_nm"] = *meta.wavelengths_nm;
  if (meta.x_max) h["x_max"] = *meta.x_max;
  std::string out = detail::frame(h);
  out.reserve(out.size() + 4 * cube.size());
  for (double v : cube.values()) detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

inline CubeFile decode_cube(std::string_view bytes) {
  const detail::Framed f = detail::unframe(bytes, "hsc");
  if (f.header.value("dtype", std::string()) != "float32le") {
    throw MalformedHeaderError("unsupported dtype (expected float32le)");
  }
  CubeFile out;
  VolumeHeader& h = out.header;
  h.rows = detail::header_dim(f.header, "rows");
  h.cols = detail::header_dim(f.header, "cols");
  h.bands = detail::header_dim(f.header, "bands");
  const std::size_t count = detail::checked_mul(detail::checked_mul(h.rows, h.cols), h.bands);
  const std::size_t need = detail::checked_mul(count, 4);
  if (f.payload.size() < need) {
    throw TruncatedPayloadError("payload has " + std::to_string(f.payload.size() / 4) + " values, " +
                                std::to_string(count) + " required");
  }
  if (f.payload.size() > need) throw FormatError("payload longer than the header dimensions");
  try {
    if (f.header.contains("wavelengths_nm")) h.wavelengths_nm = f.header["wavelengths_nm"].get<std::vector<double>>();
    if (f.header.contains("x_max")) h.x_max = f.header["x_max"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedHeaderError(std::string("bad optional header key: ") + e.what());
  }
  h.extra = f.header;
  for (const char* k : {"format", "version", "rows", "cols", "bands", "dtype", "wavelengths_nm", "x_max"}) {
    h.extra.erase(k);
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = static_cast<double>(std::bit_cast<float>(detail::get_u32(f.payload, 4 * i)));
  }
  out.cube = HyperCube(h.rows, h.cols, h.bands, std::move(data));
  return out;
}

inline void write_cube(const HyperCube& cube, const std::string& path, const VolumeHeader& meta = {}) {
  detail::write_file(path, encode_cube(cube, meta));
}

inline CubeFile read_cube_file(const std::string& path) { return decode_cube(detail::read_file(path)); }

inline HyperCube read_cube(const std::string& path) { return read_cube_file(path).cube; }

/// FPA images travel as single-band cubes.
inline void write_fpa(const FpaImage& y, const std::string& path, const VolumeHeader& meta = {}) {
  write_cube(HyperCube(y.rows(), y.cols(), 1, y.storage()), path, meta);
}

inline FpaImage read_fpa(const std::string& path) {
  HyperCube c = read_cube(path);
  if (c.bands() != 1) throw DimensionError("'" + path + "' is not a single-band FPA image");
  return Image(c.rows(), c.cols(), std::move(c.storage()));
}

/// Coefficient dump: stored as rows x cols x (subbands * bands) with the subband map in the header.
inline void write_coefficients(const CoefVector& alpha, const std::string& path) {
  const SubbandMap& m = alpha.map;
  VolumeHeader meta;
  meta.extra["subband_map"] = {{"rows", m.rows}, {"cols", m.cols}, {"bands", m.bands}, {"levels", m.levels},
                               {"order", "spectral, subband (scaling, then level-major details), row, col"}};
  write_cube(HyperCube(m.rows, m.cols, m.subbands_per_band() * m.bands, alpha.values), path, meta);
}

inline std::string encode_layout(const FilterLayout& layout) {
  nlohmann::json h;
  h["format"] = "msk";
  h["version"] = 1;
  h["rows"] = layout.rows();
  h["cols"] = layout.cols();
  h["bands"] = layout.bands();
  h["kind"] = layout.kind();
  h["seed"] = layout.seed();
  std::string out = detail::frame(h);
  for (std::uint16_t b : layout.assignment()) {
    const auto v = static_cast<std::uint16_t>(b + 1);
    out.push_back(static_cast<char>(v & 0xffu));
    out.push_back(static_cast<char>(v >> 8));
  }
  return out;
}

inline FilterLayout decode_layout(std::string_view bytes) {
  const detail::Framed f = detail::unframe(bytes, "msk");
  const std::size_t rows = detail::header_dim(f.header, "rows");
  const std::size_t cols = detail::header_dim(f.header, "cols");
  const std::size_t bands = detail::header_dim(f.header, "bands");
  const std::size_t count = detail::checked_mul(rows, cols);
  const std::size_t need = detail::checked_mul(count, 2);
  if (f.payload.size() < need) throw TruncatedPayloadError("layout payload truncated");
  if (f.payload.size() > need) throw FormatError("layout payload longer than the header dimensions");
  std::vector<std::uint16_t> a(count);
  for (std::size_t p = 0; p < count; ++p) {
    const auto v = static_cast<std::uint16_t>(static_cast<unsigned char>(f.payload[2 * p]) |
                                              (static_cast<unsigned char>(f.payload[2 * p + 1]) << 8));
    if (v == 0 || v > bands) throw FormatError("layout band index " + std::to_string(v) + " outside [1, bands]");
    a[p] = static_cast<std::uint16_t>(v - 1);
  }
  std::uint64_t seed = 0;
  std::string kind = "custom";
  try {
    seed = f.header.value("seed", std::uint64_t{0});
    kind = f.header.value("kind", std::string("custom"));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedHeaderError(std::string("bad layout header: ") + e.what());
  }
  return FilterLayout(rows, cols, bands, std::move(a), kind, seed);
}

inline void write_layout(const FilterLayout& layout, const std::string& path) {
  detail::write_file(path, encode_layout(layout));
}

inline FilterLayout read_layout(const std::string& path) { return decode_layout(detail::read_file(path)); }

}  // namespace hsi
