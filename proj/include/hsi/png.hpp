#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "hsi/io.hpp"
#include "hsi/volume.hpp"

namespace hsi {

namespace detail {

inline void put_be32(std::string& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline void png_chunk(std::string& out, const char* type, const std::string& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_be32(out, static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                                                 static_cast<uInt>(body.size()))));
}

}  // namespace detail

/// 8-bit PNG, grayscale (channels = 1) or RGB (channels = 3), rows of width*channels bytes.
inline void write_png(const std::string& path, std::size_t width, std::size_t height, int channels,
                      const std::vector<std::uint8_t>& pixels) {
  if (channels != 1 && channels != 3) throw ConfigError("write_png: channels must be 1 or 3");
  const std::size_t stride = width * static_cast<std::size_t>(channels);
  if (pixels.size() != stride * height) throw DimensionError("write_png: pixel buffer size mismatch");
  std::string raw;
  raw.reserve((stride + 1) * height);
  for (std::size_t r = 0; r < height; ++r) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(pixels.data() + r * stride), stride);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw Error("write_png: zlib compression failed");
  }
  z.resize(zlen);
  std::string ihdr;
  detail::put_be32(ihdr, static_cast<std::uint32_t>(width));
  detail::put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += static_cast<char>(8);
  ihdr += static_cast<char>(channels == 1 ? 0 : 2);
  ihdr += std::string(3, '\0');
  std::string out("\x89PNG\r\n\x1a\n", 8);
  detail::png_chunk(out, "IHDR", ihdr);
  detail::png_chunk(out, "IDAT", z);
  detail::png_chunk(out, "IEND", "");
  detail::write_file(path, out);
}

/// Min-max normalization bounds of one band and the 8-bit rendering they produce.
struct BandRendering {
  double min = 0.0;
  double max = 0.0;
  std::vector<std::uint8_t> pixels;
};

/// round(255 (v - min) / (max - min)); a constant band renders as mid-gray 128.
inline BandRendering render_band(const HyperCube& cube, std::size_t band) {
  if (band >= cube.bands()) {
    throw DimensionError("band " + std::to_string(band + 1) + " out of range [1, " +
                         std::to_string(cube.bands()) + "]");
  }
  const auto v = cube.band(band);
  BandRendering r;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  r.min = *lo;
  r.max = *hi;
  r.pixels.resize(v.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    r.pixels[p] = r.max > r.min
                      ? static_cast<std::uint8_t>(std::lround(255.0 * (v[p] - r.min) / (r.max - r.min)))
                      : std::uint8_t{128};
  }
  return r;
}

/// Grayscale PNG of one band (zero-based) plus a "<path>.txt" sidecar with the bounds.
inline void export_band_png(const HyperCube& cube, std::size_t band, const std::string& path) {
  const BandRendering r = render_band(cube, band);
  write_png(path, cube.cols(), cube.rows(), 1, r.pixels);
  std::ofstream side(path + ".txt");
  side.precision(17);
  side << "band=" << band + 1 << "\nmin=" << r.min << "\nmax=" << r.max << "\n";
}

/// RGB PNG from three bands (zero-based), each channel normalized on its own.
inline void export_false_rgb(const HyperCube& cube, const std::array<std::size_t, 3>& bands,
                             const std::string& path) {
  std::array<BandRendering, 3> ch;
  for (int c = 0; c < 3; ++c) ch[c] = render_band(cube, bands[c]);
  std::vector<std::uint8_t> px(cube.band_size() * 3);
  for (std::size_t p = 0; p < cube.band_size(); ++p) {
    for (int c = 0; c < 3; ++c) px[3 * p + c] = ch[c].pixels[p];
  }
  write_png(path, cube.cols(), cube.rows(), 3, px);
  std::ofstream side(path + ".txt");
  side.precision(17);
  const char* names[3] = {"red", "green", "blue"};
  for (int c = 0; c < 3; ++c) {
    side << names[c] << "_band=" << bands[c] + 1 << "\n"
         << names[c] << "_min=" << ch[c].min << "\n"
         << names[c] << "_max=" << ch[c].max << "\n";
  }
}

}  // namespace hsi
