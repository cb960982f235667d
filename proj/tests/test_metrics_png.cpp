#include <gtest/gtest.h>

#include <cmath>
#include <zlib.h>

#include "support.hpp"

using namespace hsi;

TEST(Snr, IdentityIsPlusInfinity) {
  const HyperCube x = support::random_cube(4, 4, 3, 1);
  EXPECT_TRUE(std::isinf(snr_db(x, x)));
  EXPECT_GT(snr_db(x, x), 0);
  for (double v : per_band_snr_db(x, x)) EXPECT_TRUE(std::isinf(v));
}

TEST(Snr, ZeroEstimateIsZeroDb) {
  const HyperCube x = support::random_cube(4, 4, 3, 2);
  EXPECT_DOUBLE_EQ(snr_db(x, HyperCube(4, 4, 3)), 0.0);
}

TEST(Snr, TenPercentErrorIsTwentyDb) {
  const HyperCube x = support::random_cube(5, 4, 3, 3);
  HyperCube e = support::random_cube(5, 4, 3, 4);
  double en = 0, xn = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    en += e[p] * e[p];
    xn += x[p] * x[p];
  }
  HyperCube y = x;
  for (std::size_t p = 0; p < x.size(); ++p) y[p] += e[p] * std::sqrt(xn) / std::sqrt(en) / 10.0;
  EXPECT_NEAR(snr_db(x, y), 20.0, 1e-10);
}

TEST(Snr, Errors) {
  EXPECT_THROW(snr_db(HyperCube(2, 2, 1), HyperCube(2, 2, 1)), NumericalError);
  EXPECT_THROW(snr_db(HyperCube(2, 2, 1, 1.0), HyperCube(2, 3, 1)), DimensionError);
}

TEST(Snr, PerBandCountAndValues) {
  const HyperCube x = support::random_cube(4, 4, 5, 5);
  HyperCube y = x;
  y(0, 0, 2) += 1.0;
  const auto s = per_band_snr_db(x, y);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_TRUE(std::isinf(s[0]));
  EXPECT_FALSE(std::isinf(s[2]));
  EXPECT_NEAR(s[2], snr_db(x.band(2), y.band(2)), 0.0);
}

TEST(Png, ConstantBandIsMidGray) {
  const auto r = render_band(HyperCube(3, 3, 1, 0.7), 0);
  for (auto p : r.pixels) EXPECT_EQ(p, 128);
}

TEST(Png, UnitRangeMapsToRound255) {
  HyperCube x(1, 5, 1, std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto r = render_band(x, 0);
  const std::vector<std::uint8_t> want{0, 64, 128, 191, 255};
  EXPECT_EQ(r.pixels, want);
  EXPECT_EQ(r.min, 0.0);
  EXPECT_EQ(r.max, 1.0);
}

namespace {
// Decodes an 8-bit, non-interlaced PNG written with filter type 0.
std::vector<std::uint8_t> decode_png(const std::string& png, std::size_t& w, std::size_t& h, int& channels) {
  auto be32 = [&](std::size_t at) {
    return (std::uint32_t(std::uint8_t(png[at])) << 24) | (std::uint32_t(std::uint8_t(png[at + 1])) << 16) |
           (std::uint32_t(std::uint8_t(png[at + 2])) << 8) | std::uint32_t(std::uint8_t(png[at + 3]));
  };
  EXPECT_EQ(png.substr(1, 3), "PNG");
  std::size_t at = 8;
  std::string idat;
  while (at < png.size()) {
    const std::uint32_t len = be32(at);
    const std::string type = png.substr(at + 4, 4);
    const std::string data = png.substr(at + 8, len);
    const uLong crc = crc32(crc32(0, reinterpret_cast<const Bytef*>(type.data()), 4),
                            reinterpret_cast<const Bytef*>(data.data()), len);
    EXPECT_EQ(crc, be32(at + 8 + len));
    if (type == "IHDR") {
      w = be32(at + 8);
      h = be32(at + 12);
      channels = png[at + 17] == 2 ? 3 : 1;
    }
    if (type == "IDAT") idat += data;
    at += 12 + len;
  }
  std::vector<std::uint8_t> raw(h * (1 + w * channels));
  uLongf n = raw.size();
  EXPECT_EQ(uncompress(raw.data(), &n, reinterpret_cast<const Bytef*>(idat.data()), idat.size()), Z_OK);
  std::vector<std::uint8_t> px;
  for (std::size_t r = 0; r < h; ++r) {
    EXPECT_EQ(raw[r * (1 + w * channels)], 0);
    px.insert(px.end(), raw.begin() + r * (1 + w * channels) + 1, raw.begin() + (r + 1) * (1 + w * channels));
  }
  return px;
}
}  // namespace

TEST(Png, BandFileDecodesToRendering) {
  const auto dir = support::scratch("png");
  const HyperCube x = support::random_cube(6, 7, 2, 11);
  export_band_png(x, 1, (dir / "b.png").string());
  std::size_t w = 0, h = 0;
  int c = 0;
  const auto px = decode_png(support::slurp(dir / "b.png"), w, h, c);
  EXPECT_EQ(w, 7u);
  EXPECT_EQ(h, 6u);
  EXPECT_EQ(c, 1);
  EXPECT_EQ(px, render_band(x, 1).pixels);
  const std::string side = support::slurp(dir / "b.png.txt");
  EXPECT_NE(side.find("band=2"), std::string::npos);
  EXPECT_NE(side.find("min="), std::string::npos);
}

TEST(Png, IdenticalBandsGiveGrayComposite) {
  const auto dir = support::scratch("rgb");
  HyperCube x = support::random_cube(5, 5, 3, 12);
  for (std::size_t b = 1; b < 3; ++b)
    for (std::size_t p = 0; p < x.band_size(); ++p) x.band(b)[p] = x.band(0)[p];
  export_false_rgb(x, {0, 1, 2}, (dir / "rgb.png").string());
  std::size_t w = 0, h = 0;
  int c = 0;
  const auto px = decode_png(support::slurp(dir / "rgb.png"), w, h, c);
  ASSERT_EQ(c, 3);
  for (std::size_t p = 0; p < w * h; ++p) {
    EXPECT_EQ(px[3 * p], px[3 * p + 1]);
    EXPECT_EQ(px[3 * p], px[3 * p + 2]);
  }
  EXPECT_THROW(export_false_rgb(x, {0, 1, 3}, (dir / "bad.png").string()), DimensionError);
}
