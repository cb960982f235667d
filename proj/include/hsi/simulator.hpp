#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hsi/layout.hpp"
#include "hsi/rng.hpp"
#include "hsi/sensing.hpp"
#include "hsi/volume.hpp"

namespace hsi {

enum class LayoutKind { mosaic, random };

inline std::string to_string(LayoutKind k) { return k == LayoutKind::mosaic ? "mosaic" : "random"; }

inline LayoutKind parse_layout_kind(const std::string& s) {
  if (s == "mosaic") return LayoutKind::mosaic;
  if (s == "random") return LayoutKind::random;
  throw ConfigError("unknown layout kind '" + s + "' (expected mosaic or random)");
}

struct LayoutSpec {
  LayoutKind kind = LayoutKind::mosaic;
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t bands = 16;
  std::size_t edge = 4;
  std::uint64_t seed = 0;
};

/// mosaic: band (edge * (i mod edge) + (j mod edge)), tiled macropixels.
/// random: the same assignment (round-robin when bands is not a perfect square) with all
/// pixel positions shuffled by a seeded Fisher-Yates pass; per-band counts are preserved.
inline FilterLayout make_layout(const LayoutSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0 || spec.bands == 0) throw ConfigError("make_layout: empty dimensions");
  if (spec.bands > 65535) throw ConfigError("make_layout: too many bands");
  const std::size_t M = spec.rows * spec.cols;
  const bool square = spec.edge * spec.edge == spec.bands;
  std::vector<std::uint16_t> a(M);
  if (spec.kind == LayoutKind::mosaic) {
    if (!square) {
      throw ConfigError("make_layout: mosaic needs edge^2 == bands (" + std::to_string(spec.edge) + "^2 != " +
                        std::to_string(spec.bands) + ")");
    }
    if (spec.rows % spec.edge != 0 || spec.cols % spec.edge != 0) {
      throw ConfigError("make_layout: " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                        " not divisible by macropixel edge " + std::to_string(spec.edge));
    }
  } else if (M % spec.bands != 0) {
    throw ConfigError("make_layout: " + std::to_string(spec.bands) + " bands do not divide " +
                      std::to_string(M) + " pixels");
  }
  for (std::size_t i = 0; i < spec.rows; ++i) {
    for (std::size_t j = 0; j < spec.cols; ++j) {
      const std::size_t p = i * spec.cols + j;
      a[p] = static_cast<std::uint16_t>(square ? spec.edge * (i % spec.edge) + (j % spec.edge) : p % spec.bands);
    }
  }
  if (spec.kind == LayoutKind::random) {
    RandomStream rng(spec.seed, "layout");
    for (std::size_t p = M - 1; p > 0; --p) {
      const auto q = static_cast<std::size_t>(rng.below(p + 1));
      std::swap(a[p], a[q]);
    }
  }
  return FilterLayout(spec.rows, spec.cols, spec.bands, std::move(a), to_string(spec.kind),
                      spec.kind == LayoutKind::random ? spec.seed : 0);
}

/// y = Phi x, plus white Gaussian noise rescaled so that 20 log10(|Phi x| / |n|) equals
/// noise_snr_db exactly.
inline FpaImage acquire(const SensingOperator& phi, const HyperCube& x, std::optional<double> noise_snr_db = {},
                        std::uint64_t seed = 0) {
  FpaImage y = phi.forward(x);
  if (!noise_snr_db) return y;
  RandomStream rng(seed, "noise");
  std::vector<double> n(y.size());
  for (double& v : n) v = rng.normal();
  const double signal = detail::norm2(y.values());
  const double raw = detail::norm2(n);
  const double target = signal / std::pow(10.0, *noise_snr_db / 20.0);
  const double scale = raw > 0.0 ? target / raw : 0.0;
  for (std::size_t p = 0; p < y.size(); ++p) y[p] += scale * n[p];
  return y;
}

/// Synthetic scene description. Spatial quantities are fractions of the image extent, so
/// the same spec and seed describe the same scene at any grid size.
struct PhantomSpec {
  std::size_t rows = 32;
  std::size_t cols = 32;
  std::size_t bands = 16;
  std::size_t blobs = 24;
  std::size_t spectral_atoms = 3;
  double smoothness = 0.05;
  std::uint64_t seed = 0;
  double x_max = 1.0;
};

/// Sum of rotated anisotropic Gaussian blobs, each with a spectrum built from the first
/// spectral_atoms DCT atoms, rescaled affinely into [0.05, 0.95] x_max.
inline HyperCube make_phantom(const PhantomSpec& spec) {
  if (spec.blobs == 0) throw ConfigError("make_phantom: blob count must be >= 1");
  if (spec.spectral_atoms == 0) throw ConfigError("make_phantom: spectral atom count must be >= 1");
  if (!(spec.smoothness > 0.0)) throw ConfigError("make_phantom: smoothness must be > 0");
  if (!(spec.x_max > 0.0)) throw ConfigError("make_phantom: x_max must be > 0");
  HyperCube x(spec.rows, spec.cols, spec.bands, 0.0);
  RandomStream rng(spec.seed, "phantom");
  const double L = static_cast<double>(spec.bands);
  std::vector<double> spectrum(spec.bands);
  std::vector<double> spatial(spec.rows * spec.cols);
  for (std::size_t n = 0; n < spec.blobs; ++n) {
    const double cu = rng.uniform(), cv = rng.uniform();
    const double su = spec.smoothness * rng.uniform(1.0, 4.0);
    const double sv = spec.smoothness * rng.uniform(1.0, 4.0);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double amp = rng.uniform(0.2, 1.0);
    std::fill(spectrum.begin(), spectrum.end(), 0.0);
    for (std::size_t a = 0; a < spec.spectral_atoms && a < spec.bands; ++a) {
      const double c = a == 0 ? 1.0 : rng.uniform(-0.6, 0.6);
      for (std::size_t b = 0; b < spec.bands; ++b) {
        spectrum[b] += c * std::cos(std::numbers::pi * (2.0 * static_cast<double>(b) + 1.0) *
                                    static_cast<double>(a) / (2.0 * L));
      }
    }
    const double ct = std::cos(theta), st = std::sin(theta);
    for (std::size_t i = 0; i < spec.rows; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(spec.rows) - cu;
      for (std::size_t j = 0; j < spec.cols; ++j) {
        const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(spec.cols) - cv;
        const double pu = ct * u + st * v;
        const double pv = -st * u + ct * v;
        spatial[i * spec.cols + j] = amp * std::exp(-0.5 * (pu * pu / (su * su) + pv * pv / (sv * sv)));
      }
    }
    for (std::size_t b = 0; b < spec.bands; ++b) {
      auto band = x.band(b);
      for (std::size_t p = 0; p < band.size(); ++p) band[p] += spectrum[b] * spatial[p];
    }
  }
  const auto [lo, hi] = std::minmax_element(x.storage().begin(), x.storage().end());
  const double mn = *lo, mx = *hi;
  const double a = 0.05 * spec.x_max, b = 0.95 * spec.x_max;
  for (double& v : x.storage()) v = mx > mn ? a + (b - a) * (v - mn) / (mx - mn) : 0.5 * (a + b);
  return x;
}

}  // namespace hsi
