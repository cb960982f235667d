#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hsi/lanczos.hpp"
#include "hsi/layout.hpp"
#include "hsi/volume.hpp"

namespace hsi {

/// Nearest-neighbour demosaicing at FPA resolution: every pixel of band b copies the
/// closest pixel (Euclidean) carrying band b; ties go to the lowest row, then column.
inline HyperCube naive_demosaic(const FpaImage& y, const FilterLayout& layout) {
  if (y.rows() != layout.rows() || y.cols() != layout.cols()) {
    throw DimensionError("naive_demosaic: FPA and layout shapes differ");
  }
  const long long rows = static_cast<long long>(y.rows());
  const long long cols = static_cast<long long>(y.cols());
  HyperCube out(y.rows(), y.cols(), layout.bands());
  for (std::size_t b = 0; b < layout.bands(); ++b) {
    if (layout.pixels_of(b).empty()) {
      throw DimensionError("naive_demosaic: band " + std::to_string(b + 1) + " has no pixels");
    }
    for (long long i = 0; i < rows; ++i) {
      for (long long j = 0; j < cols; ++j) {
        long long best_d2 = std::numeric_limits<long long>::max();
        long long bi = 0, bj = 0;
        // Rings of growing Chebyshev radius r; anything beyond ring r is at d^2 >= (r+1)^2.
        for (long long r = 0;; ++r) {
          for (long long di = -r; di <= r; ++di) {
            const long long ii = i + di;
            if (ii < 0 || ii >= rows) continue;
            const bool edge_row = (di == -r || di == r);
            const long long step = edge_row ? 1 : 2 * r;
            for (long long dj = -r; dj <= r; dj += (step ? step : 1)) {
              const long long jj = j + dj;
              if (jj >= 0 && jj < cols && layout.band_at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) == b) {
                const long long d2 = di * di + dj * dj;
                if (d2 < best_d2 || (d2 == best_d2 && (ii < bi || (ii == bi && jj < bj)))) {
                  best_d2 = d2;
                  bi = ii;
                  bj = jj;
                }
              }
            }
          }
          if (best_d2 < (r + 1) * (r + 1)) break;
        }
        out(static_cast<std::size_t>(i), static_cast<std::size_t>(j), b) =
            y(static_cast<std::size_t>(bi), static_cast<std::size_t>(bj));
      }
    }
  }
  return out;
}

namespace detail {

// One pass of the [1/4, 1/2, 1/4] kernel along each of the three axes, half-sample mirror.
inline HyperCube triangle_smooth_3d(const HyperCube& x) {
  const std::size_t R = x.rows(), C = x.cols(), L = x.bands();
  auto clampi = [](long long i, std::size_t n) { return mirror_index(i, n); };
  HyperCube a(R, C, L), b(R, C, L), c(R, C, L);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        const long long jj = static_cast<long long>(j);
        a(i, j, l) = 0.25 * x(i, clampi(jj - 1, C), l) + 0.5 * x(i, j, l) + 0.25 * x(i, clampi(jj + 1, C), l);
      }
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        const long long ii = static_cast<long long>(i);
        b(i, j, l) = 0.25 * a(clampi(ii - 1, R), j, l) + 0.5 * a(i, j, l) + 0.25 * a(clampi(ii + 1, R), j, l);
      }
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        const long long ll = static_cast<long long>(l);
        c(i, j, l) = 0.25 * b(i, j, clampi(ll - 1, L)) + 0.5 * b(i, j, l) + 0.25 * b(i, j, clampi(ll + 1, L));
      }
  return c;
}

}  // namespace detail

/// Initial estimate x0: nearest fill of every band at FPA resolution, one separable 3-D
/// triangle smoothing pass with the measured samples put back in their own band, then a
/// per-band resize to the target grid with the normalized transpose of Up.
inline HyperCube interp3d_init(const FpaImage& y, const FilterLayout& layout, std::size_t target_rows,
                               std::size_t target_cols, int lobes = 3) {
  const UpsampleSpec spec = UpsampleSpec::from_dims(target_rows, target_cols, y.rows(), y.cols(), lobes);
  HyperCube filled = detail::triangle_smooth_3d(naive_demosaic(y, layout));
  for (std::size_t p = 0; p < layout.size(); ++p) {
    filled[layout.band_at(p) * layout.size() + p] = y[p];
  }
  if (spec.factor == 1) return filled;
  return Downsizer(Upsampler(spec)).apply(filled);
}

}  // namespace hsi
