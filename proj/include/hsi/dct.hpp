#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "hsi/volume.hpp"

namespace hsi {

/// Orthonormal DCT-II of a fixed length, applied as a dense matrix product.
/// C[k][n] = s_k cos(pi (2n + 1) k / 2N), s_0 = sqrt(1/N), s_k = sqrt(2/N).
class Dct {
 public:
  Dct() = default;
  explicit Dct(std::size_t n) : n_(n), m_(n * n) {
    if (n == 0) throw DimensionError("Dct: length must be >= 1");
    const double dn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
      for (std::size_t i = 0; i < n; ++i) {
        m_[k * n + i] = s * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                     static_cast<double>(k) / (2.0 * dn));
      }
    }
    if (n == 1) m_[0] = 1.0;
  }

  std::size_t size() const { return n_; }
  const std::vector<double>& matrix() const { return m_; }

  /// out[k * out_stride] = sum_n C[k][n] in[n * in_stride]
  void forward(const double* in, double* out, std::size_t in_stride = 1, std::size_t out_stride = 1) const {
    for (std::size_t k = 0; k < n_; ++k) {
      const double* row = m_.data() + k * n_;
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += row[i] * in[i * in_stride];
      out[k * out_stride] = s;
    }
  }

  /// out = C^T in
  void inverse(const double* in, double* out, std::size_t in_stride = 1, std::size_t out_stride = 1) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) s += m_[k * n_ + i] * in[k * in_stride];
      out[i * out_stride] = s;
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> m_;
};

/// In-place separable 2-D DCT (or inverse) of a row-major rows x cols block.
inline void dct2_inplace(const Dct& along_rows, const Dct& along_cols, std::span<double> block,
                         bool inverse) {
  const std::size_t rows = along_rows.size();
  const std::size_t cols = along_cols.size();
  if (block.size() != rows * cols) throw DimensionError("dct2_inplace: block size mismatch");
  std::vector<double> tmp(std::max(rows, cols));
  for (std::size_t i = 0; i < rows; ++i) {
    double* r = block.data() + i * cols;
    if (inverse) along_cols.inverse(r, tmp.data()); else along_cols.forward(r, tmp.data());
    std::copy_n(tmp.data(), cols, r);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double* c = block.data() + j;
    if (inverse) along_rows.inverse(c, tmp.data(), cols, 1); else along_rows.forward(c, tmp.data(), cols, 1);
    for (std::size_t i = 0; i < rows; ++i) c[i * cols] = tmp[i];
  }
}

namespace detail {

inline HyperCube spectral_pass(const HyperCube& x, const Dct& dct, bool inverse) {
  if (dct.size() != x.bands()) throw DimensionError("spectral DCT: band count mismatch");
  HyperCube out(x.rows(), x.cols(), x.bands());
  const std::size_t stride = x.band_size();
  for (std::size_t p = 0; p < stride; ++p) {
    if (inverse) dct.inverse(x.storage().data() + p, out.storage().data() + p, stride, stride);
    else dct.forward(x.storage().data() + p, out.storage().data() + p, stride, stride);
  }
  return out;
}

}  // namespace detail

/// Orthonormal DCT-II along the band axis of every pixel spectrum.
inline HyperCube dct_spectral(const HyperCube& x) { return detail::spectral_pass(x, Dct(x.bands()), false); }
inline HyperCube idct_spectral(const HyperCube& x) { return detail::spectral_pass(x, Dct(x.bands()), true); }

}  // namespace hsi
