#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hsi/dct.hpp"
#include "hsi/volume.hpp"
#include "hsi/wavelet.hpp"

namespace hsi {

/// Redundant analysis operator A = A_UDWT (x) A_DCT.
///
/// analyze(): orthonormal DCT-II along the spectrum of every pixel, then a UDWT of each
/// transformed band image, then an orthonormal 2-D DCT of the scaling subband.
/// pinv_synthesize() runs the inverse pipeline with the dual filters and is a left
/// inverse of analyze(); for tight (orthonormal) filter banks it is also the
/// Moore-Penrose pseudo-inverse and coincides with adjoint().
class AnalysisDictionary {
 public:
  AnalysisDictionary(std::size_t rows, std::size_t cols, std::size_t bands,
                     WaveletFilterPair filters = WaveletFilterPair::daubechies8(), bool dct_scaling = true)
      : udwt_(rows, cols, std::move(filters)),
        spectral_(bands),
        dct_rows_(rows),
        dct_cols_(cols),
        dct_scaling_(dct_scaling),
        map_{rows, cols, bands, udwt_.levels()} {}

  std::size_t rows() const { return map_.rows; }
  std::size_t cols() const { return map_.cols; }
  std::size_t bands() const { return map_.bands; }
  std::size_t input_size() const { return rows() * cols() * bands(); }
  std::size_t coef_size() const { return map_.total(); }
  const SubbandMap& subband_map() const { return map_; }
  const WaveletFilterPair& filters() const { return udwt_.filters(); }
  bool is_tight() const { return udwt_.filters().is_tight(); }

  CoefVector analyze(const HyperCube& x) const {
    check_cube(x);
    const HyperCube s = detail::spectral_pass(x, spectral_, false);
    CoefVector out{std::vector<double>(coef_size()), map_};
    const std::size_t per_band = udwt_.coef_size();
    for (std::size_t b = 0; b < bands(); ++b) {
      std::span<double> block(out.values.data() + b * per_band, per_band);
      udwt_.analyze(s.band(b), block);
      if (dct_scaling_) dct2_inplace(dct_rows_, dct_cols_, block.first(udwt_.block()), false);
    }
    return out;
  }

  HyperCube pinv_synthesize(const CoefVector& alpha) const { return synthesize(alpha, true); }

  HyperCube adjoint(const CoefVector& alpha) const { return synthesize(alpha, false); }

 private:
  HyperCube synthesize(const CoefVector& alpha, bool dual) const {
    if (alpha.values.size() != coef_size()) {
      throw DimensionError("AnalysisDictionary: coefficient length " + std::to_string(alpha.values.size()) +
                           " != " + std::to_string(coef_size()));
    }
    HyperCube s(rows(), cols(), bands());
    const std::size_t per_band = udwt_.coef_size();
    std::vector<double> block(per_band);
    for (std::size_t b = 0; b < bands(); ++b) {
      std::copy_n(alpha.values.begin() + static_cast<std::ptrdiff_t>(b * per_band), per_band, block.begin());
      if (dct_scaling_) dct2_inplace(dct_rows_, dct_cols_, std::span<double>(block).first(udwt_.block()), true);
      if (dual) udwt_.synthesize(block, s.band(b));
      else udwt_.adjoint(block, s.band(b));
    }
    return detail::spectral_pass(s, spectral_, true);
  }

  void check_cube(const HyperCube& x) const {
    if (x.rows() != rows() || x.cols() != cols() || x.bands() != bands()) {
      throw DimensionError("AnalysisDictionary: cube " + x.shape_string() + " does not match " +
                           std::to_string(rows()) + "x" + std::to_string(cols()) + "x" +
                           std::to_string(bands()));
    }
  }

  Udwt udwt_;
  Dct spectral_;
  Dct dct_rows_;
  Dct dct_cols_;
  bool dct_scaling_;
  SubbandMap map_;
};

/// H_K: keeps the K entries of largest magnitude (ties go to the lowest index), zeroes the rest.
inline std::vector<double> hard_threshold(std::span<const double> alpha, std::size_t k) {
  std::vector<double> out(alpha.size(), 0.0);
  if (k >= alpha.size()) {
    std::copy(alpha.begin(), alpha.end(), out.begin());
    return out;
  }
  if (k == 0) return out;
  std::vector<std::size_t> idx(alpha.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(alpha[a]);
    const double mb = std::abs(alpha[b]);
    return ma > mb || (ma == mb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), before);
  for (std::size_t i = 0; i < k; ++i) out[idx[i]] = alpha[idx[i]];
  return out;
}

inline CoefVector hard_threshold(const CoefVector& alpha, std::size_t k) {
  return CoefVector{hard_threshold(std::span<const double>(alpha.values), k), alpha.map};
}

}  // namespace hsi
