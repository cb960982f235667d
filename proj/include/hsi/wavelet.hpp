#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsi/rng.hpp"
#include "hsi/volume.hpp"

namespace hsi {

/// FIR filter; tap k acts on the sample at offset (k - origin) times the dilation.
struct Filter {
  std::vector<double> taps;
  int origin = 0;

  bool operator==(const Filter&) const = default;
};

/// Analysis and synthesis (dual) filter banks of an undecimated wavelet transform.
/// Taps use the usual normalization (lowpass sums to sqrt 2); the transform rescales
/// every filter by 1/sqrt 2 so that orthonormal banks yield a Parseval frame.
struct WaveletFilterPair {
  Filter lowpass;
  Filter highpass;
  Filter dual_lowpass;
  Filter dual_highpass;
  int levels = 3;

  /// Orthonormal bank: highpass by quadrature mirror, duals equal to the analysis filters.
  static WaveletFilterPair orthonormal(std::vector<double> h, int levels = 3) {
    const int n = static_cast<int>(h.size());
    std::vector<double> g(h.size());
    for (int k = 0; k < n; ++k) g[k] = ((k % 2) ? -1.0 : 1.0) * h[n - 1 - k];
    const int origin = (n - 1) / 2;
    WaveletFilterPair p{{h, origin}, {g, origin}, {h, origin}, {g, origin}, levels};
    return p;
  }

  /// Daubechies orthonormal 8-tap filters (4 vanishing moments) on 3 levels.
  static WaveletFilterPair daubechies8(int levels = 3) {
    return orthonormal({0.2303778133088965008632912, 0.714846570552915647089922,
                        0.6308807679298589078817163, -0.02798376941685985421141375,
                        -0.1870348117190930840795707, 0.03084138183556076362721936,
                        0.03288301166688519973540751, -0.01059740178506903210488321},
                       levels);
  }

  static WaveletFilterPair haar(int levels = 3) {
    const double s = 1.0 / std::sqrt(2.0);
    return orthonormal({s, s}, levels);
  }

  bool is_tight() const { return lowpass == dual_lowpass && highpass == dual_highpass; }

  /// Reads {"levels", "lowpass", "highpass", "dual_lowpass", "dual_highpass"}; each filter is
  /// {"taps": [...], "origin": k}. With only "lowpass" given the bank is built as orthonormal.
  static WaveletFilterPair from_json(const nlohmann::json& j) {
    auto read_filter = [](const nlohmann::json& f) {
      Filter out;
      out.taps = f.at("taps").get<std::vector<double>>();
      out.origin = f.value("origin", static_cast<int>(out.taps.size() - 1) / 2);
      if (out.taps.empty()) throw ConfigError("wavelet filter: empty taps");
      return out;
    };
    try {
      const int levels = j.value("levels", 3);
      if (!j.contains("highpass")) {
        auto lp = read_filter(j.at("lowpass"));
        auto p = orthonormal(lp.taps, levels);
        p.validate();
        return p;
      }
      WaveletFilterPair p{read_filter(j.at("lowpass")), read_filter(j.at("highpass")),
                          read_filter(j.at("dual_lowpass")), read_filter(j.at("dual_highpass")),
                          levels};
      p.validate();
      return p;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("wavelet filter description: ") + e.what());
    }
  }

  /// Checks perfect reconstruction of one undecimated level on a random periodic signal.
  void validate() const;
};

namespace detail {

// Periodic filtering along columns (axis j) of a rows x cols array:
//   forward:   out[i][n] (+)= sum_k t_k in[i][(n + d (k - o)) mod cols]
//   transpose: out[i][m] (+)= sum_k t_k in[i][(m - d (k - o)) mod cols]
inline void filter_cols(const double* in, double* out, std::size_t rows, std::size_t cols,
                        const Filter& f, double scale, std::size_t dilation, bool transpose,
                        bool accumulate) {
  const long long n = static_cast<long long>(cols);
  std::vector<std::size_t> shift(f.taps.size());
  for (std::size_t k = 0; k < f.taps.size(); ++k) {
    long long s = static_cast<long long>(dilation) * (static_cast<long long>(k) - f.origin);
    if (transpose) s = -s;
    s %= n;
    if (s < 0) s += n;
    shift[k] = static_cast<std::size_t>(s);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const double* src = in + i * cols;
    double* dst = out + i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < f.taps.size(); ++k) {
        std::size_t idx = j + shift[k];
        if (idx >= cols) idx -= cols;
        acc += f.taps[k] * src[idx];
      }
      acc *= scale;
      dst[j] = accumulate ? dst[j] + acc : acc;
    }
  }
}

// Same along rows (axis i).
inline void filter_rows(const double* in, double* out, std::size_t rows, std::size_t cols,
                        const Filter& f, double scale, std::size_t dilation, bool transpose,
                        bool accumulate) {
  const long long n = static_cast<long long>(rows);
  std::vector<std::size_t> shift(f.taps.size());
  for (std::size_t k = 0; k < f.taps.size(); ++k) {
    long long s = static_cast<long long>(dilation) * (static_cast<long long>(k) - f.origin);
    if (transpose) s = -s;
    s %= n;
    if (s < 0) s += n;
    shift[k] = static_cast<std::size_t>(s);
  }
  std::vector<double> acc(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
      std::size_t idx = i + shift[k];
      if (idx >= rows) idx -= rows;
      const double* src = in + idx * cols;
      const double t = f.taps[k];
      for (std::size_t j = 0; j < cols; ++j) acc[j] += t * src[j];
    }
    double* dst = out + i * cols;
    for (std::size_t j = 0; j < cols; ++j) dst[j] = accumulate ? dst[j] + scale * acc[j] : scale * acc[j];
  }
}

}  // namespace detail

/// 2-D undecimated (a trous) wavelet transform with periodic boundaries.
/// Level l (1-based) dilates the filters by 2^(l-1). Output per band image: the scaling
/// subband followed by three detail subbands per level, finest level first.
class Udwt {
 public:
  Udwt(std::size_t rows, std::size_t cols, WaveletFilterPair filters = WaveletFilterPair::daubechies8())
      : rows_(rows), cols_(cols), f_(std::move(filters)) {
    if (f_.levels < 1) throw ConfigError("Udwt: levels must be >= 1");
    const std::size_t min_dim = std::size_t{1} << (f_.levels - 1);
    if (rows_ < min_dim || cols_ < min_dim) {
      throw DimensionError("Udwt: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                           " too small for " + std::to_string(f_.levels) + " levels (need >= " +
                           std::to_string(min_dim) + ")");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int levels() const { return f_.levels; }
  std::size_t subbands() const { return 1 + 3 * static_cast<std::size_t>(f_.levels); }
  std::size_t block() const { return rows_ * cols_; }
  std::size_t coef_size() const { return subbands() * block(); }
  const WaveletFilterPair& filters() const { return f_; }

  void analyze(std::span<const double> band, std::span<double> out) const {
    if (band.size() != block() || out.size() != coef_size()) throw DimensionError("Udwt::analyze: size mismatch");
    const double s = kScale;
    std::vector<double> a(band.begin(), band.end());
    std::vector<double> row_lo(block()), row_hi(block());
    for (int lev = 1; lev <= f_.levels; ++lev) {
      const std::size_t d = std::size_t{1} << (lev - 1);
      detail::filter_cols(a.data(), row_lo.data(), rows_, cols_, f_.lowpass, s, d, false, false);
      detail::filter_cols(a.data(), row_hi.data(), rows_, cols_, f_.highpass, s, d, false, false);
      detail::filter_rows(row_hi.data(), sub(out, lev, 0), rows_, cols_, f_.lowpass, s, d, false, false);
      detail::filter_rows(row_lo.data(), sub(out, lev, 1), rows_, cols_, f_.highpass, s, d, false, false);
      detail::filter_rows(row_hi.data(), sub(out, lev, 2), rows_, cols_, f_.highpass, s, d, false, false);
      detail::filter_rows(row_lo.data(), a.data(), rows_, cols_, f_.lowpass, s, d, false, false);
    }
    std::copy(a.begin(), a.end(), out.begin());
  }

  /// Dual-frame synthesis: the left inverse of analyze().
  void synthesize(std::span<const double> coefs, std::span<double> band) const {
    reconstruct(coefs, band, f_.dual_lowpass, f_.dual_highpass);
  }

  /// Transpose of analyze(). Equals synthesize() for orthonormal banks.
  void adjoint(std::span<const double> coefs, std::span<double> band) const {
    reconstruct(coefs, band, f_.lowpass, f_.highpass);
  }

 private:
  static constexpr double kScale = 0.70710678118654752440;

  double* sub(std::span<double> out, int level, int orientation) const {
    return out.data() + (1 + static_cast<std::size_t>((level - 1) * 3 + orientation)) * block();
  }
  const double* sub(std::span<const double> in, int level, int orientation) const {
    return in.data() + (1 + static_cast<std::size_t>((level - 1) * 3 + orientation)) * block();
  }

  void reconstruct(std::span<const double> coefs, std::span<double> band, const Filter& lo,
                   const Filter& hi) const {
    if (band.size() != block() || coefs.size() != coef_size()) {
      throw DimensionError("Udwt: synthesis size mismatch");
    }
    const double s = kScale;
    std::vector<double> a(coefs.begin(), coefs.begin() + static_cast<std::ptrdiff_t>(block()));
    std::vector<double> row_lo(block()), row_hi(block());
    for (int lev = f_.levels; lev >= 1; --lev) {
      const std::size_t d = std::size_t{1} << (lev - 1);
      detail::filter_rows(a.data(), row_lo.data(), rows_, cols_, lo, s, d, true, false);
      detail::filter_rows(sub(coefs, lev, 1), row_lo.data(), rows_, cols_, hi, s, d, true, true);
      detail::filter_rows(sub(coefs, lev, 0), row_hi.data(), rows_, cols_, lo, s, d, true, false);
      detail::filter_rows(sub(coefs, lev, 2), row_hi.data(), rows_, cols_, hi, s, d, true, true);
      detail::filter_cols(row_lo.data(), a.data(), rows_, cols_, lo, s, d, true, false);
      detail::filter_cols(row_hi.data(), a.data(), rows_, cols_, hi, s, d, true, true);
    }
    std::copy(a.begin(), a.end(), band.begin());
  }

  std::size_t rows_;
  std::size_t cols_;
  WaveletFilterPair f_;
};

inline void WaveletFilterPair::validate() const {
  if (levels < 1) throw ConfigError("wavelet filter pair: levels must be >= 1");
  WaveletFilterPair one = *this;
  one.levels = 1;
  const std::size_t n = 64;
  Udwt t(1, n, one);
  RandomStream rng(0, "wavelet-validate");
  std::vector<double> x(n), c(t.coef_size()), r(n);
  for (double& v : x) v = rng.normal();
  t.analyze(x, c);
  t.synthesize(c, r);
  double e2 = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e2 += (x[i] - r[i]) * (x[i] - r[i]);
    x2 += x[i] * x[i];
  }
  if (!(std::sqrt(e2 / x2) <= 1e-10)) {
    throw ConfigError("wavelet filter pair does not reconstruct perfectly (relative error " +
                      std::to_string(std::sqrt(e2 / x2)) + ")");
  }
}

/// Ten subbands (for 3 levels) of one band image, stacked as described on Udwt.
inline std::vector<double> udwt_analyze(const Image& band,
                                        const WaveletFilterPair& filters = WaveletFilterPair::daubechies8()) {
  Udwt t(band.rows(), band.cols(), filters);
  std::vector<double> out(t.coef_size());
  t.analyze(band.values(), out);
  return out;
}

inline Image udwt_synthesize(std::span<const double> coefs, std::size_t rows, std::size_t cols,
                             const WaveletFilterPair& filters = WaveletFilterPair::daubechies8()) {
  Udwt t(rows, cols, filters);
  Image out(rows, cols);
  t.synthesize(coefs, out.values());
  return out;
}

}  // namespace hsi
