#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "hsi/volume.hpp"

namespace hsi {

/// Windowed sinc, sinc(x) sinc(x/a) on |x| < a. Integer arguments give exact 0/1.
inline double lanczos_kernel(double x, int lobes) {
  if (x == 0.0) return 1.0;
  const double ax = std::abs(x);
  if (ax >= lobes) return 0.0;
  if (ax == std::floor(ax)) return 0.0;
  const double px = std::numbers::pi * x;
  return lobes * std::sin(px) * std::sin(px / lobes) / (px * px);
}

/// Half-sample symmetric reflection of an arbitrary integer index into [0, n).
inline std::size_t mirror_index(long long i, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long long>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

struct Tap {
  std::size_t index;
  double weight;
};

/// A sparse linear map between 1-D grids stored as per-output tap lists.
class SparseMap1D {
 public:
  SparseMap1D() = default;
  SparseMap1D(std::size_t in_size, std::vector<std::vector<Tap>> rows)
      : in_size_(in_size), rows_(std::move(rows)) {}

  std::size_t in_size() const { return in_size_; }
  std::size_t out_size() const { return rows_.size(); }
  const std::vector<Tap>& taps(std::size_t k) const { return rows_[k]; }

  /// The transpose, with every output row rescaled to unit sum.
  SparseMap1D normalized_transpose() const {
    std::vector<std::vector<Tap>> t(in_size_);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      for (const Tap& tap : rows_[k]) t[tap.index].push_back({k, tap.weight});
    }
    for (auto& row : t) {
      double s = 0.0;
      for (const Tap& tap : row) s += tap.weight;
      if (s == 0.0) throw ConfigError("normalized_transpose: source sample has zero total weight");
      for (Tap& tap : row) tap.weight /= s;
    }
    return SparseMap1D(rows_.size(), std::move(t));
  }

 private:
  std::size_t in_size_ = 0;
  std::vector<std::vector<Tap>> rows_;
};

/// Normalized Lanczos interpolation from n source samples to f*n output samples.
/// Output k sits at source coordinate (k + 0.5)/f - 0.5; borders use half-sample mirroring.
inline SparseMap1D lanczos_map_1d(std::size_t n, int factor, int lobes) {
  std::vector<std::vector<Tap>> rows(n * static_cast<std::size_t>(factor));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double t = (static_cast<double>(k) + 0.5) / factor - 0.5;
    const long long base = static_cast<long long>(std::floor(t));
    std::vector<double> acc(n, 0.0);
    double total = 0.0;
    for (long long m = base - lobes + 1; m <= base + lobes; ++m) {
      const double w = lanczos_kernel(t - static_cast<double>(m), lobes);
      if (w == 0.0) continue;
      acc[mirror_index(m, n)] += w;
      total += w;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (acc[i] != 0.0) rows[k].push_back({i, acc[i] / total});
    }
  }
  return SparseMap1D(n, std::move(rows));
}

/// Source dims, integer upscale factor and kernel size of the operator Up.
struct UpsampleSpec {
  std::size_t src_rows = 0;
  std::size_t src_cols = 0;
  int factor = 1;
  int lobes = 3;

  std::size_t dst_rows() const { return src_rows * static_cast<std::size_t>(factor); }
  std::size_t dst_cols() const { return src_cols * static_cast<std::size_t>(factor); }

  void validate() const {
    if (src_rows == 0 || src_cols == 0) throw DimensionError("UpsampleSpec: empty source grid");
    if (factor != 1 && factor != 2 && factor != 4) {
      throw ConfigError("UpsampleSpec: factor must be 1, 2 or 4 (got " + std::to_string(factor) + ")");
    }
    if (lobes < 1) throw ConfigError("UpsampleSpec: lobes must be >= 1");
  }

  /// Builds the spec relating a target grid to an FPA grid; the ratio must be an integer.
  static UpsampleSpec from_dims(std::size_t src_rows, std::size_t src_cols, std::size_t dst_rows,
                                std::size_t dst_cols, int lobes = 3) {
    if (src_rows == 0 || src_cols == 0 || dst_rows % src_rows != 0 || dst_cols % src_cols != 0 ||
        dst_rows / src_rows != dst_cols / src_cols) {
      throw ConfigError("UpsampleSpec: " + std::to_string(dst_rows) + "x" + std::to_string(dst_cols) +
                        " is not an integer multiple of " + std::to_string(src_rows) + "x" +
                        std::to_string(src_cols));
    }
    UpsampleSpec s{src_rows, src_cols, static_cast<int>(dst_rows / src_rows), lobes};
    s.validate();
    return s;
  }

  /// Same, from a real-valued factor (as typed on a command line).
  static UpsampleSpec from_factor(std::size_t src_rows, std::size_t src_cols, double factor,
                                  int lobes = 3) {
    if (factor != std::floor(factor)) {
      throw ConfigError("UpsampleSpec: non-integer factor " + std::to_string(factor));
    }
    UpsampleSpec s{src_rows, src_cols, static_cast<int>(factor), lobes};
    s.validate();
    return s;
  }
};

namespace detail {

// out(i, k) = sum taps(k) in(i, tap)  -- applied along columns of a rows x in_cols array
inline void map_cols(const SparseMap1D& map, const std::vector<double>& in, std::size_t rows,
                     std::vector<double>& out) {
  const std::size_t ic = map.in_size();
  const std::size_t oc = map.out_size();
  out.assign(rows * oc, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* src = in.data() + i * ic;
    double* dst = out.data() + i * oc;
    for (std::size_t k = 0; k < oc; ++k) {
      double s = 0.0;
      for (const Tap& t : map.taps(k)) s += t.weight * src[t.index];
      dst[k] = s;
    }
  }
}

// out(k, j) = sum taps(k) in(tap, j)
inline void map_rows(const SparseMap1D& map, const std::vector<double>& in, std::size_t cols,
                     std::vector<double>& out) {
  const std::size_t orows = map.out_size();
  out.assign(orows * cols, 0.0);
  for (std::size_t k = 0; k < orows; ++k) {
    double* dst = out.data() + k * cols;
    for (const Tap& t : map.taps(k)) {
      const double* src = in.data() + t.index * cols;
      for (std::size_t j = 0; j < cols; ++j) dst[j] += t.weight * src[j];
    }
  }
}

// transposes of the two maps above
inline void map_cols_t(const SparseMap1D& map, const std::vector<double>& in, std::size_t rows,
                       std::vector<double>& out) {
  const std::size_t ic = map.in_size();
  const std::size_t oc = map.out_size();
  out.assign(rows * ic, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* src = in.data() + i * oc;
    double* dst = out.data() + i * ic;
    for (std::size_t k = 0; k < oc; ++k) {
      for (const Tap& t : map.taps(k)) dst[t.index] += t.weight * src[k];
    }
  }
}

inline void map_rows_t(const SparseMap1D& map, const std::vector<double>& in, std::size_t cols,
                       std::vector<double>& out) {
  out.assign(map.in_size() * cols, 0.0);
  for (std::size_t k = 0; k < map.out_size(); ++k) {
    const double* src = in.data() + k * cols;
    for (const Tap& t : map.taps(k)) {
      double* dst = out.data() + t.index * cols;
      for (std::size_t j = 0; j < cols; ++j) dst[j] += t.weight * src[j];
    }
  }
}

}  // namespace detail

/// Separable 2-D Lanczos upsampling operator Up and its exact transpose.
class Upsampler {
 public:
  Upsampler() = default;
  explicit Upsampler(UpsampleSpec spec) : spec_(spec) {
    spec_.validate();
    rows_ = lanczos_map_1d(spec_.src_rows, spec_.factor, spec_.lobes);
    cols_ = lanczos_map_1d(spec_.src_cols, spec_.factor, spec_.lobes);
  }

  const UpsampleSpec& spec() const { return spec_; }

  Image apply(const Image& src) const {
    if (src.rows() != spec_.src_rows || src.cols() != spec_.src_cols) {
      throw DimensionError("Upsampler::apply: expected " + std::to_string(spec_.src_rows) + "x" +
                           std::to_string(spec_.src_cols));
    }
    std::vector<double> tmp, out;
    detail::map_cols(cols_, src.storage(), spec_.src_rows, tmp);
    detail::map_rows(rows_, tmp, spec_.dst_cols(), out);
    return Image(spec_.dst_rows(), spec_.dst_cols(), std::move(out));
  }

  /// Up^T: scatters every fine-grid sample back with the same weights.
  Image transpose(const Image& dst) const {
    if (dst.rows() != spec_.dst_rows() || dst.cols() != spec_.dst_cols()) {
      throw DimensionError("Upsampler::transpose: expected " + std::to_string(spec_.dst_rows()) + "x" +
                           std::to_string(spec_.dst_cols()));
    }
    std::vector<double> tmp, out;
    detail::map_rows_t(rows_, dst.storage(), spec_.dst_cols(), tmp);
    detail::map_cols_t(cols_, tmp, spec_.src_rows, out);
    return Image(spec_.src_rows, spec_.src_cols, std::move(out));
  }

  const SparseMap1D& row_map() const { return rows_; }
  const SparseMap1D& col_map() const { return cols_; }

 private:
  UpsampleSpec spec_;
  SparseMap1D rows_;
  SparseMap1D cols_;
};

/// Fine-to-coarse resize given by the row-normalized transpose of Up. Maps constants to
/// constants; identity when the factor is 1.
class Downsizer {
 public:
  explicit Downsizer(const Upsampler& up)
      : spec_(up.spec()),
        rows_(up.row_map().normalized_transpose()),
        cols_(up.col_map().normalized_transpose()) {}

  Image apply(const Image& fine) const {
    if (fine.rows() != spec_.dst_rows() || fine.cols() != spec_.dst_cols()) {
      throw DimensionError("Downsizer::apply: shape mismatch");
    }
    std::vector<double> tmp, out;
    detail::map_cols(cols_, fine.storage(), fine.rows(), tmp);
    detail::map_rows(rows_, tmp, spec_.src_cols, out);
    return Image(spec_.src_rows, spec_.src_cols, std::move(out));
  }

  HyperCube apply(const HyperCube& fine) const {
    HyperCube out(spec_.src_rows, spec_.src_cols, fine.bands());
    for (std::size_t b = 0; b < fine.bands(); ++b) out.set_band(b, apply(fine.band_image(b)));
    return out;
  }

 private:
  UpsampleSpec spec_;
  SparseMap1D rows_;
  SparseMap1D cols_;
};

inline Image lanczos_upsample(const Image& band, const UpsampleSpec& spec) {
  return Upsampler(spec).apply(band);
}

}  // namespace hsi
