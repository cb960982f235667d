#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsi/error.hpp"

namespace hsi {

/// Dense 2-D array of doubles, row-major. Used for FPA images and single bands.
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}
  Image(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != checked_size(rows, cols)) {
      throw DimensionError("Image: data length " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator[](std::size_t p) { return data_[p]; }
  double operator[](std::size_t p) const { return data_[p]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool same_shape(const Image& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator==(const Image&) const = default;

 private:
  static std::size_t checked_size(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw DimensionError("Image: dimensions must be >= 1");
    return rows * cols;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using FpaImage = Image;

/// Hyperspectral volume, band-sequential: band slowest, then row, then column.
class HyperCube {
 public:
  HyperCube() = default;
  HyperCube(std::size_t rows, std::size_t cols, std::size_t bands, double fill = 0.0)
      : rows_(rows), cols_(cols), bands_(bands), data_(checked_size(rows, cols, bands), fill) {}
  HyperCube(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<double> data)
      : rows_(rows), cols_(cols), bands_(bands), data_(std::move(data)) {
    if (data_.size() != checked_size(rows, cols, bands)) {
      throw DimensionError("HyperCube: data length " + std::to_string(data_.size()) +
                           " does not match " + shape_string());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t bands() const { return bands_; }
  std::size_t band_size() const { return rows_ * cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t b) {
    return data_[(b * rows_ + i) * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t b) const {
    return data_[(b * rows_ + i) * cols_ + j];
  }
  double& operator[](std::size_t p) { return data_[p]; }
  double operator[](std::size_t p) const { return data_[p]; }

  std::span<double> band(std::size_t b) {
    return std::span<double>(data_).subspan(b * band_size(), band_size());
  }
  std::span<const double> band(std::size_t b) const {
    return std::span<const double>(data_).subspan(b * band_size(), band_size());
  }
  Image band_image(std::size_t b) const {
    auto s = band(b);
    return Image(rows_, cols_, std::vector<double>(s.begin(), s.end()));
  }
  void set_band(std::size_t b, const Image& img) {
    if (img.rows() != rows_ || img.cols() != cols_) throw DimensionError("set_band: shape mismatch");
    std::copy(img.storage().begin(), img.storage().end(), band(b).begin());
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool same_shape(const HyperCube& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && bands_ == o.bands_;
  }
  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_) + "x" + std::to_string(bands_);
  }
  bool operator==(const HyperCube&) const = default;

 private:
  static std::size_t checked_size(std::size_t rows, std::size_t cols, std::size_t bands) {
    if (rows == 0 || cols == 0 || bands == 0) throw DimensionError("HyperCube: dimensions must be >= 1");
    return rows * cols * bands;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> data_;
};

/// Position of one subband inside a coefficient vector.
struct SubbandInfo {
  std::size_t spectral_index;
  int level;        // 0 for the scaling subband, 1..levels for details
  int orientation;  // -1 for scaling; 0 = (low rows, high cols), 1 = (high rows, low cols), 2 = (high, high)
  std::size_t offset;
  std::size_t length;
};

/// Describes how a coefficient vector is partitioned. Spectral index slowest, then
/// subband (scaling first, then details by level, then orientation), then row-major space.
struct SubbandMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  int levels = 0;

  std::size_t subbands_per_band() const { return 1 + 3 * static_cast<std::size_t>(levels); }
  std::size_t block_size() const { return rows * cols; }
  std::size_t total() const { return subbands_per_band() * block_size() * bands; }
  std::size_t offset(std::size_t spectral, std::size_t subband) const {
    return (spectral * subbands_per_band() + subband) * block_size();
  }

  std::vector<SubbandInfo> entries() const {
    std::vector<SubbandInfo> out;
    for (std::size_t b = 0; b < bands; ++b) {
      out.push_back({b, 0, -1, offset(b, 0), block_size()});
      for (int lev = 1; lev <= levels; ++lev) {
        for (int o = 0; o < 3; ++o) {
          std::size_t s = 1 + static_cast<std::size_t>((lev - 1) * 3 + o);
          out.push_back({b, lev, o, offset(b, s), block_size()});
        }
      }
    }
    return out;
  }
  bool operator==(const SubbandMap&) const = default;
};

/// Analysis coefficients alpha = A x together with their subband map.
struct CoefVector {
  std::vector<double> values;
  SubbandMap map;

  std::size_t size() const { return values.size(); }
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

}  // namespace hsi
