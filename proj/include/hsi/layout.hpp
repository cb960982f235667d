#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hsi/volume.hpp"

namespace hsi {

/// Per-pixel wavelength assignment of the FPA. Band indices are zero-based in memory.
class FilterLayout {
 public:
  FilterLayout() = default;
  FilterLayout(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<std::uint16_t> assignment,
               std::string kind = "custom", std::uint64_t seed = 0)
      : rows_(rows), cols_(cols), bands_(bands), assignment_(std::move(assignment)),
        kind_(std::move(kind)), seed_(seed) {
    if (rows_ == 0 || cols_ == 0 || bands_ == 0) throw DimensionError("FilterLayout: empty dimensions");
    if (bands_ > 65535) throw DimensionError("FilterLayout: too many bands");
    if (assignment_.size() != rows_ * cols_) throw DimensionError("FilterLayout: assignment length mismatch");
    pixels_.assign(bands_, {});
    for (std::size_t p = 0; p < assignment_.size(); ++p) {
      if (assignment_[p] >= bands_) {
        throw DimensionError("FilterLayout: pixel " + std::to_string(p) + " has band index " +
                             std::to_string(assignment_[p]) + " >= " + std::to_string(bands_));
      }
      pixels_[assignment_[p]].push_back(p);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t bands() const { return bands_; }
  std::size_t size() const { return assignment_.size(); }
  const std::string& kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t band_at(std::size_t i, std::size_t j) const { return assignment_[i * cols_ + j]; }
  std::size_t band_at(std::size_t p) const { return assignment_[p]; }
  const std::vector<std::uint16_t>& assignment() const { return assignment_; }

  /// Flat pixel indices carrying band b, ascending.
  const std::vector<std::size_t>& pixels_of(std::size_t b) const { return pixels_.at(b); }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> c;
    for (const auto& px : pixels_) c.push_back(px.size());
    return c;
  }

  bool operator==(const FilterLayout& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && bands_ == o.bands_ && assignment_ == o.assignment_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t bands_ = 0;
  std::vector<std::uint16_t> assignment_;
  std::vector<std::vector<std::size_t>> pixels_;
  std::string kind_;
  std::uint64_t seed_ = 0;
};

/// M_b y: keeps the pixels of band b, zeroes the rest.
inline FpaImage apply_mask(std::size_t band, const FpaImage& fpa, const FilterLayout& layout) {
  if (band >= layout.bands()) {
    throw DimensionError("apply_mask: band " + std::to_string(band) + " out of range [0," +
                         std::to_string(layout.bands()) + ")");
  }
  if (fpa.rows() != layout.rows() || fpa.cols() != layout.cols()) {
    throw DimensionError("apply_mask: image and layout shapes differ");
  }
  FpaImage out(fpa.rows(), fpa.cols(), 0.0);
  for (std::size_t p : layout.pixels_of(band)) out[p] = fpa[p];
  return out;
}

}  // namespace hsi
