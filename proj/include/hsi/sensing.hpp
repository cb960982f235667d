#pragma once

#include <cstddef>

#include "hsi/lanczos.hpp"
#include "hsi/layout.hpp"
#include "hsi/volume.hpp"

namespace hsi {

/// Phi = [M_1 Up, ..., M_L Up]: upsample every band to the FPA grid, then keep the
/// pixels whose filter selects that band.
class SensingOperator {
 public:
  SensingOperator(FilterLayout layout, int factor, int lobes = 3)
      : layout_(std::move(layout)), up_(target_spec(layout_, factor, lobes)) {}

  const FilterLayout& layout() const { return layout_; }
  const Upsampler& upsampler() const { return up_; }
  int factor() const { return up_.spec().factor; }
  std::size_t bands() const { return layout_.bands(); }
  std::size_t target_rows() const { return up_.spec().src_rows; }
  std::size_t target_cols() const { return up_.spec().src_cols; }
  std::size_t input_size() const { return target_rows() * target_cols() * bands(); }
  std::size_t output_size() const { return layout_.size(); }

  FpaImage forward(const HyperCube& x) const {
    check_cube(x, "forward");
    FpaImage y(layout_.rows(), layout_.cols(), 0.0);
    for (std::size_t b = 0; b < bands(); ++b) {
      const auto& px = layout_.pixels_of(b);
      if (px.empty()) continue;
      const Image fine = up_.apply(x.band_image(b));
      for (std::size_t p : px) y[p] = fine[p];
    }
    return y;
  }

  HyperCube adjoint(const FpaImage& y) const {
    if (y.rows() != layout_.rows() || y.cols() != layout_.cols()) {
      throw DimensionError("SensingOperator::adjoint: FPA shape mismatch");
    }
    HyperCube x(target_rows(), target_cols(), bands(), 0.0);
    for (std::size_t b = 0; b < bands(); ++b) {
      const auto& px = layout_.pixels_of(b);
      if (px.empty()) continue;
      Image masked(layout_.rows(), layout_.cols(), 0.0);
      for (std::size_t p : px) masked[p] = y[p];
      x.set_band(b, up_.transpose(masked));
    }
    return x;
  }

 private:
  void check_cube(const HyperCube& x, const char* what) const {
    if (x.rows() != target_rows() || x.cols() != target_cols() || x.bands() != bands()) {
      throw DimensionError(std::string("SensingOperator::") + what + ": cube " + x.shape_string() +
                           " does not match " + std::to_string(target_rows()) + "x" +
                           std::to_string(target_cols()) + "x" + std::to_string(bands()));
    }
  }

  static UpsampleSpec target_spec(const FilterLayout& layout, int factor, int lobes) {
    if (factor < 1 || layout.rows() % static_cast<std::size_t>(factor) != 0 ||
        layout.cols() % static_cast<std::size_t>(factor) != 0) {
      throw ConfigError("SensingOperator: FPA " + std::to_string(layout.rows()) + "x" +
                        std::to_string(layout.cols()) + " not divisible by factor " +
                        std::to_string(factor));
    }
    const auto f = static_cast<std::size_t>(factor);
    return UpsampleSpec::from_dims(layout.rows() / f, layout.cols() / f, layout.rows(), layout.cols(),
                                   lobes);
  }

  FilterLayout layout_;
  Upsampler up_;
};

}  // namespace hsi
