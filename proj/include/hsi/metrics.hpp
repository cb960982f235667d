#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "hsi/volume.hpp"

namespace hsi {

/// 20 log10(|ref| / |ref - est|) over two equally sized sample sets.
/// Returns +infinity when the estimate equals the reference exactly.
inline double snr_db(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) throw DimensionError("snr_db: size mismatch");
  double ref2 = 0.0;
  double err2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - estimate[i];
    ref2 += reference[i] * reference[i];
    err2 += e * e;
  }
  if (ref2 == 0.0) throw NumericalError("snr_db: reference has zero norm");
  if (err2 == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ref2 / err2);
}

inline double snr_db(const HyperCube& reference, const HyperCube& estimate) {
  if (!reference.same_shape(estimate)) {
    throw DimensionError("snr_db: " + reference.shape_string() + " vs " + estimate.shape_string());
  }
  return snr_db(reference.values(), estimate.values());
}

/// One SNR per band, same conventions as snr_db.
inline std::vector<double> per_band_snr_db(const HyperCube& reference, const HyperCube& estimate) {
  if (!reference.same_shape(estimate)) {
    throw DimensionError("per_band_snr_db: " + reference.shape_string() + " vs " +
                         estimate.shape_string());
  }
  std::vector<double> out;
  out.reserve(reference.bands());
  for (std::size_t b = 0; b < reference.bands(); ++b) {
    out.push_back(snr_db(reference.band(b), estimate.band(b)));
  }
  return out;
}

}  // namespace hsi
