#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsi/dictionary.hpp"
#include "hsi/sensing.hpp"
#include "hsi/volume.hpp"

namespace hsi {

enum class KScheduleShape { linear, geometric };

struct PihtConfig {
  int iterations = 200;
  /// Upper bound of the feasible intensity range; defaults to max(y).
  std::optional<double> x_max;
  /// Explicit sparsity levels; when unset they follow the log-magnitude heuristic on A x0.
  std::optional<std::size_t> k_initial;
  std::optional<std::size_t> k_final;
  KScheduleShape shape = KScheduleShape::linear;
  /// Stop once |y - Phi x| <= residual_tolerance * |y| (or tau signals convergence) and
  /// the update moved x by at most residual_tolerance * |x|.
  double residual_tolerance = 1e-12;
  /// When false the loop always runs the full iteration count.
  bool stop_on_convergence = true;
  /// Called with (s, x^{s+1}) after every iteration.
  std::function<void(int, const HyperCube&)> observer;
};

struct ReconstructionReport {
  HyperCube cube;
  std::vector<double> residuals;  // |y - Phi x^s|
  std::vector<double> taus;
  std::vector<std::size_t> ks;
  double seconds = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct StepSize {
  double tau = 0.0;
  bool converged = false;
};

namespace detail {

struct GradientStep {
  StepSize step;
  HyperCube gradient;  // Phi^* r
};

inline GradientStep gradient_step(const SensingOperator& phi, const FpaImage& residual) {
  GradientStep g{{}, phi.adjoint(residual)};
  const double num = dot(g.gradient.values(), g.gradient.values());
  if (num == 0.0) {
    g.step = {0.0, true};
    return g;
  }
  const FpaImage pg = phi.forward(g.gradient);
  const double den = dot(pg.values(), pg.values());
  if (den == 0.0) {
    g.step = {0.0, true};
    return g;
  }
  g.step = {num / den, false};
  return g;
}

}  // namespace detail

/// tau = |Phi^* r|^2 / |Phi Phi^* r|^2, the exact minimizer of |r - tau Phi Phi^* r|.
inline StepSize step_size(const SensingOperator& phi, const FpaImage& residual) {
  return detail::gradient_step(phi, residual).step;
}

/// Magnitudes at or below this fraction of max |alpha| are rounding residue and count as zero.
inline constexpr double kRelativeZero = 1e-12;

/// Counts of coefficients whose log-magnitude exceeds mean + 2.5 sd and mean + 1 sd,
/// statistics taken over the nonzero entries. Population standard deviation.
struct ThresholdCounts {
  std::size_t k_initial = 0;
  std::size_t k_final = 0;
};

inline ThresholdCounts log_magnitude_counts(std::span<const double> alpha) {
  std::vector<double> logs;
  logs.reserve(alpha.size());
  double amax = 0.0;
  for (double v : alpha) amax = std::max(amax, std::abs(v));
  const double zero_floor = kRelativeZero * amax;
  for (double v : alpha) {
    if (std::abs(v) > zero_floor) logs.push_back(std::log(std::abs(v)));
  }
  if (logs.empty()) throw NumericalError("k_schedule: all coefficients are zero");
  double mean = 0.0;
  for (double l : logs) mean += l;
  mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double l : logs) var += (l - mean) * (l - mean);
  const double sd = std::sqrt(var / static_cast<double>(logs.size()));
  ThresholdCounts c;
  for (double l : logs) {
    if (l > mean + 2.5 * sd) ++c.k_initial;
    if (l > mean + sd) ++c.k_final;
  }
  return c;
}

/// K^1..K^S, nondecreasing from K^0 to K^S; both endpoints are clamped to >= 1.
inline std::vector<std::size_t> k_schedule(std::size_t k_initial, std::size_t k_final, int iterations,
                                           KScheduleShape shape = KScheduleShape::linear) {
  if (iterations < 1) throw ConfigError("k_schedule: iteration count must be >= 1");
  k_initial = std::max<std::size_t>(k_initial, 1);
  k_final = std::max(k_final, k_initial);
  std::vector<std::size_t> ks(static_cast<std::size_t>(iterations));
  if (iterations == 1) {
    ks[0] = k_final;
    return ks;
  }
  const double k0 = static_cast<double>(k_initial);
  const double k1 = static_cast<double>(k_final);
  for (int s = 1; s <= iterations; ++s) {
    const double t = static_cast<double>(s - 1) / static_cast<double>(iterations - 1);
    const double k = shape == KScheduleShape::linear ? k0 + t * (k1 - k0) : k0 * std::pow(k1 / k0, t);
    ks[static_cast<std::size_t>(s - 1)] = static_cast<std::size_t>(std::llround(k));
  }
  // rounding of the geometric form can overshoot by one ulp-sized step
  for (std::size_t i = 1; i < ks.size(); ++i) ks[i] = std::clamp(ks[i], ks[i - 1], k_final);
  return ks;
}

inline std::vector<std::size_t> k_schedule(const CoefVector& alpha0, int iterations,
                                           KScheduleShape shape = KScheduleShape::linear) {
  const ThresholdCounts c = log_magnitude_counts(alpha0.values);
  return k_schedule(c.k_initial, c.k_final, iterations, shape);
}

/// Pseudo-inverse iterative hard thresholding:
///   x^{s+1} = clamp_[0, x_max]( A^+ H_{K^s}( A (x^s + tau^s Phi^*(y - Phi x^s)) ) ).
inline ReconstructionReport piht(const SensingOperator& phi, const AnalysisDictionary& dict,
                                 const FpaImage& y, const HyperCube& x0, const PihtConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.iterations < 1) throw ConfigError("piht: iteration count must be >= 1");
  if (y.rows() != phi.layout().rows() || y.cols() != phi.layout().cols()) {
    throw DimensionError("piht: FPA shape does not match the sensing operator");
  }
  if (x0.rows() != phi.target_rows() || x0.cols() != phi.target_cols() || x0.bands() != phi.bands()) {
    throw DimensionError("piht: initial cube " + x0.shape_string() + " does not match the sensing operator");
  }
  if (dict.rows() != x0.rows() || dict.cols() != x0.cols() || dict.bands() != x0.bands()) {
    throw DimensionError("piht: dictionary shape does not match the initial cube");
  }

  double x_max = 0.0;
  if (cfg.x_max) {
    x_max = *cfg.x_max;
  } else {
    for (double v : y.values()) x_max = std::max(x_max, v);
  }
  if (!(x_max >= 0.0)) throw ConfigError("piht: x_max must be >= 0");

  std::vector<std::size_t> ks;
  const std::size_t P = dict.coef_size();
  if (cfg.k_initial || cfg.k_final) {
    const std::size_t k0 = std::min(cfg.k_initial.value_or(cfg.k_final.value_or(0)), P);
    const std::size_t k1 = std::min(cfg.k_final.value_or(k0), P);
    if (k0 > k1) throw ConfigError("piht: K^0 must not exceed K^S");
    ks = k_schedule(k0, k1, cfg.iterations, cfg.shape);
    if (k0 == 0) ks.assign(ks.size(), 0);
  } else {
    const CoefVector alpha0 = dict.analyze(x0);
    const bool all_zero = std::all_of(alpha0.values.begin(), alpha0.values.end(), [](double v) { return v == 0.0; });
    if (all_zero) ks.assign(static_cast<std::size_t>(cfg.iterations), P);
    else ks = k_schedule(alpha0, cfg.iterations, cfg.shape);
  }

  const double y_norm = detail::norm2(y.values());
  ReconstructionReport rep;
  HyperCube x = x0;
  for (int s = 1; s <= cfg.iterations; ++s) {
    FpaImage r = phi.forward(x);
    for (std::size_t p = 0; p < r.size(); ++p) r[p] = y[p] - r[p];
    const double rn = detail::norm2(r.values());
    detail::GradientStep g = detail::gradient_step(phi, r);
    const std::size_t k = ks[static_cast<std::size_t>(s - 1)];
    rep.residuals.push_back(rn);
    rep.taus.push_back(g.step.tau);
    rep.ks.push_back(k);
    rep.iterations = s;
    const bool consistent = g.step.converged || rn <= cfg.residual_tolerance * y_norm;
    HyperCube a = std::move(g.gradient);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = x[i] + g.step.tau * a[i];
    HyperCube next = dict.pinv_synthesize(hard_threshold(dict.analyze(a), k));
    double change2 = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double v = next[i];
      if (!std::isfinite(v)) throw NumericalError("piht: non-finite value in iterate " + std::to_string(s));
      next[i] = std::clamp(v, 0.0, x_max);
      change2 += (next[i] - x[i]) * (next[i] - x[i]);
    }
    // A zero residual alone is not convergence: thresholding may still move the iterate.
    const bool stationary =
        std::sqrt(change2) <= cfg.residual_tolerance * std::max(detail::norm2(x.values()), 1e-300) ||
        change2 == 0.0;
    x = std::move(next);
    if (cfg.observer) cfg.observer(s, x);
    if (cfg.stop_on_convergence && consistent && stationary) {
      rep.converged = true;
      break;
    }
  }
  rep.cube = std::move(x);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace hsi
