#pragma once

// Maximum-likelihood recovery of delta_p from Bob's outcome counts.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "gqclock/metrology.hpp"
#include "gqclock/protocol.hpp"

namespace gqclock {

struct Window {
  double lo;
  double hi;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// One period of Bob's flat-spacetime oscillation.
inline Window default_window(const ClockParams& params) {
  validate(params);
  return {0.0, 2.0 * std::numbers::pi / params.eps2};
}

struct EstimatorOptions {
  std::size_t grid_points = 4096;
  double relative_tolerance = 1e-10;  // golden-section stop, relative to the window length
};

struct EstimateReport {
  double delta_hat;
  Window window;
  double log_likelihood;
  double stderr_cr;  // 1/sqrt(n F_c(delta_hat)); infinite when F_c vanishes there
  double grid_step;
};

inline constexpr double kLogClamp = 1e-300;

// k ln P+(delta) + (n - k) ln P-(delta), probabilities clamped at 1e-300.
inline double log_likelihood(const MeasurementRecord& rec, const ClockParams& params,
                             double delta_p) {
  const BobProbabilities p = bob_probabilities(params, delta_p);
  const double k = static_cast<double>(rec.k_plus);
  const double rest = static_cast<double>(rec.n - rec.k_plus);
  double value = 0.0;
  if (rec.k_plus > 0) value += k * std::log(std::max(p.plus, kLogClamp));
  if (rec.n > rec.k_plus) value += rest * std::log(std::max(p.minus, kLogClamp));
  return value;
}

/// Uniform grid scan of the log-likelihood over `window`, then golden-section
/// refinement inside the bracket around the best grid point. Ties go to the
/// smallest delta; the refined point replaces the grid point only if it is
/// strictly better.
inline EstimateReport estimate_delta(const MeasurementRecord& rec, const ClockParams& params,
                                     Window window, const EstimatorOptions& options = {}) {
  validate(params);
  detail::require(std::isfinite(window.lo) && std::isfinite(window.hi) && window.length() > 0.0,
                  "estimation window must have positive length");
  detail::require(rec.n > 0, "measurement record is empty");
  detail::require(rec.k_plus <= rec.n, "k_plus exceeds n");
  detail::require(options.grid_points >= 3, "estimator grid needs at least 3 points");
  detail::require(options.relative_tolerance > 0.0, "estimator tolerance must be > 0");

  const std::size_t m = options.grid_points;
  const double step = window.length() / static_cast<double>(m - 1);
  auto grid_at = [&](std::size_t i) {
    return i + 1 == m ? window.hi : window.lo + static_cast<double>(i) * step;
  };

  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  double worst_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double value = log_likelihood(rec, params, grid_at(i));
    if (value > best_value) {
      best_value = value;
      best = i;
    }
    worst_value = std::min(worst_value, value);
  }
  if (!(best_value > worst_value)) {
    throw NumericalFailure("log-likelihood is flat over the estimation window");
  }

  double lo = grid_at(best == 0 ? 0 : best - 1);
  double hi = grid_at(best + 1 == m ? m - 1 : best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tolerance = options.relative_tolerance * window.length();
  auto f = [&](double x) { return log_likelihood(rec, params, x); };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tolerance) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double delta_hat = grid_at(best);
  const double refined = 0.5 * (lo + hi);
  const double refined_value = f(refined);
  if (refined_value > best_value) {
    delta_hat = refined;
    best_value = refined_value;
  }

  const double fc = classical_fisher(params, delta_hat);
  const double stderr_cr = fc > 0.0 ? precision_bound(fc, rec.n)
                                    : std::numeric_limits<double>::infinity();
  return {delta_hat, window, best_value, stderr_cr, step};
}

}  // namespace gqclock
