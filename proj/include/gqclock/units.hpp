#pragma once

#include <cmath>

#include "gqclock/clock_model.hpp"
#include "gqclock/error.hpp"

namespace gqclock {

struct PhysicalConstants {
  double G;     // m^3 kg^-1 s^-2
  double c;     // m s^-1
  double hbar;  // J s

  static constexpr PhysicalConstants codata2018() {
    return {6.67430e-11, 299792458.0, 1.054571817e-34};
  }
  static constexpr PhysicalConstants natural() { return {1.0, 1.0, 1.0}; }
};

inline void validate(const PhysicalConstants& k) {
  detail::require(std::isfinite(k.G) && k.G > 0.0, "constants.G must be > 0");
  detail::require(std::isfinite(k.c) && k.c > 0.0, "constants.c must be > 0");
  detail::require(std::isfinite(k.hbar) && k.hbar > 0.0, "constants.hbar must be > 0");
}

struct PlanckScales {
  double l_p;  // m
  double t_p;  // s
  double e_p;  // J
};

inline PlanckScales planck_scales(const PhysicalConstants& k) {
  validate(k);
  const double l_p = std::sqrt(k.hbar * k.G / (k.c * k.c * k.c));
  const double t_p = l_p / k.c;
  return {l_p, t_p, k.hbar / t_p};
}

struct SiClockParams {
  double delta_e1;  // J
  double delta_e2;  // J
  double x;         // m
};

inline void validate(const SiClockParams& si) {
  detail::require(std::isfinite(si.delta_e1) && si.delta_e1 >= 0.0, "delta_e1 must be >= 0");
  detail::require(std::isfinite(si.delta_e2) && si.delta_e2 > 0.0, "delta_e2 must be > 0");
  detail::require(std::isfinite(si.x) && si.x > 0.0, "x must be > 0");
}

inline ClockParams to_dimensionless(const SiClockParams& si, const PhysicalConstants& k) {
  validate(si);
  const PlanckScales s = planck_scales(k);
  ClockParams p{si.delta_e1 / s.e_p, si.delta_e2 / s.e_p, si.x / s.l_p};
  validate(p);
  return p;
}

inline SiClockParams from_dimensionless(const ClockParams& p, const PhysicalConstants& k) {
  validate(p);
  const PlanckScales s = planck_scales(k);
  return {p.eps1 * s.e_p, p.eps2 * s.e_p, p.xi * s.l_p};
}

inline double seconds_to_planck_time(double seconds, const PhysicalConstants& k) {
  return seconds / planck_scales(k).t_p;
}

inline double planck_time_to_seconds(double delta_p, const PhysicalConstants& k) {
  return delta_p * planck_scales(k).t_p;
}

// G * dE1 / (c^4 x); equals eps1/xi in Planck units.
inline double gravity_factor(const SiClockParams& si, const PhysicalConstants& k) {
  validate(si);
  validate(k);
  const double c2 = k.c * k.c;
  return k.G * si.delta_e1 / (c2 * c2 * si.x);
}

}  // namespace gqclock
