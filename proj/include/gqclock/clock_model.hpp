#pragma once

// Two static two-level clocks coupled through their energy-dependent
// gravitational interaction. All quantities are in Planck units: gaps eps1,
// eps2 in units of E_p, separation xi in units of l_p, times in units of t_p.

#include <array>
#include <cmath>

#include "gqclock/qops.hpp"

namespace gqclock {

struct ClockParams {
  double eps1 = 0.0;  // energy gap of clock A; 0 switches the coupling off
  double eps2 = 1.0;  // energy gap of clock B
  double xi = 1.0;    // separation
};

inline void validate(const ClockParams& p) {
  detail::require(std::isfinite(p.eps1) && p.eps1 >= 0.0, "eps1 must be finite and >= 0");
  detail::require(std::isfinite(p.eps2) && p.eps2 > 0.0, "eps2 must be finite and > 0");
  detail::require(std::isfinite(p.xi) && p.xi > 0.0, "xi must be finite and > 0");
}

struct DerivedCouplings {
  double eps2_prime;  // dilated gap of clock B on the |11> branch
  double zeta_prime;  // gravitational coupling eps1*eps2/xi

  // 1/(3 + cos(zeta' delta)); always within [1/4, 1/2].
  double zeta1_of(double delta_p) const { return 1.0 / (3.0 + std::cos(zeta_prime * delta_p)); }
  // Same quantity written with eps1*eps2/xi in Planck form.
  double zeta2_of(double delta_p) const { return zeta1_of(delta_p); }
};

inline DerivedCouplings derived_couplings(const ClockParams& p) {
  validate(p);
  const double zeta_prime = p.eps1 * p.eps2 / p.xi;
  return {p.eps2 * (1.0 - p.eps1 / p.xi), zeta_prime};
}

// Phase accumulated by each of (00, 01, 10, 11) after time t.
inline std::array<double, 4> evolution_phases(const ClockParams& p, double t) {
  const DerivedCouplings c = derived_couplings(p);
  return {0.0, p.eps2 * t, p.eps1 * t, p.eps1 * t + c.eps2_prime * t};
}

/// Joint clock state after time t, starting from |+>|+>:
/// (1/2)(1, e^{-i eps2 t}, e^{-i eps1 t}, e^{-i eps1 t} e^{-i eps2' t}).
inline PairState joint_state(const ClockParams& p, double t) {
  const QubitState plus = QubitState::normalized(Eigen::Vector2cd(1.0, 1.0));
  return apply_diagonal_phases(tensor_product(plus, plus), evolution_phases(p, t));
}

/// Joint density written in the (++, +-, -+, --) basis as (1/16) v v^H with
/// v = (beta, alpha, eta, gamma) built from the four branch phases.
inline DensityMatrix<4> dual_joint_density(const ClockParams& p, double t) {
  const DerivedCouplings c = derived_couplings(p);
  const Complex e1 = std::polar(1.0, -p.eps1 * t);
  const Complex e2 = std::polar(1.0, -p.eps2 * t);
  const Complex e12 = e1 * std::polar(1.0, -c.eps2_prime * t);

  const Complex alpha = 1.0 + e1 - e2 - e12;
  const Complex beta = 1.0 + e1 + e2 + e12;
  const Complex eta = 1.0 - e1 + e2 - e12;
  const Complex gamma = 1.0 - e1 - e2 + e12;

  Eigen::Vector4cd v;
  v << beta, alpha, eta, gamma;
  return DensityMatrix<4>(v * v.adjoint() / 16.0, Basis::dual);
}

// |sin(zeta' t / 2)|, the concurrence of joint_state(p, t).
inline double concurrence_closed_form(const ClockParams& p, double t) {
  return std::abs(std::sin(derived_couplings(p).zeta_prime * t / 2.0));
}

}  // namespace gqclock
