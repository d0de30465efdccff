#pragma once

// Fisher information of Bob's probe state with respect to the time
// difference delta_p, and the Cramer-Rao precision it implies.
//
// The numerical QFI of the paper-mode probe family is the reference value;
// the known closed form is evaluated verbatim next to it and flagged when
// the two disagree. The closed form goes negative on part of its domain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "gqclock/clock_model.hpp"
#include "gqclock/error.hpp"
#include "gqclock/format.hpp"
#include "gqclock/protocol.hpp"

namespace gqclock {

inline constexpr double kRichardsonTolerance = 1e-6;
inline constexpr double kNonnegativityFloor = -1e-9;
inline constexpr double kDiscrepancyTolerance = 1e-6;

inline double default_qfi_step(const ClockParams& params) {
  return 1e-6 * std::max(1.0, 1.0 / params.eps2);
}

namespace detail {

inline Eigen::Vector2cd probe_state(const ClockParams& params, double delta_p) {
  const BobAmplitudes amp = bob_amplitudes(params, delta_p);
  Eigen::Vector2cd psi(amp.varsigma, amp.kappa);
  return psi / psi.norm();
}

// 4(<dpsi|dpsi> - |<psi|dpsi>|^2) with dpsi = (psi(delta + h) - psi(delta - h)) / 2h.
//
// The difference is assembled without subtracting nearby states: the
// amplitude change uses e^{-i r (delta+h)} - e^{-i r (delta-h)} = -2i sin(r h)
// e^{-i r delta}, and the normalization change uses the difference of squared
// norms. Only the O(h^2) truncation error remains.
inline double central_difference_qfi(const ClockParams& params, double delta_p, double h) {
  const DerivedCouplings c = derived_couplings(params);
  const Complex ea = std::polar(1.0, -params.eps2 * delta_p);
  const Complex eb = std::polar(1.0, -c.eps2_prime * delta_p);
  const Complex w0 = ea + eb;
  const Complex w_up = ea * std::polar(1.0, -params.eps2 * h) + eb * std::polar(1.0, -c.eps2_prime * h);
  const Complex w_dn = ea * std::polar(1.0, params.eps2 * h) + eb * std::polar(1.0, c.eps2_prime * h);
  const Complex dw =
      Complex(0.0, -2.0) * (ea * std::sin(params.eps2 * h) + eb * std::sin(c.eps2_prime * h));

  const double n_up = std::sqrt(8.0 + 2.0 * std::norm(w_up));
  const double n_dn = std::sqrt(8.0 + 2.0 * std::norm(w_dn));
  const double dn2 = 2.0 * std::real(dw * std::conj(w_up + w_dn));  // n_up^2 - n_dn^2
  const double inv_diff = -dn2 / (n_up * n_dn * (n_up + n_dn));    // 1/n_up - 1/n_dn

  const Eigen::Vector2cd u_dn(2.0 + w_dn, 2.0 - w_dn);
  const Eigen::Vector2cd du(dw, -dw);
  const Eigen::Vector2cd dpsi = (du / n_up + u_dn * inv_diff) / (2.0 * h);

  Eigen::Vector2cd psi(2.0 + w0, 2.0 - w0);
  psi /= psi.norm();
  return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

}  // namespace detail

/// Quantum Fisher information of the probe state family at delta_p.
///
/// Evaluated at steps h and h/2; the two must agree to 1e-6 relative
/// (absolute below 1) or NumericalFailure is thrown. Returns the Richardson
/// extrapolation of the pair. A result below -1e-9 is also a failure.
inline double qfi_numerical(const ClockParams& params, double delta_p,
                            std::optional<double> step = std::nullopt) {
  validate(params);
  detail::require(std::isfinite(delta_p), "delta_p must be finite");
  const double h = step.value_or(default_qfi_step(params));
  detail::require(std::isfinite(h) && h > 0.0, "QFI step must be > 0");

  const double coarse = detail::central_difference_qfi(params, delta_p, h);
  const double fine = detail::central_difference_qfi(params, delta_p, h / 2.0);
  if (!std::isfinite(coarse) || !std::isfinite(fine) ||
      std::abs(fine - coarse) > kRichardsonTolerance * std::max(1.0, std::abs(fine))) {
    throw NumericalFailure("QFI finite differences disagree at step " + format_double(h) + ": " +
                           format_double(coarse) + " vs " + format_double(fine));
  }
  const double extrapolated = fine + (fine - coarse) / 3.0;
  if (extrapolated < kNonnegativityFloor) {
    throw NumericalFailure("QFI evaluated to " + format_double(extrapolated));
  }
  return extrapolated;
}

/// The closed form
///   (2 cos(z d) - 1) [(2 eps2^2 - 2 eps2 z) cos(z d) + eps2^2 + (eps2 - z)^2] / (3 + cos(z d))
/// with z = zeta'. No sign correction is applied.
inline double qfi_closed_form(const ClockParams& params, double delta_p) {
  const DerivedCouplings c = derived_couplings(params);
  const double z = c.zeta_prime;
  const double e2 = params.eps2;
  const double cz = std::cos(z * delta_p);
  return (2.0 * cz - 1.0) * ((2.0 * e2 * e2 - 2.0 * e2 * z) * cz + e2 * e2 + (e2 - z) * (e2 - z)) /
         (3.0 + cz);
}

// d P(+) / d delta_p, differentiating the three cosines analytically.
inline double bob_probability_derivative(const ClockParams& params, double delta_p) {
  const DerivedCouplings c = derived_couplings(params);
  const double a = params.eps2 * delta_p;
  const double b = c.eps2_prime * delta_p;
  const double g = c.zeta_prime * delta_p;
  const double s = std::cos(a) + std::cos(b);
  const double ds = -params.eps2 * std::sin(a) - c.eps2_prime * std::sin(b);
  const double d = 3.0 + std::cos(g);
  const double dd = -c.zeta_prime * std::sin(g);
  return (ds * d - s * dd) / (d * d);
}

/// Classical Fisher information of Bob's dual-basis measurement,
/// (P+')^2 / (P+ P-).
///
/// Where P+ or P- vanishes (both branch phases at 0 or both at pi mod 2pi)
/// the removable singularity is replaced by its limit
/// 4 |eps2 e^{-i a} + eps2' e^{-i b}|^2 / (12 + 4 cos(zeta' delta)).
inline double classical_fisher(const ClockParams& params, double delta_p) {
  const BobProbabilities p = bob_probabilities(params, delta_p);
  if (std::min(p.plus, p.minus) < 1e-20) {
    const DerivedCouplings c = derived_couplings(params);
    const Complex rate = params.eps2 * std::polar(1.0, -params.eps2 * delta_p) +
                         c.eps2_prime * std::polar(1.0, -c.eps2_prime * delta_p);
    return 4.0 * std::norm(rate) / (12.0 + 4.0 * std::cos(c.zeta_prime * delta_p));
  }
  const double slope = bob_probability_derivative(params, delta_p);
  return slope * slope / (p.plus * p.minus);
}

/// Cramer-Rao precision 1/sqrt(n F) for n repetitions.
inline double precision_bound(double fisher, std::uint64_t n) {
  detail::require(std::isfinite(fisher) && fisher > 0.0, "Fisher information must be > 0");
  detail::require(n >= 1, "repetition count must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(n) * fisher);
}

struct MetrologyReport {
  double qfi_numerical;
  double qfi_closed_form;
  double classical_fisher;
  double delta_precision;  // 1/sqrt(n F_Q); infinite when F_Q is zero
  bool discrepancy_flag;
  std::uint64_t n;
};

inline bool closed_form_disagrees(double closed_form, double numerical) {
  return std::abs(closed_form - numerical) > kDiscrepancyTolerance * std::max(1.0, numerical);
}

inline MetrologyReport metrology_report(const ClockParams& params, double delta_p,
                                        std::uint64_t n = 1,
                                        std::optional<double> step = std::nullopt) {
  detail::require(n >= 1, "repetition count must be >= 1");
  const double fq = qfi_numerical(params, delta_p, step);
  const double closed = qfi_closed_form(params, delta_p);
  const double fc = classical_fisher(params, delta_p);
  const double precision =
      fq > 0.0 ? precision_bound(fq, n) : std::numeric_limits<double>::infinity();
  return {fq, closed, fc, precision, closed_form_disagrees(closed, fq), n};
}

}  // namespace gqclock
