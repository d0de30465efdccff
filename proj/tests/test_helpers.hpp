#pragma once

#include <array>
#include <complex>

#include <gtest/gtest.h>

#include "gqclock/qops.hpp"
#include "oracles.hpp"

namespace testing_helpers {

inline gqclock::PairState pair_from(const oracle::Ket4& k,
                                    gqclock::Basis basis = gqclock::Basis::computational) {
  gqclock::PairState::Amplitudes a;
  a << k[0], k[1], k[2], k[3];
  return gqclock::PairState(a, basis);
}

inline gqclock::QubitState qubit_from(const oracle::Ket2& k,
                                      gqclock::Basis basis = gqclock::Basis::computational) {
  return gqclock::QubitState(Eigen::Vector2cd(k[0], k[1]), basis);
}

inline void expect_amplitudes(const gqclock::PairState& s, const oracle::Ket4& expected,
                              double tol = 1e-12) {
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(s[i].real(), expected[static_cast<std::size_t>(i)].real(), tol) << "index " << i;
    EXPECT_NEAR(s[i].imag(), expected[static_cast<std::size_t>(i)].imag(), tol) << "index " << i;
  }
}

inline void expect_amplitudes(const gqclock::QubitState& s, const oracle::Ket2& expected,
                              double tol = 1e-12) {
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(s[i].real(), expected[static_cast<std::size_t>(i)].real(), tol) << "index " << i;
    EXPECT_NEAR(s[i].imag(), expected[static_cast<std::size_t>(i)].imag(), tol) << "index " << i;
  }
}

// Overlap-based equality up to a global phase.
inline double state_fidelity(const gqclock::QubitState& s, const oracle::Ket2& k) {
  const std::complex<double> o = std::conj(s[0]) * k[0] + std::conj(s[1]) * k[1];
  return std::norm(o) / oracle::norm2(k);
}

}  // namespace testing_helpers
