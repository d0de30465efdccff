#pragma once

// Fixed-dimension (one and two qubit) state algebra.
//
// Two-qubit amplitudes are ordered (00, 01, 10, 11) with qubit A as the
// leading (most significant) index. In the dual basis the same ordering reads
// (++, +-, -+, --). Every formula downstream relies on this ordering.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "gqclock/error.hpp"

namespace gqclock {

using Complex = std::complex<double>;

enum class Basis { computational, dual };

// Single-qubit projective outcomes. zero/one belong to the computational
// basis, plus/minus to the dual basis.
enum class Outcome { zero, one, plus, minus };

enum class Subsystem { first, second };

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kMinConditioningProbability = 1e-15;

inline const char* to_string(Basis basis) {
  return basis == Basis::computational ? "computational" : "dual";
}

inline Basis basis_of(Outcome outcome) {
  return (outcome == Outcome::zero || outcome == Outcome::one) ? Basis::computational
                                                               : Basis::dual;
}

template <int N>
class PureState {
  static_assert(N == 2 || N == 4, "only one- and two-qubit states are supported");

 public:
  using Amplitudes = Eigen::Matrix<Complex, N, 1>;

  // Throws InvalidArgument unless the amplitudes have unit norm.
  explicit PureState(const Amplitudes& amplitudes, Basis basis = Basis::computational)
      : amplitudes_(amplitudes), basis_(basis) {
    const double norm2 = amplitudes_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kExactTolerance) {
      throw InvalidArgument("state is not normalized (squared norm " + std::to_string(norm2) +
                            ")");
    }
  }

  // Rescales `amplitudes` to unit norm. Throws on a zero or non-finite vector.
  static PureState normalized(const Amplitudes& amplitudes, Basis basis = Basis::computational) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidArgument("cannot normalize a zero or non-finite amplitude vector");
    }
    return PureState(amplitudes / norm, basis);
  }

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex operator[](int index) const { return amplitudes_(index); }
  Basis basis() const { return basis_; }
  static constexpr int dimension() { return N; }

 private:
  Amplitudes amplitudes_;
  Basis basis_;
};

using QubitState = PureState<2>;
using PairState = PureState<4>;

template <int N>
class DensityMatrix {
  static_assert(N == 2 || N == 4, "only one- and two-qubit densities are supported");

 public:
  using Entries = Eigen::Matrix<Complex, N, N>;

  // Throws InvalidArgument unless the matrix is Hermitian, has unit trace and
  // no eigenvalue below -1e-10.
  explicit DensityMatrix(const Entries& entries, Basis basis = Basis::computational)
      : entries_(entries), basis_(basis) {
    const double asymmetry = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (!(asymmetry <= kExactTolerance)) throw InvalidArgument("density matrix is not Hermitian");
    if (std::abs(entries_.trace() - Complex(1.0)) > kExactTolerance) {
      throw InvalidArgument("density matrix does not have unit trace");
    }
    const Entries hermitian = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Entries> solver(hermitian, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
      throw InvalidArgument("density matrix is not positive semidefinite");
    }
  }

  const Entries& entries() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }
  Basis basis() const { return basis_; }

  double purity() const { return (entries_ * entries_).trace().real(); }

 private:
  Entries entries_;
  Basis basis_;
};

template <int N>
DensityMatrix<N> projector(const PureState<N>& state) {
  return DensityMatrix<N>(state.amplitudes() * state.amplitudes().adjoint(), state.basis());
}

namespace detail {

inline const Eigen::Matrix2cd& hadamard() {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
  }();
  return h;
}

inline const Eigen::Matrix4cd& hadamard_pair() {
  static const Eigen::Matrix4cd h = [] {
    Eigen::Matrix4cd m;
    const auto& one = hadamard();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = one(i, j) * one;
    return m;
  }();
  return h;
}

template <int N>
const Eigen::Matrix<Complex, N, N>& hadamard_all() {
  if constexpr (N == 2) {
    return hadamard();
  } else {
    return hadamard_pair();
  }
}

// The outcome's single-qubit ket written in `basis`.
inline Eigen::Vector2cd outcome_ket(Outcome outcome, Basis basis) {
  Eigen::Vector2cd ket;
  switch (outcome) {
    case Outcome::zero:
    case Outcome::plus: ket << 1.0, 0.0; break;
    case Outcome::one:
    case Outcome::minus: ket << 0.0, 1.0; break;
  }
  if (basis_of(outcome) != basis) ket = hadamard() * ket;
  return ket;
}

// Re-expresses a state in the requested basis (H is its own inverse).
template <int N>
PureState<N> expressed_in(const PureState<N>& state, Basis basis) {
  if (state.basis() == basis) return state;
  return PureState<N>::normalized(hadamard_all<N>() * state.amplitudes(), basis);
}

}  // namespace detail

// Kronecker product a (x) b, amplitudes (a0b0, a0b1, a1b0, a1b1).
inline PairState tensor_product(const QubitState& a, const QubitState& b) {
  detail::require(a.basis() == b.basis(), "tensor_product: basis labels differ");
  PairState::Amplitudes out;
  out << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
  return PairState::normalized(out, a.basis());
}

// Multiplies amplitude k by exp(-i phases[k]).
inline PairState apply_diagonal_phases(const PairState& state, const std::array<double, 4>& phases) {
  detail::require(state.basis() == Basis::computational,
                  "apply_diagonal_phases: state must be in the computational basis");
  PairState::Amplitudes out;
  for (int k = 0; k < 4; ++k) out(k) = state[k] * std::polar(1.0, -phases[static_cast<std::size_t>(k)]);
  return PairState::normalized(out, Basis::computational);
}

// Hadamard on every qubit: computational -> dual.
template <int N>
PureState<N> to_dual_basis(const PureState<N>& state) {
  detail::require(state.basis() == Basis::computational, "to_dual_basis: state is already dual");
  return detail::expressed_in(state, Basis::dual);
}

// Inverse of to_dual_basis.
template <int N>
PureState<N> from_dual_basis(const PureState<N>& state) {
  detail::require(state.basis() == Basis::dual, "from_dual_basis: state is not dual");
  return detail::expressed_in(state, Basis::computational);
}

struct Conditioned {
  double probability;
  QubitState state;
};

/// Projective measurement of qubit A followed by collapse of qubit B.
///
/// The outcome may belong to either basis; it is projected in the basis the
/// state is labelled with, and the collapsed qubit keeps that label. Throws
/// ImpossibleConditioning when the outcome probability is below 1e-15.
inline Conditioned condition_on_first(const PairState& state, Outcome outcome) {
  const Eigen::Vector2cd bra = detail::outcome_ket(outcome, state.basis());
  Eigen::Vector2cd collapsed;
  for (int k = 0; k < 2; ++k) {
    collapsed(k) = std::conj(bra(0)) * state[k] + std::conj(bra(1)) * state[2 + k];
  }
  const double probability = collapsed.squaredNorm();
  if (!(probability >= kMinConditioningProbability)) {
    throw ImpossibleConditioning("condition_on_first: outcome has probability " +
                                 std::to_string(probability));
  }
  return {probability, QubitState::normalized(collapsed, state.basis())};
}

inline DensityMatrix<2> reduced_density(const PairState& state, Subsystem keep) {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int traced = 0; traced < 2; ++traced) {
        const int row = keep == Subsystem::first ? 2 * i + traced : 2 * traced + i;
        const int col = keep == Subsystem::first ? 2 * j + traced : 2 * traced + j;
        rho(i, j) += state[row] * std::conj(state[col]);
      }
    }
  }
  return DensityMatrix<2>(rho, state.basis());
}

// 2|a00 a11 - a01 a10|. Invariant under H (x) H, so the basis label is irrelevant.
inline double concurrence(const PairState& state) {
  return 2.0 * std::abs(state[0] * state[3] - state[1] * state[2]);
}

struct BinaryProbabilities {
  double first;   // |0> or |+>
  double second;  // |1> or |->
};

// Born probabilities for measuring `state` in `basis`.
inline BinaryProbabilities born_probabilities(const QubitState& state, Basis basis) {
  const QubitState in_basis = detail::expressed_in(state, basis);
  const double p0 = std::norm(in_basis[0]);
  const double p1 = std::norm(in_basis[1]);
  const double total = p0 + p1;
  return {p0 / total, p1 / total};
}

inline double fidelity(const QubitState& a, const QubitState& b) {
  const QubitState b_in_a = detail::expressed_in(b, a.basis());
  return std::norm(a.amplitudes().dot(b_in_a.amplitudes()));
}

}  // namespace gqclock
