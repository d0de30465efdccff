#pragma once

// One round of the clock-synchronization protocol: Alice measures clock A in
// the dual basis and publishes her outcome, Bob's clock collapses, and Bob's
// dual-basis statistics carry the time difference delta_p.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "gqclock/clock_model.hpp"
#include "gqclock/format.hpp"
#include "gqclock/qops.hpp"

namespace gqclock {

// paper: relative phase e^{-i eps1 delta} on Alice's excited branch is set to
//        one, giving Bob the amplitudes (varsigma, kappa).
// full:  Bob's state is obtained by conditioning the full joint state.
enum class ConditioningMode { paper, full };

enum class AliceOutcome { plus, minus };

inline const char* to_string(ConditioningMode mode) {
  return mode == ConditioningMode::paper ? "paper" : "full";
}

struct ProtocolConfig {
  ClockParams params;
  double delta_p = 0.0;
  ConditioningMode mode = ConditioningMode::paper;
  AliceOutcome alice_outcome = AliceOutcome::plus;
};

namespace detail {

struct BobAmplitudes {
  Complex varsigma;  // coefficient of |+>
  Complex kappa;     // coefficient of |->
};

inline BobAmplitudes bob_amplitudes(const ClockParams& p, double delta_p) {
  const DerivedCouplings c = derived_couplings(p);
  const Complex w = std::polar(1.0, -p.eps2 * delta_p) + std::polar(1.0, -c.eps2_prime * delta_p);
  return {2.0 + w, 2.0 - w};
}

// |varsigma|^2 and |kappa|^2 in half-angle form: free of cancellation near
// the points where either amplitude vanishes.
struct BobWeights {
  double plus;
  double minus;
};

inline BobWeights bob_weights(const ClockParams& p, double delta_p) {
  const DerivedCouplings c = derived_couplings(p);
  const double a = p.eps2 * delta_p;
  const double b = c.eps2_prime * delta_p;
  const double sa = std::sin(a / 2.0), sb = std::sin(b / 2.0);
  const double ca = std::cos(a / 2.0), cb = std::cos(b / 2.0);
  const double im = std::sin(a) + std::sin(b);
  const double re_minus = 2.0 * (sa * sa + sb * sb);  // 2 - cos a - cos b
  const double re_plus = 2.0 * (ca * ca + cb * cb);   // 2 + cos a + cos b
  return {re_plus * re_plus + im * im, re_minus * re_minus + im * im};
}

}  // namespace detail

/// Bob's collapsed clock state (dual basis) and the probability of the
/// conditioning event.
///
/// In paper mode the probability is that of the phase-reduced joint state,
/// (3 + cos(zeta' delta))/4; only Alice's '+' outcome is defined there.
inline Conditioned bob_conditional_state(const ProtocolConfig& cfg) {
  validate(cfg.params);
  detail::require(std::isfinite(cfg.delta_p), "delta_p must be finite");
  if (cfg.mode == ConditioningMode::paper) {
    detail::require(cfg.alice_outcome == AliceOutcome::plus,
                    "paper conditioning mode is defined for Alice's '+' outcome only");
    const detail::BobAmplitudes amp = detail::bob_amplitudes(cfg.params, cfg.delta_p);
    const double norm2 = std::norm(amp.varsigma) + std::norm(amp.kappa);
    return {norm2 / 16.0,
            QubitState::normalized(Eigen::Vector2cd(amp.varsigma, amp.kappa), Basis::dual)};
  }
  const PairState dual = to_dual_basis(joint_state(cfg.params, cfg.delta_p));
  return condition_on_first(
      dual, cfg.alice_outcome == AliceOutcome::plus ? Outcome::plus : Outcome::minus);
}

struct BobProbabilities {
  double plus;
  double minus;
};

/// P(+/-) = 1/2 +/- [cos(eps2 d) + cos((eps2 - zeta') d)] / (3 + cos(zeta' d)).
inline BobProbabilities bob_probabilities(const ClockParams& params, double delta_p) {
  detail::require(std::isfinite(delta_p), "delta_p must be finite");
  const detail::BobWeights w = detail::bob_weights(params, delta_p);
  const double total = w.plus + w.minus;
  return {w.plus / total, w.minus / total};
}

inline double bob_probability(const ClockParams& params, double delta_p, Outcome outcome) {
  detail::require(basis_of(outcome) == Basis::dual, "Bob measures in the dual basis (plus/minus)");
  const BobProbabilities p = bob_probabilities(params, delta_p);
  return outcome == Outcome::plus ? p.plus : p.minus;
}

// Side-by-side view of the two conditioning modes at one parameter point.
struct ModeComparison {
  double paper_conditioning_probability;
  double paper_p_plus;
  double full_conditioning_probability;
  double full_p_plus;
  double state_fidelity;
};

inline ModeComparison compare_modes(const ClockParams& params, double delta_p) {
  const Conditioned paper = bob_conditional_state({params, delta_p, ConditioningMode::paper});
  const Conditioned full = bob_conditional_state({params, delta_p, ConditioningMode::full});
  return {paper.probability, born_probabilities(paper.state, Basis::dual).first, full.probability,
          born_probabilities(full.state, Basis::dual).first, fidelity(paper.state, full.state)};
}

// ---------------------------------------------------------------------------
// Seeded sampling

struct MeasurementRecord {
  std::uint64_t n = 0;
  std::uint64_t k_plus = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replicate r: splitmix64(base_seed XOR splitmix64(r)).
inline std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t replicate) {
  return splitmix64(base_seed ^ splitmix64(replicate));
}

// 53-bit uniform on [0, 1) from a 64-bit Mersenne Twister draw.
inline double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline std::string sampling_hash(const ClockParams& params, double delta_p, std::uint64_t n) {
  return digest("eps1=" + format_double(params.eps1) + ";eps2=" + format_double(params.eps2) +
                ";xi=" + format_double(params.xi) + ";delta_p=" + format_double(delta_p) +
                ";n=" + std::to_string(n));
}

/// n Bernoulli(P+) shots of Bob's dual-basis measurement. Each shot consumes
/// exactly one mt19937_64 draw, so records are bit-reproducible across
/// platforms for a given seed.
inline MeasurementRecord sample_outcomes(const ClockParams& params, double delta_p,
                                         std::uint64_t n, std::uint64_t seed) {
  const double p_plus = bob_probabilities(params, delta_p).plus;
  std::mt19937_64 engine(seed);
  std::uint64_t k = 0;
  for (std::uint64_t shot = 0; shot < n; ++shot) {
    if (uniform_unit(engine) < p_plus) ++k;
  }
  return {n, k, seed, sampling_hash(params, delta_p, n)};
}

}  // namespace gqclock
