#pragma once

// Quantum-channel interference: Eve's strategies and transit noise.

#include <array>
#include <string>
#include <utility>

#include "errors.hpp"
#include "quantum.hpp"
#include "rng.hpp"

namespace ghzqkd {

enum class EveKind { None, InterceptResendA, ImpersonateCharlie };

enum class EveAnglePolicy { GuessFromMenu, FixedAngle, MatchAlice };

struct EveStrategy {
  EveKind kind = EveKind::None;
  EveAnglePolicy policy = EveAnglePolicy::GuessFromMenu;
  double fixed_angle = 0.0;

  static EveStrategy none() { return {}; }
  static EveStrategy intercept_guess() { return {EveKind::InterceptResendA, EveAnglePolicy::GuessFromMenu, 0.0}; }
  static EveStrategy intercept_fixed(double angle) {
    return {EveKind::InterceptResendA, EveAnglePolicy::FixedAngle, normalize_angle(angle)};
  }
  /// Eve measures at Alice's own angle. Not causal: analysis mode only.
  static EveStrategy intercept_match_alice() {
    return {EveKind::InterceptResendA, EveAnglePolicy::MatchAlice, 0.0};
  }
  static EveStrategy impersonate_charlie() { return {EveKind::ImpersonateCharlie, EveAnglePolicy::FixedAngle, 0.0}; }

  bool intercepts() const noexcept { return kind == EveKind::InterceptResendA; }
};

inline std::string to_string(EveKind k) {
  switch (k) {
    case EveKind::None: return "none";
    case EveKind::InterceptResendA: return "intercept-a";
    case EveKind::ImpersonateCharlie: return "impersonate-charlie";
  }
  return "?";
}

enum class NoiseKind { None, Depolarizing };

/// Independent per-qubit transit noise on particles a and c.
struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double p = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel depolarizing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("noise probability must lie in [0, 1]");
    return {NoiseKind::Depolarizing, p};
  }

  double effective_p() const noexcept { return kind == NoiseKind::None ? 0.0 : p; }
};

enum class Pauli { I, X, Y, Z };

inline Operator pauli_matrix(Pauli k) {
  const complex_t i{0.0, 1.0};
  switch (k) {
    case Pauli::I: return Operator::identity(2);
    case Pauli::X: return Operator(2, {0.0, 1.0, 1.0, 0.0});
    case Pauli::Y: return Operator(2, {0.0, -i, i, 0.0});
    case Pauli::Z: return Operator(2, {1.0, 0.0, 0.0, -1.0});
  }
  return Operator::identity(2);
}

/// Kraus branches of the depolarizing channel with their weights. A
/// depolarized qubit gets one of I, X, Y, Z uniformly, which leaves it
/// maximally mixed.
inline std::array<std::pair<Pauli, double>, 4> noise_branches(const NoiseModel& model) {
  const double p = model.effective_p();
  return {{{Pauli::I, 1.0 - 0.75 * p}, {Pauli::X, 0.25 * p}, {Pauli::Y, 0.25 * p}, {Pauli::Z, 0.25 * p}}};
}

/// Samples one channel branch for the transiting qubit.
inline StateVector apply_noise(const StateVector& state, std::size_t qubit, const NoiseModel& model, Rng& rng) {
  if (model.effective_p() == 0.0) return state;
  if (uniform01(rng) >= model.p) return state;
  const auto k = static_cast<Pauli>(uniform_index(rng, 4));
  if (k == Pauli::I) return state;
  return apply_single_qubit(state, qubit, pauli_matrix(k));
}

struct EveRecord {
  double angle = 0.0;
  Outcome outcome = Outcome::Plus;

  friend bool operator==(const EveRecord&, const EveRecord&) = default;
};

struct InterceptResult {
  StateVector state;  ///< Eve's resent qubit a together with the collapsed b, c pair
  EveRecord record;
};

/// Eve measures particle a in transit and forwards a fresh qubit prepared in
/// the eigenstate she observed.
inline InterceptResult eve_intercept_resend(const StateVector& state, const MeasurementSetting& eve_setting,
                                            Rng& rng) {
  MeasurementResult m = measure_single(state, 1, eve_setting, rng);
  return {std::move(m.state), {eve_setting.phase, m.outcome}};
}

}  // namespace ghzqkd
