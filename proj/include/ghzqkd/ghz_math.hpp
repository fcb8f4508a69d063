#pragma once

// Closed-form expectation values for the GHZ family and the arithmetic built
// on them: the super-classical test, outcome prediction, Bob's phase solver
// and menu scoring.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "ghz_spec.hpp"
#include "quantum.hpp"

namespace ghzqkd {

inline constexpr double kDefaultAngleTolerance = 1e-9;

/// Deterministic outcome product in the super-classical regime.
enum class Parity : int { Plus = 1, Minus = -1 };

constexpr int sign_of(Parity p) noexcept { return static_cast<int>(p); }
constexpr Parity parity_from_sign(int s) noexcept { return s > 0 ? Parity::Plus : Parity::Minus; }
constexpr Parity operator-(Parity p) noexcept { return p == Parity::Plus ? Parity::Minus : Parity::Plus; }

/// Three phase angles, each kept in [0, 2pi).
struct PhaseTriple {
  std::array<double, 3> values{};

  PhaseTriple() = default;
  PhaseTriple(double a, double b, double c)
      : values{normalize_angle(a), normalize_angle(b), normalize_angle(c)} {}
  explicit PhaseTriple(const std::array<double, 3>& v) : PhaseTriple(v[0], v[1], v[2]) {}

  double operator[](std::size_t i) const { return values[i]; }
};

/// Bob's three public angles for Method 1.
class AngleMenu {
 public:
  explicit AngleMenu(std::array<double, 3> angles) {
    for (auto& a : angles) a = normalize_angle(a);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        if (std::abs(angles[i] - angles[j]) <= kDefaultAngleTolerance) {
          throw ConfigError("menu angles must be pairwise distinct");
        }
    angles_ = angles;
  }

  const std::array<double, 3>& angles() const noexcept { return angles_; }
  double operator[](std::size_t i) const { return angles_.at(i); }

 private:
  std::array<double, 3> angles_{};
};

/// s1 phi1 + s2 phi2 + s3 phi3 for the canonical pattern.
inline double signed_phase_sum(const GhzSpec& spec, const PhaseTriple& phases) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += spec.sign(i) * phases[i];
  return s;
}

/// eta * cos(s1 phi1 + s2 phi2 + s3 phi3). Valid for equatorial spin settings
/// (theta = pi/2) and for retarded analyzers at theta = pi/4.
inline double analytic_expectation(const GhzSpec& spec, const PhaseTriple& phases) {
  return spec.phase() * std::cos(signed_phase_sum(spec, phases));
}

/// Parity when the signed sum is 0 or pi (mod 2pi) within `tol`, else empty.
inline std::optional<Parity> is_super_classical(const GhzSpec& spec, const PhaseTriple& phases,
                                                double tol = kDefaultAngleTolerance) {
  if (tol < 0.0) throw PreconditionViolated("angle tolerance must be non-negative");
  const double r = normalize_angle(signed_phase_sum(spec, phases));
  if (std::min(r, kTwoPi - r) <= tol) return parity_from_sign(spec.phase());
  if (std::abs(r - kPi) <= tol) return parity_from_sign(-spec.phase());
  return std::nullopt;
}

/// The four outcome triples whose product equals `parity`.
inline std::array<OutcomeTriple, 4> compatible_outcomes(Parity parity) {
  std::array<OutcomeTriple, 4> out{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto t = JointDistribution::triple_at(i);
    if (product(t) == sign_of(parity)) out[n++] = t;
  }
  return out;
}

struct KnownOutcome {
  std::size_t position;  ///< 1..3
  Outcome value;
};

/// Third outcome forced by the parity once two are known.
inline Outcome predict_third(Parity parity, KnownOutcome first, KnownOutcome second) {
  if (first.position < 1 || first.position > 3 || second.position < 1 || second.position > 3 ||
      first.position == second.position) {
    throw PreconditionViolated("predict_third needs two distinct positions in 1..3");
  }
  return outcome_from_sign(sign_of(parity) * sign_of(first.value) * sign_of(second.value));
}

/// Bob's angle in [0, 2pi) that makes (phi_a, phi_b, phi_c) super-classical
/// with the requested parity.
inline double solve_bob_phase(const GhzSpec& spec, double phi_a, double phi_c, Parity target) {
  const double sum_target = sign_of(target) == spec.phase() ? 0.0 : kPi;
  const double rest = sum_target - spec.sign(0) * phi_a - spec.sign(2) * phi_c;
  return normalize_angle(spec.sign(1) * rest);
}

/// The ordered menu triples that pass the super-classical test.
inline std::vector<PhaseTriple> super_classical_triples(const AngleMenu& menu, const GhzSpec& spec,
                                                        double tol = kDefaultAngleTolerance) {
  std::vector<PhaseTriple> out;
  for (double a : menu.angles())
    for (double b : menu.angles())
      for (double c : menu.angles()) {
        PhaseTriple t(a, b, c);
        if (is_super_classical(spec, t, tol)) out.push_back(t);
      }
  return out;
}

/// Fraction of the 27 ordered menu triples that are super-classical.
inline double menu_quality(const AngleMenu& menu, const GhzSpec& spec, double tol = kDefaultAngleTolerance) {
  return static_cast<double>(super_classical_triples(menu, spec, tol).size()) / 27.0;
}

}  // namespace ghzqkd
