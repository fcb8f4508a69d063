#pragma once

// Hand-rolled generators and reference computations shared by the suites.
// The references avoid the library's linear algebra on purpose.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <ghzqkd/ghzqkd.hpp>

namespace testing_support {

using cd = std::complex<double>;
using ghzqkd::kPi;
using ghzqkd::kTwoPi;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double angle() { return real(0.0, kTwoPi); }
  int sign() { return (rng() & 1) ? 1 : -1; }
  std::uint8_t bit() { return static_cast<std::uint8_t>(rng() & 1); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng() % n); }
  ghzqkd::GhzSpec spec() { return ghzqkd::GhzSpec({sign(), sign(), sign()}, sign()); }
  ghzqkd::MeasurementMode mode() {
    return (rng() & 1) ? ghzqkd::MeasurementMode::Spin : ghzqkd::MeasurementMode::Polarization;
  }
  ghzqkd::Parity parity() { return sign() > 0 ? ghzqkd::Parity::Plus : ghzqkd::Parity::Minus; }
};

using Mat2 = std::array<std::array<cd, 2>, 2>;
using Mat8 = std::array<std::array<cd, 8>, 8>;

/// Equatorial dichotomic observable cos(a) X + sin(a) Y.
inline Mat2 ref_equatorial(double a) {
  return {{{cd(0, 0), std::polar(1.0, -a)}, {std::polar(1.0, a), cd(0, 0)}}};
}

/// Spin azimuth phi maps to a, retardance delta maps to -delta.
inline Mat2 ref_observable(ghzqkd::MeasurementMode m, double phase) {
  return ref_equatorial(m == ghzqkd::MeasurementMode::Spin ? phase : -phase);
}

inline Mat8 ref_kron(const Mat2& a, const Mat2& b, const Mat2& c) {
  Mat8 out{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      out[i][j] = a[i >> 2][j >> 2] * b[(i >> 1) & 1][(j >> 1) & 1] * c[i & 1][j & 1];
  return out;
}

/// GHZ amplitudes built from the raw pattern, without canonicalization.
inline std::array<cd, 8> ref_ghz(std::array<int, 3> pattern, int phase) {
  int idx = 0;
  for (int s : pattern) idx = idx * 2 + (s > 0 ? 0 : 1);
  std::array<cd, 8> v{};
  v[idx] += 1.0 / std::sqrt(2.0);
  v[7 - idx] += phase / std::sqrt(2.0);
  return v;
}

/// <psi| A (x) B (x) C |psi>, real part, with the imaginary residue returned too.
inline cd ref_expectation(const std::array<cd, 8>& psi, const Mat8& t) {
  cd acc = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) acc += std::conj(psi[i]) * t[i][j] * psi[j];
  return acc;
}

/// A random triple with signed sum pinned to 0 or pi, built without the library solver.
inline ghzqkd::PhaseTriple random_super_classical(Gen& g, const ghzqkd::GhzSpec& spec, double pinned_sum) {
  const double a = g.angle();
  const double c = g.angle();
  const double b = spec.sign(1) * (pinned_sum - spec.sign(0) * a - spec.sign(2) * c);
  return ghzqkd::PhaseTriple(a, b, c);
}

/// Violation probability of intercept-resend at offset `delta` with depolarizing
/// probability p on both transit qubits: E = parity cos^2(delta) (1 - p)^2.
inline double closed_form_violation(double delta, double p) {
  const double c = std::cos(delta);
  return 0.5 * (1.0 - c * c * (1.0 - p) * (1.0 - p));
}

inline bool within_sigmas(double observed, double expected, std::size_t n, double sigmas = 4.0) {
  const double sd = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
  return std::abs(observed - expected) <= sigmas * sd + 1e-12;
}

inline ghzqkd::ProtocolConfig menu_config(std::uint64_t seed) {
  ghzqkd::ProtocolConfig cfg;
  cfg.method = ghzqkd::Method::Method1;
  cfg.menu = ghzqkd::AngleMenu({0.0, kPi / 2.0, kPi});
  cfg.seed = seed;
  return cfg;
}

inline ghzqkd::ProtocolConfig forced_config(std::uint64_t seed) {
  ghzqkd::ProtocolConfig cfg;
  cfg.method = ghzqkd::Method::Method2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace testing_support
