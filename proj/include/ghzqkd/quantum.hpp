#pragma once

// Exact state-vector engine for one and three qubits.
//
// Basis index convention: qubit 1 is the most significant bit of the 3-bit
// index, and bit value 0 is the |+> (z-up) state. tensor3(a, b, c) therefore
// lines up with particles a, b, c.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "ghz_spec.hpp"
#include "rng.hpp"

namespace ghzqkd {

using complex_t = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kExpectationTolerance = 1e-10;

/// Maps an angle into [0, 2pi).
inline double normalize_angle(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

enum class Outcome : int { Plus = 1, Minus = -1 };

constexpr int sign_of(Outcome o) noexcept { return static_cast<int>(o); }
constexpr Outcome outcome_from_sign(int s) noexcept { return s > 0 ? Outcome::Plus : Outcome::Minus; }
constexpr Outcome flip(Outcome o) noexcept { return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }

using OutcomeTriple = std::array<Outcome, 3>;

constexpr int product(const OutcomeTriple& t) noexcept {
  return sign_of(t[0]) * sign_of(t[1]) * sign_of(t[2]);
}

inline bool is_finite(complex_t z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

class StateVector {
 public:
  StateVector() : StateVector(std::vector<complex_t>{1.0, 0.0}) {}

  explicit StateVector(std::vector<complex_t> amps) : amps_{std::move(amps)} {
    if (amps_.size() != 2 && amps_.size() != 8) {
      throw DimensionMismatch("state dimension must be 2 or 8, got " + std::to_string(amps_.size()));
    }
    if (!std::all_of(amps_.begin(), amps_.end(), is_finite)) {
      throw Error("state amplitudes must be finite");
    }
  }

  static StateVector basis(std::size_t dim, std::size_t index) {
    std::vector<complex_t> a(dim, 0.0);
    a.at(index) = 1.0;
    return StateVector(std::move(a));
  }

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const complex_t> amplitudes() const noexcept { return amps_; }
  complex_t operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
  }

  bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm_squared() - 1.0) <= tol; }

  StateVector normalized() const {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw NormalizationError("cannot normalize the zero vector");
    std::vector<complex_t> a(amps_);
    for (auto& z : a) z /= n;
    return StateVector(std::move(a));
  }

  /// <this|other>
  complex_t inner(const StateVector& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("inner product of states with different dimensions");
    complex_t s = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
    return s;
  }

  double max_abs_diff(const StateVector& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("state comparison with different dimensions");
    double m = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) m = std::max(m, std::abs(amps_[i] - other.amps_[i]));
    return m;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<complex_t> amps_;
};

inline StateVector kron(const StateVector& a, const StateVector& b, const StateVector& c) {
  if (a.dim() != 2 || b.dim() != 2 || c.dim() != 2) {
    throw DimensionMismatch("kron of three states requires single-qubit inputs");
  }
  std::vector<complex_t> out(8);
  for (std::size_t i = 0; i < 8; ++i) out[i] = a[(i >> 2) & 1] * b[(i >> 1) & 1] * c[i & 1];
  return StateVector(std::move(out));
}

/// Dense square complex matrix, row-major.
class Operator {
 public:
  Operator() = default;

  explicit Operator(std::size_t dim) : dim_{dim}, m_(dim * dim, 0.0) {}

  Operator(std::size_t dim, std::vector<complex_t> entries) : dim_{dim}, m_{std::move(entries)} {
    if (m_.size() != dim_ * dim_) throw DimensionMismatch("operator entry count does not match dimension");
    if (!std::all_of(m_.begin(), m_.end(), is_finite)) throw Error("operator entries must be finite");
  }

  static Operator identity(std::size_t dim) {
    Operator o(dim);
    for (std::size_t i = 0; i < dim; ++i) o(i, i) = 1.0;
    return o;
  }

  static Operator diagonal(std::vector<complex_t> d) {
    Operator o(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) o(i, i) = d[i];
    return o;
  }

  std::size_t dim() const noexcept { return dim_; }
  complex_t& operator()(std::size_t r, std::size_t c) { return m_[r * dim_ + c]; }
  complex_t operator()(std::size_t r, std::size_t c) const { return m_[r * dim_ + c]; }

  Operator adjoint() const {
    Operator o(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) o(c, r) = std::conj((*this)(r, c));
    return o;
  }

  complex_t trace() const {
    complex_t t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs_diff(const Operator& other) const {
    if (dim_ != other.dim_) throw DimensionMismatch("operator comparison with different dimensions");
    double m = 0.0;
    for (std::size_t i = 0; i < m_.size(); ++i) m = std::max(m, std::abs(m_[i] - other.m_[i]));
    return m;
  }

  bool is_hermitian(double tol = kNormTolerance) const { return max_abs_diff(adjoint()) <= tol; }

  bool is_involutive(double tol = kNormTolerance) const {
    return ((*this) * (*this)).max_abs_diff(identity(dim_)) <= tol;
  }

  friend Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim_ != b.dim_) throw DimensionMismatch("operator product with different dimensions");
    Operator o(a.dim_);
    for (std::size_t r = 0; r < a.dim_; ++r)
      for (std::size_t k = 0; k < a.dim_; ++k) {
        const complex_t x = a(r, k);
        if (x == complex_t{}) continue;
        for (std::size_t c = 0; c < a.dim_; ++c) o(r, c) += x * b(k, c);
      }
    return o;
  }

  friend StateVector operator*(const Operator& a, const StateVector& v) {
    if (a.dim_ != v.dim()) throw DimensionMismatch("operator and state dimensions differ");
    std::vector<complex_t> out(a.dim_, 0.0);
    for (std::size_t r = 0; r < a.dim_; ++r)
      for (std::size_t c = 0; c < a.dim_; ++c) out[r] += a(r, c) * v[c];
    return StateVector(std::move(out));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<complex_t> m_;
};

// ---------------------------------------------------------------------------
// Observables

/// sigma . n for polar angle theta and azimuth phi.
inline Operator make_spin_observable(double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Operator(2, {c, s * std::polar(1.0, -phi), s * std::polar(1.0, phi), -c});
}

/// Wave retarder with fast axis at azimuth 0 and retardance delta.
inline Operator make_retarder(double delta) {
  return Operator::diagonal({std::polar(1.0, -delta / 2.0), std::polar(1.0, delta / 2.0)});
}

/// Linear polarization analyzer along theta.
inline Operator make_linear_analyzer(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return Operator(2, {c, s, s, -c});
}

/// Analyzer seen through a retarder, W^dagger T W, in closed form.
inline Operator make_retarded_analyzer(double theta, double delta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return Operator(2, {c, s * std::polar(1.0, delta), s * std::polar(1.0, -delta), -c});
}

enum class MeasurementMode { Spin, Polarization };

inline std::string to_string(MeasurementMode m) { return m == MeasurementMode::Spin ? "spin" : "pol"; }

/// One party's dichotomic observable. `phase` is phi (spin) or delta
/// (polarization) and is kept in [0, 2pi).
struct MeasurementSetting {
  MeasurementMode mode = MeasurementMode::Spin;
  double phase = 0.0;
  double polar = kPi / 2.0;

  MeasurementSetting() = default;
  MeasurementSetting(MeasurementMode m, double phase_, double polar_)
      : mode{m}, phase{normalize_angle(phase_)}, polar{polar_} {}

  static double default_polar(MeasurementMode m) { return m == MeasurementMode::Spin ? kPi / 2.0 : kPi / 4.0; }

  static MeasurementSetting spin(double phi, double theta = kPi / 2.0) {
    return {MeasurementMode::Spin, phi, theta};
  }
  static MeasurementSetting polarization(double delta, double theta = kPi / 4.0) {
    return {MeasurementMode::Polarization, delta, theta};
  }
  static MeasurementSetting equatorial(MeasurementMode m, double phase) { return {m, phase, default_polar(m)}; }
};

using SettingTriple = std::array<MeasurementSetting, 3>;

inline SettingTriple equatorial_settings(MeasurementMode m, const std::array<double, 3>& phases) {
  return {MeasurementSetting::equatorial(m, phases[0]), MeasurementSetting::equatorial(m, phases[1]),
          MeasurementSetting::equatorial(m, phases[2])};
}

inline Operator observable_for(const MeasurementSetting& s) {
  return s.mode == MeasurementMode::Spin ? make_spin_observable(s.polar, s.phase)
                                         : make_retarded_analyzer(s.polar, s.phase);
}

/// +1/-1 eigenvector of a setting's observable with the fixed phase convention:
/// first component real and non-negative, or, when it vanishes, second
/// component real and positive.
inline std::array<complex_t, 2> eigenvector(const MeasurementSetting& s, Outcome r) {
  // The retarded analyzer at (theta, delta) equals the spin observable at
  // (2 theta, -delta).
  const double half = s.mode == MeasurementMode::Spin ? s.polar / 2.0 : s.polar;
  const double azimuth = s.mode == MeasurementMode::Spin ? s.phase : -s.phase;
  const complex_t e = std::polar(1.0, azimuth);
  std::array<complex_t, 2> v = r == Outcome::Plus
                                   ? std::array<complex_t, 2>{std::cos(half), std::sin(half) * e}
                                   : std::array<complex_t, 2>{std::sin(half), -std::cos(half) * e};
  constexpr double kZero = 1e-14;
  const complex_t pivot = std::abs(v[0]) > kZero ? v[0] : v[1];
  const complex_t fix = std::conj(pivot) / std::abs(pivot);
  v[0] *= fix;
  v[1] *= fix;
  if (std::abs(v[0]) <= kZero) v[0] = 0.0;
  return v;
}

inline StateVector eigenstate(const MeasurementSetting& s, Outcome r) {
  const auto v = eigenvector(s, r);
  return StateVector({v[0], v[1]});
}

/// a (x) b (x) c, qubit 1 most significant.
inline Operator tensor3(const Operator& a, const Operator& b, const Operator& c) {
  if (a.dim() != 2 || b.dim() != 2 || c.dim() != 2) throw DimensionMismatch("tensor3 requires 2x2 operands");
  Operator o(8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t k = 0; k < 8; ++k)
      o(r, k) = a((r >> 2) & 1, (k >> 2) & 1) * b((r >> 1) & 1, (k >> 1) & 1) * c(r & 1, k & 1);
  return o;
}

namespace detail {

inline void require_normalized(const StateVector& s) {
  if (!s.is_normalized()) {
    throw NormalizationError("state is not normalized (norm^2 = " + std::to_string(s.norm_squared()) + ")");
  }
}

inline void require_three_qubits(const StateVector& s) {
  if (s.dim() != 8) throw DimensionMismatch("operation requires a 3-qubit state");
}

inline std::size_t shift_for(std::size_t qubit) {
  if (qubit < 1 || qubit > 3) throw PreconditionViolated("qubit index must be 1, 2 or 3");
  return 3 - qubit;
}

}  // namespace detail

/// <psi| O1 (x) O2 (x) O3 |psi>.
inline double expectation(const StateVector& state, const SettingTriple& settings) {
  detail::require_three_qubits(state);
  detail::require_normalized(state);
  const Operator o =
      tensor3(observable_for(settings[0]), observable_for(settings[1]), observable_for(settings[2]));
  const complex_t e = state.inner(o * state);
  if (std::abs(e.imag()) > kExpectationTolerance) {
    throw ImaginaryResidue("expectation value has imaginary part " + std::to_string(e.imag()));
  }
  return e.real();
}

/// Probabilities of the eight joint outcome triples.
class JointDistribution {
 public:
  static std::size_t index_of(const OutcomeTriple& t) noexcept {
    std::size_t i = 0;
    for (Outcome o : t) i = (i << 1) | (o == Outcome::Minus ? 1u : 0u);
    return i;
  }

  static OutcomeTriple triple_at(std::size_t i) noexcept {
    return {(i & 4) ? Outcome::Minus : Outcome::Plus, (i & 2) ? Outcome::Minus : Outcome::Plus,
            (i & 1) ? Outcome::Minus : Outcome::Plus};
  }

  double operator()(const OutcomeTriple& t) const noexcept { return cells[index_of(t)]; }

  double total() const noexcept {
    double s = 0.0;
    for (double p : cells) s += p;
    return s;
  }

  std::array<double, 8> cells{};
};

inline JointDistribution joint_outcome_distribution(const StateVector& state, const SettingTriple& settings) {
  detail::require_three_qubits(state);
  detail::require_normalized(state);
  std::array<std::array<std::array<complex_t, 2>, 2>, 3> vecs;
  for (std::size_t q = 0; q < 3; ++q) {
    vecs[q][0] = eigenvector(settings[q], Outcome::Plus);
    vecs[q][1] = eigenvector(settings[q], Outcome::Minus);
  }
  JointDistribution d;
  for (std::size_t cell = 0; cell < 8; ++cell) {
    const auto& v1 = vecs[0][(cell >> 2) & 1];
    const auto& v2 = vecs[1][(cell >> 1) & 1];
    const auto& v3 = vecs[2][cell & 1];
    complex_t amp = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      amp += std::conj(v1[(i >> 2) & 1] * v2[(i >> 1) & 1] * v3[i & 1]) * state[i];
    }
    d.cells[cell] = std::norm(amp);
  }
  return d;
}

/// Draws one triple using exactly one value from `rng`.
inline OutcomeTriple sample_joint(const StateVector& state, const SettingTriple& settings, Rng& rng) {
  const JointDistribution d = joint_outcome_distribution(state, settings);
  const double u = uniform01(rng) * d.total();
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (d.cells[i] <= 0.0) continue;
    last_nonzero = i;
    acc += d.cells[i];
    if (u < acc) return JointDistribution::triple_at(i);
  }
  return JointDistribution::triple_at(last_nonzero);
}

/// Applies a 2x2 operator to one qubit of a 3-qubit state; no renormalization.
inline StateVector apply_single_qubit(const StateVector& state, std::size_t qubit, const Operator& op) {
  detail::require_three_qubits(state);
  if (op.dim() != 2) throw DimensionMismatch("single-qubit operator must be 2x2");
  const std::size_t shift = detail::shift_for(qubit);
  const std::size_t mask = std::size_t{1} << shift;
  std::vector<complex_t> out(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const std::size_t bit = (i >> shift) & 1;
    out[i] = op(bit, 0) * state[i & ~mask] + op(bit, 1) * state[i | mask];
  }
  return StateVector(std::move(out));
}

struct Projection {
  double probability = 0.0;
  std::optional<StateVector> state;  ///< renormalized; empty when probability is 0
};

/// Born probability and post-measurement state for one qubit and outcome.
inline Projection project_qubit(const StateVector& state, std::size_t qubit, const MeasurementSetting& setting,
                                Outcome outcome) {
  detail::require_three_qubits(state);
  const auto chi = eigenvector(setting, outcome);
  const Operator proj(2, {chi[0] * std::conj(chi[0]), chi[0] * std::conj(chi[1]), chi[1] * std::conj(chi[0]),
                          chi[1] * std::conj(chi[1])});
  const StateVector unnormalized = apply_single_qubit(state, qubit, proj);
  Projection p;
  p.probability = unnormalized.norm_squared();
  if (p.probability > 0.0) p.state = unnormalized.normalized();
  return p;
}

struct MeasurementResult {
  Outcome outcome;
  StateVector state;
};

/// Projective measurement of one qubit, sampled with one draw from `rng`.
inline MeasurementResult measure_single(const StateVector& state, std::size_t qubit,
                                        const MeasurementSetting& setting, Rng& rng) {
  detail::require_three_qubits(state);
  detail::require_normalized(state);
  Projection plus = project_qubit(state, qubit, setting, Outcome::Plus);
  const double u = uniform01(rng);
  if (plus.state && u < plus.probability) return {Outcome::Plus, std::move(*plus.state)};
  Projection minus = project_qubit(state, qubit, setting, Outcome::Minus);
  if (!minus.state) return {Outcome::Plus, std::move(*plus.state)};
  return {Outcome::Minus, std::move(*minus.state)};
}

/// (|s1 s2 s3> + eta |~s1 ~s2 ~s3>) / sqrt(2).
inline StateVector ghz_state(const GhzSpec& spec) {
  std::size_t index = 0;
  for (int s : spec.pattern()) index = (index << 1) | (s > 0 ? 0u : 1u);
  std::vector<complex_t> a(8, 0.0);
  const double h = std::numbers::sqrt2 / 2.0;
  a[index] = h;
  a[7 - index] = spec.phase() * h;
  return StateVector(std::move(a));
}

}  // namespace ghzqkd
