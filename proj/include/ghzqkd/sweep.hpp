#pragma once

// Oracle-versus-Monte-Carlo curves for the eavesdropper angle and the noise
// level on a fixed super-classical triple.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "channel.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "ghz_math.hpp"
#include "oracles.hpp"

namespace ghzqkd {

struct SweepRow {
  double parameter = 0.0;
  double oracle_rate = 0.0;
  double mc_rate = 0.0;
  double std_error = 0.0;
  std::size_t rounds = 0;
};

inline double binomial_stderr(double rate, std::size_t n) {
  return n == 0 ? 0.0 : std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

/// Monte Carlo violation rate of `rounds` independent rounds at fixed angles.
inline double monte_carlo_violation_rate(const GhzSpec& spec, MeasurementMode mode, const PhaseTriple& phases,
                                         std::optional<double> eve_angle, const NoiseModel& noise,
                                         std::size_t rounds, std::uint64_t seed) {
  const auto parity = is_super_classical(spec, phases);
  if (!parity) throw PreconditionViolated("Monte Carlo violation rate needs a super-classical triple");
  if (rounds == 0) return 0.0;
  const auto settings = equatorial_settings(mode, phases.values);
  std::optional<MeasurementSetting> eve;
  if (eve_angle) eve = MeasurementSetting::equatorial(mode, *eve_angle);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    if (product(measure_round(spec, settings, eve, noise, seed, i).outcomes) != sign_of(*parity)) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(rounds);
}

/// Rows keyed by delta = phi_a - eve_angle.
inline std::vector<SweepRow> sweep_eve_angle(const GhzSpec& spec, MeasurementMode mode, const PhaseTriple& phases,
                                             const std::vector<double>& deltas, std::size_t rounds,
                                             std::uint64_t seed, const NoiseModel& noise = {}) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double eve = normalize_angle(phases[0] - deltas[i]);
    SweepRow row;
    row.parameter = deltas[i];
    row.oracle_rate = violation_probability(spec, mode, phases, eve, noise);
    row.mc_rate = monte_carlo_violation_rate(spec, mode, phases, eve, noise, rounds, derive_seed(seed, i, 0x5eef));
    row.std_error = binomial_stderr(row.mc_rate, rounds);
    row.rounds = rounds;
    rows.push_back(row);
  }
  return rows;
}

/// Rows keyed by the depolarizing probability.
inline std::vector<SweepRow> sweep_noise(const GhzSpec& spec, MeasurementMode mode, const PhaseTriple& phases,
                                         const std::vector<double>& ps, std::size_t rounds, std::uint64_t seed,
                                         std::optional<double> eve_angle = std::nullopt) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const NoiseModel noise = NoiseModel::depolarizing(ps[i]);
    SweepRow row;
    row.parameter = ps[i];
    row.oracle_rate = violation_probability(spec, mode, phases, eve_angle, noise);
    row.mc_rate =
        monte_carlo_violation_rate(spec, mode, phases, eve_angle, noise, rounds, derive_seed(seed, i, 0x9015e));
    row.std_error = binomial_stderr(row.mc_rate, rounds);
    row.rounds = rounds;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ghzqkd
