#pragma once

// Exact violation probabilities by branch enumeration through the state-vector
// engine, their averages over a session's angle distribution, and the
// detection-threshold calibration built on them.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "ghz_math.hpp"
#include "protocol_types.hpp"
#include "quantum.hpp"

namespace ghzqkd {

/// P(A B C != parity) for a super-classical triple, enumerating Eve's
/// outcome on particle a, the noise branches on a and c, and the joint
/// measurement.
inline double violation_probability(const GhzSpec& spec, MeasurementMode mode, const PhaseTriple& phases,
                                    std::optional<double> eve_angle, const NoiseModel& noise) {
  const auto parity = is_super_classical(spec, phases);
  if (!parity) throw PreconditionViolated("violation oracle needs a super-classical angle triple");

  std::vector<std::pair<double, StateVector>> branches{{1.0, ghz_state(spec)}};
  if (eve_angle) {
    const auto eve = MeasurementSetting::equatorial(mode, *eve_angle);
    std::vector<std::pair<double, StateVector>> next;
    for (Outcome o : {Outcome::Plus, Outcome::Minus}) {
      Projection p = project_qubit(branches.front().second, 1, eve, o);
      if (p.state) next.emplace_back(p.probability, std::move(*p.state));
    }
    branches = std::move(next);
  }
  if (noise.effective_p() > 0.0) {
    for (std::size_t qubit : {std::size_t{1}, std::size_t{3}}) {
      std::vector<std::pair<double, StateVector>> next;
      for (const auto& [w, s] : branches) {
        for (const auto& [k, wk] : noise_branches(noise)) {
          if (wk == 0.0) continue;
          next.emplace_back(w * wk, k == Pauli::I ? s : apply_single_qubit(s, qubit, pauli_matrix(k)));
        }
      }
      branches = std::move(next);
    }
  }

  const auto settings = equatorial_settings(mode, phases.values);
  double violation = 0.0;
  for (const auto& [w, s] : branches) {
    const JointDistribution d = joint_outcome_distribution(s, settings);
    for (std::size_t i = 0; i < 8; ++i) {
      if (product(JointDistribution::triple_at(i)) != sign_of(*parity)) violation += w * d.cells[i];
    }
  }
  return violation;
}

/// Intercept-resend on particle a at `eve_angle`, noiseless channel.
inline double exact_violation_probability(const GhzSpec& spec, double phi_a, double phi_b, double phi_c,
                                          double eve_angle, MeasurementMode mode = MeasurementMode::Spin) {
  return violation_probability(spec, mode, PhaseTriple(phi_a, phi_b, phi_c), eve_angle, NoiseModel::none());
}

inline double noise_violation_probability(const GhzSpec& spec, MeasurementMode mode, const PhaseTriple& phases,
                                          const NoiseModel& noise) {
  return violation_probability(spec, mode, phases, std::nullopt, noise);
}

struct WeightedTriple {
  PhaseTriple phases;
  double weight = 0.0;
};

/// Angle triples of the retained rounds of one parity class, with the
/// probability of each under the session's angle choices. Continuous Method 2
/// angles use a uniform `grid` x `grid` quadrature, exact for the low-order
/// trigonometric polynomials the violation probabilities are.
inline std::vector<WeightedTriple> class_triples(const ProtocolConfig& cfg, Parity cls, std::size_t grid = 16) {
  std::vector<WeightedTriple> out;
  if (cfg.method == Method::Method1) {
    for (const auto& t : super_classical_triples(*cfg.menu, cfg.spec)) {
      if (is_super_classical(cfg.spec, t) == cls) out.push_back({t, 1.0});
    }
  } else {
    std::vector<double> choices;
    if (cfg.menu) {
      choices.assign(cfg.menu->angles().begin(), cfg.menu->angles().end());
    } else {
      for (std::size_t i = 0; i < grid; ++i) choices.push_back(kTwoPi * static_cast<double>(i) / grid);
    }
    for (double a : choices)
      for (double c : choices) out.push_back({PhaseTriple(a, solve_bob_phase(cfg.spec, a, c, cls), c), 1.0});
  }
  for (auto& t : out) t.weight = 1.0 / static_cast<double>(out.size());
  return out;
}

/// Eve's measurement angles and their probabilities for one round.
inline std::vector<std::pair<double, double>> eve_angle_distribution(const ProtocolConfig& cfg,
                                                                     const EveStrategy& eve, double phi_a) {
  if (!eve.intercepts()) return {};
  switch (eve.policy) {
    case EveAnglePolicy::GuessFromMenu: {
      if (!cfg.menu) throw ConfigError("Eve cannot guess from a menu when none is announced");
      std::vector<std::pair<double, double>> out;
      for (double a : cfg.menu->angles()) out.emplace_back(a, 1.0 / 3.0);
      return out;
    }
    case EveAnglePolicy::FixedAngle: return {{eve.fixed_angle, 1.0}};
    case EveAnglePolicy::MatchAlice: return {{phi_a, 1.0}};
  }
  return {};
}

/// Expected violation rate over the designated class for the given attack.
inline double averaged_violation_rate(const ProtocolConfig& cfg, const EveStrategy& eve, const NoiseModel& noise) {
  double total = 0.0;
  for (const auto& t : class_triples(cfg, cfg.designated_class())) {
    const auto eves = eve_angle_distribution(cfg, eve, t.phases[0]);
    if (eves.empty()) {
      total += t.weight * violation_probability(cfg.spec, cfg.mode, t.phases, std::nullopt, noise);
      continue;
    }
    for (const auto& [angle, w] : eves) {
      total += t.weight * w * violation_probability(cfg.spec, cfg.mode, t.phases, angle, noise);
    }
  }
  return total;
}

/// The attack the threshold is calibrated against: the configured intercept
/// strategy, else a menu guess when a menu exists, else a fixed angle.
inline EveStrategy reference_eve(const ProtocolConfig& cfg) {
  if (cfg.eve.intercepts()) return cfg.eve;
  return cfg.menu ? EveStrategy::intercept_guess() : EveStrategy::intercept_fixed(0.0);
}

inline constexpr std::size_t kDefaultCalibrationRounds = 2000;
inline constexpr std::uint64_t kCalibrationSalt = 0xca11b7a7e;

struct Calibration {
  double noise_only_rate = 0.0;  ///< Monte Carlo, Eve off
  double noise_eve_rate = 0.0;   ///< exact oracle average
  double threshold = 0.0;        ///< midpoint of the two
  std::size_t rounds_checked = 0;
};

/// Runs `rounds` noise-only rounds on an isolated seed to estimate the
/// background rate, takes the noise-plus-Eve rate from the oracle, and puts
/// the threshold halfway between.
inline Calibration calibrate_threshold(const ProtocolConfig& cfg, std::size_t rounds = kDefaultCalibrationRounds) {
  ProtocolConfig quiet = cfg;
  quiet.eve = EveStrategy::none();
  quiet.seed = derive_seed(cfg.seed, kSessionStream, kCalibrationSalt);
  const Parity cls = cfg.designated_class();

  Calibration cal;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < rounds; ++i) {
    const RoundRecord r = simulate_round(quiet, i);
    if (!r.retained || r.parity != cls) continue;
    ++cal.rounds_checked;
    if (product(r.outcomes) != sign_of(cls)) ++violations;
  }
  cal.noise_only_rate = cal.rounds_checked > 0
                            ? static_cast<double>(violations) / static_cast<double>(cal.rounds_checked)
                            : averaged_violation_rate(cfg, EveStrategy::none(), cfg.noise);
  cal.noise_eve_rate = averaged_violation_rate(cfg, reference_eve(cfg), cfg.noise);
  cal.threshold = 0.5 * (cal.noise_only_rate + cal.noise_eve_rate);
  return cal;
}

/// Three readings of "how often does intercept-resend cause a violation".
struct InterceptAveraging {
  double over_eve_guesses = 0.0;  ///< fixed triple, Eve uniform over the menu
  double over_menu_draws = 0.0;   ///< fixed Eve angle, uniform over retained menu triples
  double over_both = 0.0;         ///< both of the above
};

inline InterceptAveraging intercept_averagings(const GhzSpec& spec, MeasurementMode mode, const AngleMenu& menu,
                                               const PhaseTriple& triple, double eve_angle) {
  InterceptAveraging avg;
  for (double e : menu.angles()) {
    avg.over_eve_guesses += violation_probability(spec, mode, triple, e, NoiseModel::none()) / 3.0;
  }
  const auto retained = super_classical_triples(menu, spec);
  if (retained.empty()) throw PreconditionViolated("menu has no super-classical triples");
  const double w = 1.0 / static_cast<double>(retained.size());
  for (const auto& t : retained) {
    avg.over_menu_draws += w * violation_probability(spec, mode, t, eve_angle, NoiseModel::none());
    for (double e : menu.angles()) {
      avg.over_both += w * violation_probability(spec, mode, t, e, NoiseModel::none()) / 3.0;
    }
  }
  return avg;
}

}  // namespace ghzqkd
