#pragma once

// Quantum half of a protocol round: angle choices, the quantum channel and the
// joint measurement. Each round draws only from its own (seed, index, role)
// streams, so rounds can be evaluated in any order.

#include <array>
#include <cstdint>
#include <optional>

#include "channel.hpp"
#include "ghz_math.hpp"
#include "protocol_types.hpp"
#include "quantum.hpp"
#include "rng.hpp"

namespace ghzqkd {

struct MeasuredRound {
  OutcomeTriple outcomes{};
  std::optional<EveRecord> eve;
};

/// Prepares the GHZ state, passes particles a and c through Eve and the noise
/// model, then samples the joint measurement. Eve, when present, sits at the
/// source end of particle a's path, so noise acts on her resent qubit.
inline MeasuredRound measure_round(const GhzSpec& spec, const SettingTriple& settings,
                                   const std::optional<MeasurementSetting>& eve_setting, const NoiseModel& noise,
                                   std::uint64_t seed, std::uint64_t index) {
  StateVector state = ghz_state(spec);
  MeasuredRound out;
  if (eve_setting) {
    Rng rng = make_stream(seed, index, StreamRole::Eve);
    InterceptResult r = eve_intercept_resend(state, *eve_setting, rng);
    state = std::move(r.state);
    out.eve = r.record;
  }
  if (noise.effective_p() > 0.0) {
    Rng rng_a = make_stream(seed, index, StreamRole::NoiseA);
    state = apply_noise(state, 1, noise, rng_a);
    Rng rng_c = make_stream(seed, index, StreamRole::NoiseC);
    state = apply_noise(state, 3, noise, rng_c);
  }
  Rng rng = make_stream(seed, index, StreamRole::Measurement);
  out.outcomes = sample_joint(state, settings, rng);
  return out;
}

namespace detail {

inline double draw_phase(const std::optional<AngleMenu>& menu, Rng& rng) {
  if (menu) return (*menu)[uniform_index(rng, 3)];
  return normalize_angle(uniform01(rng) * kTwoPi);
}

inline std::optional<MeasurementSetting> eve_setting_for(const ProtocolConfig& cfg, double phi_a, std::uint64_t index) {
  if (!cfg.eve.intercepts()) return std::nullopt;
  double angle = cfg.eve.fixed_angle;
  switch (cfg.eve.policy) {
    case EveAnglePolicy::GuessFromMenu: {
      // Eve's guess comes from her own stream, offset from the one she measures with.
      Rng rng = make_stream(cfg.seed, index, StreamRole::Eve);
      rng.discard(1);
      angle = (*cfg.menu)[uniform_index(rng, 3)];
      break;
    }
    case EveAnglePolicy::FixedAngle: break;
    case EveAnglePolicy::MatchAlice: angle = phi_a; break;
  }
  return MeasurementSetting::equatorial(cfg.mode, angle);
}

}  // namespace detail

/// Runs the quantum part of one round. Key-dependent fields are left empty.
inline RoundRecord simulate_round(const ProtocolConfig& cfg, std::uint64_t index) {
  RoundRecord rec;
  rec.index = index;
  Rng alice = make_stream(cfg.seed, index, StreamRole::Alice);
  Rng charlie = make_stream(cfg.seed, index, StreamRole::Charlie);
  const double phi_a = detail::draw_phase(cfg.menu, alice);
  const double phi_c = detail::draw_phase(cfg.menu, charlie);
  double phi_b = 0.0;
  if (cfg.method == Method::Method1) {
    Rng bob = make_stream(cfg.seed, index, StreamRole::Bob);
    phi_b = (*cfg.menu)[uniform_index(bob, 3)];
  } else {
    phi_b = solve_bob_phase(cfg.spec, phi_a, phi_c, cfg.bob_parity_preference);
  }
  rec.phases = {phi_a, phi_b, phi_c};

  const PhaseTriple phases(rec.phases);
  rec.parity = is_super_classical(cfg.spec, phases);
  if (cfg.method == Method::Method2 && rec.parity != cfg.bob_parity_preference) {
    throw Error("Bob's solved phase failed the super-classical test");
  }
  rec.retained = rec.parity.has_value();

  const auto settings = equatorial_settings(cfg.mode, rec.phases);
  const auto measured = measure_round(cfg.spec, settings, detail::eve_setting_for(cfg, phi_a, index), cfg.noise,
                                      cfg.seed, index);
  rec.outcomes = measured.outcomes;
  rec.eve = measured.eve;
  rec.b_bit = bit_of(rec.outcomes[1]);
  rec.c_bit = bit_of(rec.outcomes[2]);
  return rec;
}

}  // namespace ghzqkd
