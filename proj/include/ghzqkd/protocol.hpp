#pragma once

// Method 1, Method 2 and the three-party extension.
//
// A session runs in two phases. The quantum phase evaluates each round
// independently from its own random streams. The classical phase walks the
// rounds in index order, hands key bits to retained rounds, and replays the
// public announcements: Alice's and Charlie's angles, Bob's discard notice,
// then D and C.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "detection.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "protocol_types.hpp"
#include "rng.hpp"

namespace ghzqkd {

struct SessionResult {
  Bits key_sent;
  Bits key_recovered;
  Bits alice_bits_inferred;  ///< Bob's K xor D reconstruction, one per retained round
  DetectionReport detection;
  std::size_t rounds_used = 0;
};

struct SessionOutput {
  SessionResult result;
  Transcript transcript;
};

/// Alice's key, drawn from the session-wide key stream.
inline Bits draw_key(std::uint64_t seed, std::size_t length) {
  Rng rng = make_stream(seed, kSessionStream, StreamRole::Key);
  Bits key(length);
  for (auto& b : key) b = static_cast<Bit>(rng() >> 63);
  return key;
}

/// Classical phase. `rounds` may arrive in any order; retained rounds take key
/// bits in index order until the key runs out.
inline SessionOutput assemble_session(const ProtocolConfig& cfg, std::vector<RoundRecord> rounds, const Bits& key) {
  std::sort(rounds.begin(), rounds.end(), [](const auto& x, const auto& y) { return x.index < y.index; });

  SessionOutput out;
  Transcript& t = out.transcript;
  SessionResult& res = out.result;
  t.config = cfg;
  res.key_sent = key;
  std::size_t next_key = 0;
  for (auto& r : rounds) {
    if (r.retained && next_key < key.size()) {
      const Bit k = key[next_key++];
      const Parity parity = *r.parity;
      const Bit a = bit_of(r.outcomes[0]);
      r.key_bit = k;
      r.d_bit = encode_bit(a, k);
      r.e_bit = static_cast<Bit>(*r.d_bit ^ r.c_bit);
      r.recovered_bit = recover_key_bit(*r.d_bit, r.c_bit, r.b_bit, parity);
      r.violation = round_violates(r);
      res.key_recovered.push_back(*r.recovered_bit);
      res.alice_bits_inferred.push_back(recover_alice_bit(k, *r.d_bit));
    } else {
      r.retained = r.retained && next_key < key.size();
    }

    auto& log = t.public_log;
    log.push_back({r.index, Party::Alice, MessageKind::Angle, r.phases[0]});
    log.push_back({r.index, Party::Charlie, MessageKind::Angle, r.phases[2]});
    if (cfg.method == Method::Method1 && !r.parity) log.push_back({r.index, Party::Bob, MessageKind::Discard, {}});
    if (r.d_bit) {
      log.push_back({r.index, Party::Alice, MessageKind::DBit, *r.d_bit});
      log.push_back({r.index, Party::Charlie, MessageKind::CBit, r.c_bit});
    }
  }
  res.rounds_used = rounds.size();
  t.rounds = std::move(rounds);
  return out;
}

namespace detail {

inline void finish_detection(SessionOutput& out, const ProtocolConfig& cfg) {
  const double threshold = cfg.threshold ? *cfg.threshold : calibrate_threshold(cfg).threshold;
  // Short sessions may leave the designated class empty; the report then
  // shows zero rounds checked and a clean verdict.
  out.result.detection = detail::tally(out.transcript, threshold);
}

inline SessionOutput run_with_key(const ProtocolConfig& cfg, const Bits& key) {
  std::vector<RoundRecord> rounds;
  std::size_t retained = 0;
  const std::size_t limit = cfg.effective_max_rounds();
  for (std::size_t i = 0; i < limit && retained < key.size(); ++i) {
    rounds.push_back(simulate_round(cfg, i));
    if (rounds.back().retained) ++retained;
  }
  if (retained < key.size()) {
    throw KeyExhausted("only " + std::to_string(retained) + " of " + std::to_string(key.size()) +
                       " key bits placed within " + std::to_string(limit) + " rounds");
  }
  SessionOutput out = assemble_session(cfg, std::move(rounds), key);
  finish_detection(out, cfg);
  return out;
}

}  // namespace detail

/// Runs one session, sending `key` instead of a freshly drawn one when given.
inline SessionOutput run_session(const ProtocolConfig& cfg, const std::optional<Bits>& key = std::nullopt) {
  cfg.validate();
  if (key && key->size() != cfg.key_length) throw ConfigError("supplied key length does not match configuration");
  return detail::run_with_key(cfg, key ? *key : draw_key(cfg.seed, cfg.key_length));
}

inline SessionOutput run_method1(const ProtocolConfig& cfg) {
  if (cfg.method != Method::Method1) throw ConfigError("run_method1 needs a Method 1 configuration");
  return run_session(cfg);
}

inline SessionOutput run_method2(const ProtocolConfig& cfg) {
  if (cfg.method != Method::Method2) throw ConfigError("run_method2 needs a Method 2 configuration");
  return run_session(cfg);
}

/// Exactly `n_rounds` rounds; every retained round carries a key bit.
inline SessionOutput run_fixed_rounds(const ProtocolConfig& cfg, std::size_t n_rounds) {
  ProtocolConfig c = cfg;
  c.key_length = std::max<std::size_t>(1, n_rounds);
  c.max_rounds = 0;
  c.validate();
  std::vector<RoundRecord> rounds;
  rounds.reserve(n_rounds);
  std::size_t retained = 0;
  for (std::size_t i = 0; i < n_rounds; ++i) {
    rounds.push_back(simulate_round(c, i));
    if (rounds.back().retained) ++retained;
  }
  SessionOutput out = assemble_session(c, std::move(rounds), draw_key(c.seed, retained));
  out.transcript.config.key_length = retained;
  detail::finish_detection(out, c);
  return out;
}

inline constexpr std::uint64_t kSecondRunSalt = 0x3b47;

struct ThreePartyOutput {
  SessionOutput first;   ///< Alice -> Bob
  SessionOutput second;  ///< Bob (as Alice) -> Charlie (as Bob), Alice as Charlie
};

/// Distributes the first run's key onward to Charlie by rerunning the
/// protocol with rotated roles. `second` defaults to `first` on a derived seed.
inline ThreePartyOutput run_three_party(const ProtocolConfig& first,
                                        std::optional<ProtocolConfig> second = std::nullopt) {
  ThreePartyOutput out;
  out.first = run_session(first);
  ProtocolConfig cfg2 = second ? *second : first;
  if (!second) cfg2.seed = derive_seed(first.seed, kSessionStream, kSecondRunSalt);
  cfg2.key_length = out.first.result.key_recovered.size();
  out.second = run_session(cfg2, out.first.result.key_recovered);
  return out;
}

inline bool any_detected(const ThreePartyOutput& o) {
  return o.first.result.detection.verdict == Verdict::EveDetected ||
         o.second.result.detection.verdict == Verdict::EveDetected;
}

}  // namespace ghzqkd
