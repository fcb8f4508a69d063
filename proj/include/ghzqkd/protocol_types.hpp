#pragma once

// Configuration, per-round records and transcripts shared by the protocol
// runners, the detector and the serializers. Also the classical bit pipeline.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "ghz_math.hpp"
#include "ghz_spec.hpp"
#include "quantum.hpp"

namespace ghzqkd {

using Bit = std::uint8_t;
using Bits = std::vector<Bit>;

/// |+> reads as 0, |-> as 1.
constexpr Bit bit_of(Outcome o) noexcept { return o == Outcome::Plus ? 0 : 1; }

/// (1 - parity) / 2: the XOR of the three outcome bits a parity forces.
constexpr Bit parity_bit(Parity p) noexcept { return p == Parity::Plus ? 0 : 1; }

/// Alice's public bit D = A xor K.
constexpr Bit encode_bit(Bit a, Bit k) noexcept { return a ^ k; }

/// E = D xor C, then E xor B for parity +1 and E xnor B for parity -1.
constexpr Bit recover_key_bit(Bit d, Bit c, Bit b, Parity parity) noexcept {
  const Bit e = d ^ c;
  const Bit k = e ^ b;
  return parity == Parity::Plus ? k : static_cast<Bit>(k ^ 1);
}

/// Bob's reconstruction of Alice's outcome bit, A = K xor D.
constexpr Bit recover_alice_bit(Bit k, Bit d) noexcept { return k ^ d; }

enum class Method { Method1, Method2 };

inline std::string to_string(Method m) { return m == Method::Method1 ? "1" : "2"; }

struct ProtocolConfig {
  Method method = Method::Method2;
  GhzSpec spec;
  MeasurementMode mode = MeasurementMode::Spin;
  std::optional<AngleMenu> menu;
  /// Method 2: the parity Bob forces every round.
  Parity bob_parity_preference = Parity::Plus;
  /// Method 1: the parity class whose rounds feed the detection verdict.
  Parity detection_class = Parity::Plus;
  std::size_t key_length = 128;
  /// 0 selects the default: 8 x key_length for Method 1, key_length for Method 2.
  std::size_t max_rounds = 0;
  std::uint64_t seed = 0;
  EveStrategy eve;
  NoiseModel noise;
  /// Detection threshold; calibrated from the configuration when absent.
  std::optional<double> threshold;
  /// Permits non-causal Eve strategies (MatchAlice).
  bool analysis_mode = false;

  std::size_t effective_max_rounds() const {
    if (max_rounds != 0) return max_rounds;
    return method == Method::Method1 ? 8 * key_length : key_length;
  }

  Parity designated_class() const {
    return method == Method::Method2 ? bob_parity_preference : detection_class;
  }

  void validate() const {
    if (key_length == 0) throw ConfigError("key length must be positive");
    if (method == Method::Method1 && !menu) throw ConfigError("Method 1 requires an angle menu");
    if (max_rounds != 0 && max_rounds < key_length) throw ConfigError("max rounds must be at least the key length");
    if (eve.intercepts() && eve.policy == EveAnglePolicy::GuessFromMenu && !menu) {
      throw ConfigError("Eve cannot guess from a menu when none is announced");
    }
    if (eve.intercepts() && eve.policy == EveAnglePolicy::MatchAlice && !analysis_mode) {
      throw ConfigError("Eve matching Alice's angle is only available in analysis mode");
    }
    if (threshold && !(*threshold >= 0.0)) throw ConfigError("threshold must be non-negative");
    (void)NoiseModel::depolarizing(noise.effective_p());
  }
};

struct RoundRecord {
  std::size_t index = 0;
  std::array<double, 3> phases{};  ///< a, b, c
  bool retained = false;
  OutcomeTriple outcomes{};  ///< A, B, C
  std::optional<Parity> parity;
  std::optional<Bit> key_bit;  ///< K consumed by this round (secret)
  std::optional<Bit> d_bit;
  Bit c_bit = 0;
  std::optional<Bit> e_bit;
  Bit b_bit = 0;
  std::optional<Bit> recovered_bit;
  bool violation = false;
  std::optional<EveRecord> eve;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

enum class Party { Alice, Bob, Charlie };

inline std::string to_string(Party p) {
  switch (p) {
    case Party::Alice: return "alice";
    case Party::Bob: return "bob";
    case Party::Charlie: return "charlie";
  }
  return "?";
}

enum class MessageKind { Angle, Discard, DBit, CBit };

inline std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Angle: return "angle";
    case MessageKind::Discard: return "discard";
    case MessageKind::DBit: return "d";
    case MessageKind::CBit: return "c";
  }
  return "?";
}

/// One announcement on the authenticated public channel.
struct PublicMessage {
  std::size_t round = 0;
  Party from = Party::Alice;
  MessageKind kind = MessageKind::Angle;
  std::variant<std::monostate, double, Bit> value;

  friend bool operator==(const PublicMessage&, const PublicMessage&) = default;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<RoundRecord> rounds;
  std::vector<PublicMessage> public_log;
};

}  // namespace ghzqkd
