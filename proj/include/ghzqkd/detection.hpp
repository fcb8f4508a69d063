#pragma once

#include <cstddef>
#include <string>

#include "errors.hpp"
#include "ghz_math.hpp"
#include "protocol_types.hpp"

namespace ghzqkd {

enum class Verdict { Clean, EveDetected };

inline std::string to_string(Verdict v) { return v == Verdict::Clean ? "clean" : "eve-detected"; }

struct ClassCounts {
  std::size_t rounds = 0;
  std::size_t violations = 0;
};

/// Bob's parity check over one class of retained rounds.
struct DetectionReport {
  Parity designated_class = Parity::Plus;
  std::size_t rounds_checked = 0;
  std::size_t violations = 0;
  double rate = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::Clean;
  ClassCounts plus_class;  ///< recorded for analysis regardless of designation
  ClassCounts minus_class;
};

/// True when the reconstructed A = K xor D, together with B and C, breaks the
/// round's parity.
inline bool round_violates(const RoundRecord& r) {
  if (!r.retained || !r.parity || !r.key_bit || !r.d_bit) return false;
  const Bit a = recover_alice_bit(*r.key_bit, *r.d_bit);
  return static_cast<Bit>(a ^ r.b_bit ^ r.c_bit) != parity_bit(*r.parity);
}

namespace detail {

inline DetectionReport tally(const Transcript& t, double threshold) {
  DetectionReport rep;
  rep.designated_class = t.config.designated_class();
  rep.threshold = threshold;
  for (const auto& r : t.rounds) {
    if (!r.retained || !r.parity || !r.key_bit) continue;
    ClassCounts& cls = *r.parity == Parity::Plus ? rep.plus_class : rep.minus_class;
    ++cls.rounds;
    if (round_violates(r)) ++cls.violations;
  }
  const ClassCounts& used = rep.designated_class == Parity::Plus ? rep.plus_class : rep.minus_class;
  rep.rounds_checked = used.rounds;
  rep.violations = used.violations;
  rep.rate = used.rounds == 0 ? 0.0 : static_cast<double>(used.violations) / static_cast<double>(used.rounds);
  rep.verdict = rep.rate > threshold ? Verdict::EveDetected : Verdict::Clean;
  return rep;
}

}  // namespace detail

/// Violation count and verdict over the designated parity class.
inline DetectionReport detect(const Transcript& transcript, double threshold) {
  DetectionReport rep = detail::tally(transcript, threshold);
  if (rep.rounds_checked == 0) {
    throw NoRetainedRounds("no retained rounds in the designated parity class");
  }
  return rep;
}

}  // namespace ghzqkd
