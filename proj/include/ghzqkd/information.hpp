#pragma once

// What Eve learns by playing Charlie, computed by exhaustive enumeration of
// the joint distribution of her view and the key.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "ghz_math.hpp"
#include "oracles.hpp"
#include "protocol_types.hpp"
#include "quantum.hpp"

namespace ghzqkd {

/// Everything an impersonating Charlie sees for one retained round.
struct EveView {
  std::size_t round = 0;
  double phi_a = 0.0;
  double phi_c = 0.0;
  Bit d = 0;
  Bit c = 0;
};

/// Eve-as-Charlie's knowledge, read off the public log alone. Her own angle
/// and outcome are the ones she announced as Charlie.
inline std::vector<EveView> eve_impersonate_charlie(const std::vector<PublicMessage>& log) {
  std::map<std::size_t, EveView> views;
  std::map<std::size_t, bool> complete;
  for (const auto& m : log) {
    EveView& v = views[m.round];
    v.round = m.round;
    if (m.kind == MessageKind::Angle && m.from == Party::Alice) v.phi_a = std::get<double>(m.value);
    if (m.kind == MessageKind::Angle && m.from == Party::Charlie) v.phi_c = std::get<double>(m.value);
    if (m.kind == MessageKind::DBit) {
      v.d = std::get<Bit>(m.value);
      complete[m.round] = true;
    }
    if (m.kind == MessageKind::CBit) v.c = std::get<Bit>(m.value);
  }
  std::vector<EveView> out;
  for (const auto& [round, v] : views) {
    if (complete.count(round)) out.push_back(v);
  }
  return out;
}

/// I(X; Y) in bits from a joint table: each row is one value of X, holding
/// P(X = x, Y = y) for every y.
template <typename Key>
double mutual_information(const std::map<Key, std::vector<double>>& joint) {
  std::vector<double> py;
  for (const auto& [x, row] : joint) {
    if (py.empty()) py.assign(row.size(), 0.0);
    for (std::size_t y = 0; y < row.size(); ++y) py[y] += row[y];
  }
  double info = 0.0;
  for (const auto& [x, row] : joint) {
    double px = 0.0;
    for (double p : row) px += p;
    for (std::size_t y = 0; y < row.size(); ++y) {
      if (row[y] > 0.0) info += row[y] * std::log2(row[y] / (px * py[y]));
    }
  }
  return info;
}

inline constexpr std::size_t kMaxInformationKeyBits = 4;
inline constexpr double kEnumerationBudget = 2e7;

struct InformationOptions {
  /// Sanity switch: hand Eve Alice's outcome A as well.
  bool leak_alice_outcome = false;
  /// Grid size for continuous Method 2 angles.
  std::size_t grid = 8;
};

/// I(view; K) for an impersonating Charlie over a `key_length`-bit session.
/// The view per round is (phi_a, phi_c, D, C), optionally plus A.
inline double eve_key_information(const ProtocolConfig& cfg, const InformationOptions& opts = {}) {
  if (cfg.eve.kind != EveKind::ImpersonateCharlie) {
    throw PreconditionViolated("key information is defined for the Charlie-impersonation view");
  }
  const std::size_t n = cfg.key_length;
  if (n == 0 || n > kMaxInformationKeyBits) {
    throw EnumerationInfeasible("key information enumeration supports 1 to 4 key bits");
  }

  // One retained round: angles, then Alice's and Charlie's outcomes.
  struct Atom {
    int angle_a, angle_c;
    Bit a, c;
    double p;
  };
  std::map<double, int> angle_ids;
  auto id_of = [&](double x) { return angle_ids.emplace(x, static_cast<int>(angle_ids.size())).first->second; };

  std::vector<WeightedTriple> triples;
  for (Parity cls : {Parity::Plus, Parity::Minus}) {
    if (cfg.method == Method::Method2 && cls != cfg.bob_parity_preference) continue;
    auto part = class_triples(cfg, cls, opts.grid);
    for (auto& t : part) triples.push_back(t);
  }
  if (triples.empty()) throw PreconditionViolated("configuration never retains a round");

  std::vector<Atom> atoms;
  for (const auto& t : triples) {
    const auto d = joint_outcome_distribution(ghz_state(cfg.spec), equatorial_settings(cfg.mode, t.phases.values));
    const int ia = id_of(t.phases[0]);
    const int ic = id_of(t.phases[2]);
    for (std::size_t i = 0; i < 8; ++i) {
      const auto o = JointDistribution::triple_at(i);
      const double p = d.cells[i] / static_cast<double>(triples.size());
      if (p > 0.0) atoms.push_back({ia, ic, bit_of(o[0]), bit_of(o[2]), p});
    }
  }

  const double work = std::pow(static_cast<double>(atoms.size()), static_cast<double>(n)) * std::pow(2.0, n);
  if (work > kEnumerationBudget) throw EnumerationInfeasible("enumeration exceeds the work budget");

  const std::size_t keys = std::size_t{1} << n;
  std::map<std::vector<int>, std::vector<double>> joint;
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    double p_rounds = 1.0;
    for (std::size_t r = 0; r < n; ++r) p_rounds *= atoms[pick[r]].p;
    for (std::size_t k = 0; k < keys; ++k) {
      std::vector<int> view;
      view.reserve(5 * n);
      for (std::size_t r = 0; r < n; ++r) {
        const Atom& at = atoms[pick[r]];
        const Bit kb = static_cast<Bit>((k >> r) & 1);
        view.insert(view.end(), {at.angle_a, at.angle_c, encode_bit(at.a, kb), at.c});
        if (opts.leak_alice_outcome) view.push_back(at.a);
      }
      auto& row = joint[view];
      if (row.empty()) row.assign(keys, 0.0);
      row[k] += p_rounds / static_cast<double>(keys);
    }
    std::size_t r = 0;
    while (r < n && ++pick[r] == atoms.size()) pick[r++] = 0;
    if (r == n) break;
  }
  return mutual_information(joint);
}

struct PadInformation {
  double public_d_bits = 0.0;  ///< I(D1, D2; K)
  double full_view = 0.0;      ///< I(D1, C1, D2, C2; K)
};

/// Leakage from reusing K across the two runs of the three-party extension.
/// Run 2's acting Alice (Bob) holds position 1 of its GHZ state.
inline PadInformation three_party_pad_information(const GhzSpec& spec1, const PhaseTriple& phases1,
                                                  const GhzSpec& spec2, const PhaseTriple& phases2,
                                                  MeasurementMode mode) {
  const auto d1 = joint_outcome_distribution(ghz_state(spec1), equatorial_settings(mode, phases1.values));
  const auto d2 = joint_outcome_distribution(ghz_state(spec2), equatorial_settings(mode, phases2.values));
  std::map<std::vector<int>, std::vector<double>> pub;
  std::map<std::vector<int>, std::vector<double>> full;
  for (Bit k : {Bit{0}, Bit{1}})
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        const double p = 0.5 * d1.cells[i] * d2.cells[j];
        if (p == 0.0) continue;
        const auto o1 = JointDistribution::triple_at(i);
        const auto o2 = JointDistribution::triple_at(j);
        const int dd1 = encode_bit(bit_of(o1[0]), k);
        const int dd2 = encode_bit(bit_of(o2[0]), k);
        auto& r1 = pub[{dd1, dd2}];
        if (r1.empty()) r1.assign(2, 0.0);
        r1[k] += p;
        auto& r2 = full[{dd1, bit_of(o1[2]), dd2, bit_of(o2[2])}];
        if (r2.empty()) r2.assign(2, 0.0);
        r2[k] += p;
      }
  return {mutual_information(pub), mutual_information(full)};
}

}  // namespace ghzqkd
