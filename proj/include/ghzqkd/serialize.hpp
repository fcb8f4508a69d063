#pragma once

// Transcript, result and detection output as JSON text and flat CSV. Angles
// and rates are written with 17 significant digits so output is
// byte-reproducible and round-trips exactly.
//
// Unless secrets are revealed, nothing here writes K, A, B, Bob's angle, the
// GHZ variant, per-round parities or anything else that depends on Bob's
// parity preference.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "detection.hpp"
#include "protocol.hpp"
#include "protocol_types.hpp"
#include "sweep.hpp"

namespace ghzqkd {

struct OutputOptions {
  bool reveal_secret = false;
};

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string bits_to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (Bit b : bits) s.push_back(b ? '1' : '0');
  return s;
}

/// Minimal streaming JSON emitter; keys and strings are plain ASCII.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separate();
    quote(k);
    out_ << ':';
    after_key_ = true;
    return *this;
  }

  JsonWriter& value(std::string_view s) {
    separate();
    quote(s);
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(double x) {
    separate();
    if (std::isfinite(x)) {
      out_ << format_real(x);
    } else {
      out_ << "null";
    }
    return *this;
  }
  JsonWriter& value(std::uint64_t x) {
    separate();
    out_ << x;
    return *this;
  }
  JsonWriter& value(int x) {
    separate();
    out_ << x;
    return *this;
  }
  JsonWriter& value(bool b) {
    separate();
    out_ << (b ? "true" : "false");
    return *this;
  }
  JsonWriter& null() {
    separate();
    out_ << "null";
    return *this;
  }

  template <typename T>
  JsonWriter& optional(const std::optional<T>& v) {
    return v ? value(*v) : null();
  }

  std::string str() const { return out_.str(); }

 private:
  JsonWriter& open(char c) {
    separate();
    out_ << c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    first_.pop_back();
    out_ << c;
    return *this;
  }
  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!first_.empty()) {
      if (!first_.back()) out_ << ',';
      first_.back() = false;
    }
  }
  void quote(std::string_view s) {
    out_ << '"';
    for (char c : s) {
      if (c == '"' || c == '\\') out_ << '\\';
      out_ << c;
    }
    out_ << '"';
  }

  std::ostringstream out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

namespace detail {

inline std::optional<int> int_of(std::optional<Bit> b) {
  return b ? std::optional<int>(*b) : std::nullopt;
}

inline void write_header(JsonWriter& w, const ProtocolConfig& cfg, const OutputOptions& opt) {
  w.key("header").begin_object();
  w.key("method").value(to_string(cfg.method));
  if (opt.reveal_secret) {
    w.key("spec").value(cfg.spec.to_string());
  } else {
    w.key("spec").value("redacted");
  }
  w.key("spec_redacted").value(!opt.reveal_secret);
  w.key("mode").value(to_string(cfg.mode));
  w.key("menu");
  if (cfg.menu) {
    w.begin_array();
    for (double a : cfg.menu->angles()) w.value(a);
    w.end_array();
  } else {
    w.null();
  }
  w.key("seed").value(cfg.seed);
  w.key("key_length").value(static_cast<std::uint64_t>(cfg.key_length));
  w.key("eve").value(to_string(cfg.eve.kind));
  w.key("noise_p").value(cfg.noise.effective_p());
  if (opt.reveal_secret && cfg.method == Method::Method2) {
    w.key("bob_parity_preference").value(sign_of(cfg.bob_parity_preference));
  }
  w.end_object();
}

inline void write_round(JsonWriter& w, const RoundRecord& r, const OutputOptions& opt) {
  const bool s = opt.reveal_secret;
  w.begin_object();
  w.key("index").value(static_cast<std::uint64_t>(r.index));
  w.key("phase_a").value(r.phases[0]);
  w.key("phase_b");
  s ? w.value(r.phases[1]) : w.null();
  w.key("phase_c").value(r.phases[2]);
  w.key("retained").value(r.retained);
  w.key("outcome_a");
  s ? w.value(sign_of(r.outcomes[0])) : w.null();
  w.key("outcome_b");
  s ? w.value(sign_of(r.outcomes[1])) : w.null();
  w.key("outcome_c").value(sign_of(r.outcomes[2]));
  w.key("parity");
  s && r.parity ? w.value(sign_of(*r.parity)) : w.null();
  w.key("key_bit");
  s ? w.optional(int_of(r.key_bit)) : w.null();
  w.key("d_bit").optional(int_of(r.d_bit));
  w.key("c_bit").value(static_cast<int>(r.c_bit));
  w.key("e_bit").optional(int_of(r.e_bit));
  w.key("b_bit");
  s ? w.value(static_cast<int>(r.b_bit)) : w.null();
  w.key("violation").value(r.violation);
  if (s && r.eve) {
    w.key("eve").begin_object();
    w.key("angle").value(r.eve->angle);
    w.key("outcome").value(sign_of(r.eve->outcome));
    w.end_object();
  }
  w.end_object();
}

inline void write_message(JsonWriter& w, const PublicMessage& m) {
  w.begin_object();
  w.key("round").value(static_cast<std::uint64_t>(m.round));
  w.key("from").value(to_string(m.from));
  w.key("kind").value(to_string(m.kind));
  w.key("value");
  if (const auto* a = std::get_if<double>(&m.value)) {
    w.value(*a);
  } else if (const auto* b = std::get_if<Bit>(&m.value)) {
    w.value(static_cast<int>(*b));
  } else {
    w.null();
  }
  w.end_object();
}

}  // namespace detail

inline void write_detection(JsonWriter& w, const DetectionReport& d, const OutputOptions& opt) {
  w.begin_object();
  w.key("rounds_checked").value(static_cast<std::uint64_t>(d.rounds_checked));
  w.key("violations").value(static_cast<std::uint64_t>(d.violations));
  w.key("rate").value(d.rate);
  w.key("threshold").value(d.threshold);
  w.key("verdict").value(to_string(d.verdict));
  if (opt.reveal_secret) {
    w.key("designated_class").value(sign_of(d.designated_class));
    w.key("plus_class").begin_object();
    w.key("rounds").value(static_cast<std::uint64_t>(d.plus_class.rounds));
    w.key("violations").value(static_cast<std::uint64_t>(d.plus_class.violations));
    w.end_object();
    w.key("minus_class").begin_object();
    w.key("rounds").value(static_cast<std::uint64_t>(d.minus_class.rounds));
    w.key("violations").value(static_cast<std::uint64_t>(d.minus_class.violations));
    w.end_object();
  }
  w.end_object();
}

inline void write_session(JsonWriter& w, const SessionOutput& s, const OutputOptions& opt) {
  w.begin_object();
  detail::write_header(w, s.transcript.config, opt);
  w.key("rounds").begin_array();
  for (const auto& r : s.transcript.rounds) detail::write_round(w, r, opt);
  w.end_array();
  w.key("public_log").begin_array();
  for (const auto& m : s.transcript.public_log) detail::write_message(w, m);
  w.end_array();
  w.key("result").begin_object();
  const auto secret_bits = [&](std::string_view name, const Bits& b) {
    w.key(name);
    opt.reveal_secret ? w.value(bits_to_string(b)) : w.null();
  };
  secret_bits("key_sent", s.result.key_sent);
  secret_bits("key_recovered", s.result.key_recovered);
  secret_bits("alice_bits_inferred", s.result.alice_bits_inferred);
  w.key("rounds_used").value(static_cast<std::uint64_t>(s.result.rounds_used));
  w.key("detection");
  write_detection(w, s.result.detection, opt);
  w.end_object();
  w.end_object();
}

inline std::string session_json(const SessionOutput& s, const OutputOptions& opt = {}) {
  JsonWriter w;
  write_session(w, s, opt);
  return w.str() + "\n";
}

inline std::string three_party_json(const ThreePartyOutput& o, const OutputOptions& opt = {}) {
  JsonWriter w;
  w.begin_object();
  w.key("three_party").value(true);
  w.key("first");
  write_session(w, o.first, opt);
  w.key("second");
  write_session(w, o.second, opt);
  w.end_object();
  return w.str() + "\n";
}

inline constexpr std::string_view kRoundCsvColumns =
    "index,phase_a,phase_b,phase_c,retained,outcome_a,outcome_b,outcome_c,parity,key_bit,d_bit,c_bit,e_bit,b_bit,"
    "violation";

/// Header and summary travel as '#' comment lines around one row per round.
inline std::string session_csv(const SessionOutput& s, const OutputOptions& opt = {}) {
  const bool sec = opt.reveal_secret;
  const auto& cfg = s.transcript.config;
  std::ostringstream o;
  o << "# method=" << to_string(cfg.method) << '\n';
  o << "# spec=" << (sec ? cfg.spec.to_string() : std::string("redacted")) << '\n';
  o << "# mode=" << to_string(cfg.mode) << '\n';
  o << "# menu=";
  if (cfg.menu) {
    o << format_real((*cfg.menu)[0]) << ';' << format_real((*cfg.menu)[1]) << ';' << format_real((*cfg.menu)[2]);
  }
  o << '\n';
  o << "# seed=" << cfg.seed << '\n';
  o << "# key_length=" << cfg.key_length << '\n';
  o << kRoundCsvColumns << '\n';
  const auto opt_bit = [](std::optional<Bit> b) { return b ? std::to_string(*b) : std::string(); };
  for (const auto& r : s.transcript.rounds) {
    o << r.index << ',' << format_real(r.phases[0]) << ',' << (sec ? format_real(r.phases[1]) : "") << ','
      << format_real(r.phases[2]) << ',' << (r.retained ? 1 : 0) << ','
      << (sec ? std::to_string(sign_of(r.outcomes[0])) : "") << ','
      << (sec ? std::to_string(sign_of(r.outcomes[1])) : "") << ',' << sign_of(r.outcomes[2]) << ','
      << (sec && r.parity ? std::to_string(sign_of(*r.parity)) : "") << ','
      << (sec ? opt_bit(r.key_bit) : "") << ',' << opt_bit(r.d_bit) << ',' << static_cast<int>(r.c_bit) << ','
      << opt_bit(r.e_bit) << ',' << (sec ? std::to_string(r.b_bit) : "") << ',' << (r.violation ? 1 : 0) << '\n';
  }
  const auto& d = s.result.detection;
  o << "# rounds_used=" << s.result.rounds_used << '\n';
  if (sec) {
    o << "# key_sent=" << bits_to_string(s.result.key_sent) << '\n';
    o << "# key_recovered=" << bits_to_string(s.result.key_recovered) << '\n';
  }
  o << "# detection rounds_checked=" << d.rounds_checked << " violations=" << d.violations
    << " rate=" << format_real(d.rate) << " threshold=" << format_real(d.threshold)
    << " verdict=" << to_string(d.verdict) << '\n';
  return o.str();
}

inline std::string three_party_csv(const ThreePartyOutput& o, const OutputOptions& opt = {}) {
  return "# run=1\n" + session_csv(o.first, opt) + "# run=2\n" + session_csv(o.second, opt);
}

inline std::string sweep_csv(std::string_view parameter_name, const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << parameter_name << ",oracle_rate,mc_rate,stderr\n";
  for (const auto& r : rows) {
    o << format_real(r.parameter) << ',' << format_real(r.oracle_rate) << ',' << format_real(r.mc_rate) << ','
      << format_real(r.std_error) << '\n';
  }
  return o.str();
}

}  // namespace ghzqkd
