#pragma once

// Command-line front end. Exit codes: 0 clean, 2 Eve detected, 1 usage or
// configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ghz_math.hpp"
#include "oracles.hpp"
#include "protocol.hpp"
#include "quantum.hpp"
#include "serialize.hpp"
#include "sweep.hpp"

namespace ghzqkd::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDetected = 2;

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid " + what + " '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("invalid " + what + " '" + text + "'");
  return v;
}

/// Decimal radians, or a multiple of pi such as "pi", "pi/2", "2pi/3", "-pi/4".
inline double parse_angle(const std::string& raw) {
  std::string s = trim(raw);
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_real(s, "angle");
  std::string coef = s.substr(0, pos);
  std::string rest = s.substr(pos + 2);
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+") {
    if (coef.back() == '*') coef.pop_back();
    c = parse_real(coef, "angle");
  }
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("invalid angle '" + raw + "'");
    den = parse_real(rest.substr(1), "angle");
    if (den == 0.0) throw ConfigError("invalid angle '" + raw + "'");
  }
  return c * kPi / den;
}

inline std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_angle(item));
  return out;
}

inline std::array<double, 3> parse_triple(const std::string& text, const std::string& what) {
  const auto v = parse_angle_list(text);
  if (v.size() != 3) throw ConfigError(what + " needs exactly three comma-separated angles");
  return {v[0], v[1], v[2]};
}

inline AngleMenu parse_menu(const std::string& text) { return AngleMenu(parse_triple(text, "--menu")); }

inline Parity parse_parity(const std::string& text) {
  if (text == "+" || text == "+1" || text == "1") return Parity::Plus;
  if (text == "-" || text == "-1") return Parity::Minus;
  throw ConfigError("invalid parity '" + text + "', expected +1 or -1");
}

inline MeasurementMode parse_mode(const std::string& text) {
  if (text == "spin") return MeasurementMode::Spin;
  if (text == "pol" || text == "polarization") return MeasurementMode::Polarization;
  throw ConfigError("invalid mode '" + text + "', expected spin or pol");
}

/// --seed, then GHZQKD_SEED, then a fresh random seed.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, bool& generated) {
  generated = false;
  if (flag) return *flag;
  if (const char* env = std::getenv("GHZQKD_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("invalid GHZQKD_SEED '") + env + "'");
  }
  generated = true;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline int emit(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << text;
    return kExitClean;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot open output file " << path << '\n';
    return kExitUsage;
  }
  f << text;
  return kExitClean;
}

struct SimulateArgs {
  std::string method = "2";
  std::string base_method = "2";
  std::string spec = "+++,-";
  std::string mode = "spin";
  std::string menu;
  std::string parity = "+1";
  std::optional<std::size_t> key_length;
  std::size_t rounds = 0;
  std::optional<std::uint64_t> seed;
  std::string eve = "none";
  std::optional<std::string> eve_angle;
  double noise_p = 0.0;
  std::optional<double> threshold;
  std::string output;
  std::string format = "json";
  bool reveal_secret = false;
  bool demo = false;
};

inline ProtocolConfig build_config(const SimulateArgs& a, Method method, std::uint64_t seed) {
  ProtocolConfig cfg;
  cfg.method = method;
  cfg.spec = GhzSpec::parse(a.spec);
  cfg.mode = parse_mode(a.mode);
  if (!a.menu.empty()) cfg.menu = parse_menu(a.menu);
  const Parity parity = parse_parity(a.parity);
  cfg.bob_parity_preference = parity;
  cfg.detection_class = parity;
  cfg.key_length = a.key_length ? *a.key_length : (a.demo ? 4 : 128);
  cfg.max_rounds = a.rounds;
  cfg.seed = seed;
  if (a.eve == "none") {
    cfg.eve = EveStrategy::none();
  } else if (a.eve == "intercept-a") {
    if (a.eve_angle) {
      cfg.eve = EveStrategy::intercept_fixed(parse_angle(*a.eve_angle));
    } else {
      cfg.eve = cfg.menu ? EveStrategy::intercept_guess() : EveStrategy::intercept_fixed(0.0);
    }
  } else if (a.eve == "impersonate-charlie") {
    cfg.eve = EveStrategy::impersonate_charlie();
  } else {
    throw ConfigError("invalid --eve '" + a.eve + "'");
  }
  cfg.noise = a.noise_p > 0.0 ? NoiseModel::depolarizing(a.noise_p) : NoiseModel::none();
  cfg.threshold = a.threshold;
  cfg.validate();
  return cfg;
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "json" && a.format != "csv") throw ConfigError("--format must be json or csv");
  bool generated = false;
  const std::uint64_t seed = resolve_seed(a.seed, generated);
  if (generated) err << "seed=" << seed << '\n';
  const OutputOptions opt{a.reveal_secret};

  auto to_method = [](const std::string& m) {
    if (m == "1") return Method::Method1;
    if (m == "2") return Method::Method2;
    throw ConfigError("invalid method '" + m + "', expected 1, 2 or 3party");
  };

  if (a.method == "3party") {
    const ProtocolConfig cfg = build_config(a, to_method(a.base_method), seed);
    const ThreePartyOutput o = run_three_party(cfg);
    const std::string text = a.format == "json" ? three_party_json(o, opt) : three_party_csv(o, opt);
    if (int rc = emit(text, a.output, out, err); rc != kExitClean) return rc;
    err << "verdict=" << (any_detected(o) ? "eve-detected" : "clean") << '\n';
    return any_detected(o) ? kExitDetected : kExitClean;
  }

  const ProtocolConfig cfg = build_config(a, to_method(a.method), seed);
  const SessionOutput s = run_session(cfg);
  const std::string text = a.format == "json" ? session_json(s, opt) : session_csv(s, opt);
  if (int rc = emit(text, a.output, out, err); rc != kExitClean) return rc;
  err << "verdict=" << to_string(s.result.detection.verdict) << '\n';
  return s.result.detection.verdict == Verdict::EveDetected ? kExitDetected : kExitClean;
}

struct ExpectationArgs {
  std::string spec = "+++,-";
  std::string phases;
  std::string mode = "spin";
  std::string format = "text";
};

inline int cmd_expectation(const ExpectationArgs& a, std::ostream& out) {
  const GhzSpec spec = GhzSpec::parse(a.spec);
  const MeasurementMode mode = parse_mode(a.mode);
  const PhaseTriple phases(parse_triple(a.phases, "--phases"));
  const double analytic = analytic_expectation(spec, phases);
  const double numeric = expectation(ghz_state(spec), equatorial_settings(mode, phases.values));
  const auto parity = is_super_classical(spec, phases);
  if (a.format == "json") {
    JsonWriter w;
    w.begin_object();
    w.key("spec").value(spec.to_string());
    w.key("mode").value(to_string(mode));
    w.key("analytic").value(analytic);
    w.key("numeric").value(numeric);
    w.key("difference").value(analytic - numeric);
    w.key("parity");
    parity ? w.value(sign_of(*parity)) : w.null();
    w.end_object();
    out << w.str() << '\n';
  } else {
    out << "analytic=" << format_real(analytic) << '\n';
    out << "numeric=" << format_real(numeric) << '\n';
    out << "difference=" << format_real(analytic - numeric) << '\n';
    out << "parity=" << (parity ? std::to_string(sign_of(*parity)) : std::string("none")) << '\n';
  }
  return kExitClean;
}

struct MenuEvalArgs {
  std::string menu;
  std::string spec = "+++,-";
};

inline int cmd_menu_eval(const MenuEvalArgs& a, std::ostream& out) {
  const AngleMenu menu = parse_menu(a.menu);
  const GhzSpec spec = GhzSpec::parse(a.spec);
  const auto triples = super_classical_triples(menu, spec);
  out << "quality=" << triples.size() << "/27 (" << format_real(menu_quality(menu, spec)) << ")\n";
  for (const auto& t : triples) {
    out << format_real(t[0]) << ',' << format_real(t[1]) << ',' << format_real(t[2])
        << " parity=" << sign_of(*is_super_classical(spec, t)) << '\n';
  }
  return kExitClean;
}

struct SweepArgs {
  std::string variable;
  std::string values;
  std::size_t rounds = 10000;
  std::optional<std::uint64_t> seed;
  std::string spec = "+++,-";
  std::string mode = "spin";
  std::string phases;
  std::string menu;
  std::optional<std::string> eve_angle;
  double noise_p = 0.0;
  std::string output;
  std::string format = "csv";
};

/// A super-classical triple for the variant: phi_a = 0, phi_c = pi/2, phi_b solved
/// for parity +1.
inline PhaseTriple default_sweep_triple(const GhzSpec& spec) {
  return PhaseTriple(0.0, solve_bob_phase(spec, 0.0, kPi / 2.0, Parity::Plus), kPi / 2.0);
}

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "json" && a.format != "csv") throw ConfigError("--format must be json or csv");
  bool generated = false;
  const std::uint64_t seed = resolve_seed(a.seed, generated);
  const GhzSpec spec = GhzSpec::parse(a.spec);
  const MeasurementMode mode = parse_mode(a.mode);
  const PhaseTriple triple = a.phases.empty() ? default_sweep_triple(spec) : PhaseTriple(parse_triple(a.phases, "--phases"));
  if (!is_super_classical(spec, triple)) throw ConfigError("--phases must form a super-classical triple");

  std::vector<SweepRow> rows;
  std::string name;
  std::optional<InterceptAveraging> averages;
  if (a.variable == "eve-angle") {
    name = "delta";
    const auto deltas = a.values.empty() ? std::vector<double>{0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2}
                                         : parse_angle_list(a.values);
    const NoiseModel noise = a.noise_p > 0.0 ? NoiseModel::depolarizing(a.noise_p) : NoiseModel::none();
    rows = sweep_eve_angle(spec, mode, triple, deltas, a.rounds, seed, noise);
    if (!a.menu.empty()) {
      const AngleMenu menu = parse_menu(a.menu);
      const double eve = a.eve_angle ? parse_angle(*a.eve_angle) : menu[0];
      averages = intercept_averagings(spec, mode, menu, triple, eve);
    }
  } else if (a.variable == "noise-p") {
    name = "p";
    std::vector<double> ps;
    if (a.values.empty()) {
      for (int i = 0; i <= 10; ++i) ps.push_back(i / 10.0);
    } else {
      std::stringstream ss(a.values);
      std::string item;
      while (std::getline(ss, item, ',')) ps.push_back(parse_real(trim(item), "probability"));
    }
    std::optional<double> eve;
    if (a.eve_angle) eve = parse_angle(*a.eve_angle);
    rows = sweep_noise(spec, mode, triple, ps, a.rounds, seed, eve);
  } else {
    throw ConfigError("--sweep must be eve-angle or noise-p");
  }

  std::string text;
  if (a.format == "csv") {
    text = "# seed=" + std::to_string(seed) + "\n" + sweep_csv(name, rows);
    if (averages) {
      text += "# avg_over_eve_guesses=" + format_real(averages->over_eve_guesses) + "\n";
      text += "# avg_over_menu_draws=" + format_real(averages->over_menu_draws) + "\n";
      text += "# avg_over_both=" + format_real(averages->over_both) + "\n";
    }
  } else {
    JsonWriter w;
    w.begin_object();
    w.key("seed").value(seed);
    w.key("parameter").value(name);
    w.key("rows").begin_array();
    for (const auto& r : rows) {
      w.begin_object();
      w.key(name).value(r.parameter);
      w.key("oracle_rate").value(r.oracle_rate);
      w.key("mc_rate").value(r.mc_rate);
      w.key("stderr").value(r.std_error);
      w.end_object();
    }
    w.end_array();
    if (averages) {
      w.key("averages").begin_object();
      w.key("over_eve_guesses").value(averages->over_eve_guesses);
      w.key("over_menu_draws").value(averages->over_menu_draws);
      w.key("over_both").value(averages->over_both);
      w.end_object();
    }
    w.end_object();
    text = w.str() + "\n";
  }
  if (generated) err << "seed=" << seed << '\n';
  return emit(text, a.output, out, err);
}

/// Parses and dispatches; never throws.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"GHZ expectation-value quantum key distribution simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run a key distribution session");
  s->add_option("--method", sim.method, "1, 2 or 3party")->check(CLI::IsMember({"1", "2", "3party"}));
  s->add_option("--base-method", sim.base_method, "method used by both runs of 3party")
      ->check(CLI::IsMember({"1", "2"}));
  s->add_option("--spec", sim.spec, "GHZ variant, e.g. +++,-");
  s->add_option("--mode", sim.mode, "spin or pol");
  s->add_option("--menu", sim.menu, "three angles, e.g. 0,pi/2,pi");
  s->add_option("--parity", sim.parity, "Bob's parity (Method 2) / detection class (Method 1)");
  s->add_option("--key-length", sim.key_length, "key bits");
  s->add_option("--rounds", sim.rounds, "maximum rounds");
  s->add_option("--seed", sim.seed, "64-bit seed");
  s->add_option("--eve", sim.eve, "none, intercept-a or impersonate-charlie")
      ->check(CLI::IsMember({"none", "intercept-a", "impersonate-charlie"}));
  s->add_option("--eve-angle", sim.eve_angle, "fixed angle for intercept-a");
  s->add_option("--noise-p", sim.noise_p, "depolarizing probability per transiting qubit");
  s->add_option("--threshold", sim.threshold, "violation-rate threshold (default: calibrated)");
  s->add_option("--output", sim.output, "output path (default stdout)");
  s->add_option("--format", sim.format, "json or csv");
  s->add_flag("--reveal-secret", sim.reveal_secret, "include keys, outcomes and the GHZ variant");
  s->add_flag("--demo", sim.demo, "4-bit key");

  ExpectationArgs ex;
  auto* e = app.add_subcommand("expectation", "closed-form and numeric expectation values");
  e->add_option("--spec", ex.spec, "GHZ variant");
  e->add_option("--phases", ex.phases, "three phases")->required();
  e->add_option("--mode", ex.mode, "spin or pol");
  e->add_option("--format", ex.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  MenuEvalArgs me;
  auto* m = app.add_subcommand("menu-eval", "score an angle menu");
  m->add_option("--menu", me.menu, "three angles")->required();
  m->add_option("--spec", me.spec, "GHZ variant");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "oracle vs Monte Carlo violation curves");
  w->add_option("--sweep", sw.variable, "eve-angle or noise-p")->required();
  w->add_option("--values", sw.values, "comma-separated parameter values");
  w->add_option("--rounds", sw.rounds, "Monte Carlo rounds per point");
  w->add_option("--seed", sw.seed, "64-bit seed");
  w->add_option("--spec", sw.spec, "GHZ variant");
  w->add_option("--mode", sw.mode, "spin or pol");
  w->add_option("--phases", sw.phases, "super-classical triple");
  w->add_option("--menu", sw.menu, "menu for the averaging summary");
  w->add_option("--eve-angle", sw.eve_angle, "Eve's angle");
  w->add_option("--noise-p", sw.noise_p, "background noise for eve-angle sweeps");
  w->add_option("--output", sw.output, "output path");
  w->add_option("--format", sw.format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int rc = app.exit(pe, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return rc == 0 ? kExitClean : kExitUsage;
  }

  try {
    if (*s) return cmd_simulate(sim, out, err);
    if (*e) return cmd_expectation(ex, out);
    if (*m) return cmd_menu_eval(me, out);
    if (*w) return cmd_sweep(sw, out, err);
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ghzqkd::cli
