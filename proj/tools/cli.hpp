#pragma once

// Subcommand dispatch. Every run prints one JSON report (or a CSV table with
// --csv) on stdout and diagnostics on stderr.
//
// Exit codes: 0 success, 2 parse or configuration error, 3 numeric failure,
// 4 degree cap exceeded.

#include <CLI11.hpp>
#include <chrono>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "map_parser.hpp"
#include "ratdyn/ergodic.hpp"
#include "ratdyn/exceptional.hpp"
#include "ratdyn/homoclinic.hpp"
#include "ratdyn/spectra.hpp"
#include "report.hpp"

namespace ratdyn::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegreeCapExceeded: return 4;
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DegenerateMap:
    case ErrorCode::DegreeTooLow:
    case ErrorCode::SingularCurve:
    case ErrorCode::NotRationalCoefficients:
    case ErrorCode::NotRepelling:
    case ErrorCode::InPostcriticalSet:
    case ErrorCode::CommonRootAtPole: return 2;
    default: return 3;
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

/// Mutable state of one invocation, filled in by the command body.
struct Run {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 1;
  json results = json::object();
  bool partial = false;
  std::optional<Table> table;
};

namespace detail {

inline ExactMap map_from_json(const json& j) {
  const json* m = &j;
  if (m->contains("results")) m = &(*m)["results"];
  if (m->contains("map")) m = &(*m)["map"];
  if (!m->contains("num") || !m->contains("den")) throw Error(ErrorCode::ParseError, "JSON input has no num/den coefficients");
  auto coeffs = [](const json& a) {
    std::vector<GaussRational> out;
    for (const auto& c : a) {
      if (c.is_string()) out.emplace_back(parse_rational(c.get<std::string>()));
      else if (c.is_object()) out.emplace_back(parse_rational(c.at("re").get<std::string>()), parse_rational(c.at("im").get<std::string>()));
      else if (c.is_number_integer()) out.emplace_back(mpq_class(c.get<long>()));
      else throw Error(ErrorCode::ParseError, "coefficients must be rational strings");
    }
    return out;
  };
  return build_map(coeffs((*m)["num"]), coeffs((*m)["den"]));
}

inline ExactMap read_map(const std::string& spec, std::istream& in) {
  if (spec != "-") return parse_map(spec);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::ParseError, "empty map on stdin");
  if (text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string("stdin JSON: ") + e.what());
    }
    return map_from_json(j);
  }
  auto last = text.find_last_not_of(" \t\r\n");
  return parse_map(text.substr(first, last - first + 1));
}

inline SpherePoint parse_point(const std::string& s) {
  if (s == "inf" || s == "infinity") return SpherePoint::infinity();
  auto parts = split(s, ',');
  try {
    if (parts.size() == 1) return SpherePoint::finite(Complex(std::stod(parts[0]), 0.0));
    if (parts.size() == 2) return SpherePoint::finite(Complex(std::stod(parts[0]), std::stod(parts[1])));
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "point must be 're', 're,im' or 'inf', got '" + s + "'");
}

inline NumberFieldSpec parse_field(const std::string& s) {
  if (s == "Q") return NumberFieldSpec::rationals();
  if (s.rfind("quad:", 0) == 0) {
    try {
      return NumberFieldSpec::quadratic(mpz_class(s.substr(5)));
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::ParseError, "bad discriminant in '" + s + "'");
    }
  }
  if (s.rfind("poly:", 0) == 0) return NumberFieldSpec::from_polynomial(clear_denominators(parse_polynomial(s.substr(5), 'x')));
  throw Error(ErrorCode::ParseError, "field must be Q, quad:D or poly:\"...\", got '" + s + "'");
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_int(p, "period"));
  return out;
}

inline std::string kind_name(ExceptionalClass::Kind k) {
  using K = ExceptionalClass::Kind;
  switch (k) {
    case K::Power: return "Power";
    case K::Chebyshev: return "Chebyshev";
    case K::LattesFlexible: return "LattesFlexible";
    case K::LattesRigid: return "LattesRigid";
    case K::NotExceptional: return "NotExceptional";
    case K::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

inline std::string status_name(OrbifoldSignature::Status s) {
  switch (s) {
    case OrbifoldSignature::Status::PCF: return "PCF";
    case OrbifoldSignature::Status::NotPCF: return "NotPCF";
    case OrbifoldSignature::Status::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Command bodies

inline void cmd_cycles(Run& r, const ExactMap& f, int period, bool exact) {
  PeriodicConfig cfg;
  cfg.seed ^= r.seed;
  PeriodicSolver solver(to_complex(f), cfg);
  auto cycles = cycles_of_period(solver, period);
  json arr = json::array();
  Table t{{"period", "index", "multiplier_re", "multiplier_im", "chi", "repelling"}, {}};
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    arr.push_back(to_json(cycles[i]));
    t.rows.push_back({period, static_cast<int>(i), cycles[i].multiplier.real(), cycles[i].multiplier.imag(),
                      arr.back()["chi"], cycles[i].repelling});
  }
  r.results["period"] = period;
  r.results["point_count"] = solver.points(period).size();
  r.results["expected_point_count"] = exact_period_count(f.degree(), period);
  r.results["cycles"] = arr;
  r.table = t;
  if (exact) {
    SpectrumConfig scfg;
    scfg.seed ^= r.seed;
    SpectrumEngine engine(f, scfg);
    r.results["exact_spectrum"] = to_json(engine.spectrum(period));
  }
}

inline void cmd_spectrum(Run& r, const ExactMap& f, int max_period) {
  SpectrumConfig cfg;
  cfg.seed ^= r.seed;
  SpectrumEngine engine(f, cfg);
  r.results["periods"] = json::array();
  Table t{{"period", "factor", "multiplicity", "certificate"}, {}};
  r.table = t;
  for (int n = 1; n <= max_period; ++n) {
    r.partial = n > 1;
    auto s = engine.spectrum(n);
    r.results["periods"].push_back(to_json(s));
    for (const auto& fa : s.factors) r.table->rows.push_back({n, display(fa.q), fa.multiplicity, s.certificate});
  }
  r.partial = false;
}

inline void cmd_field_check(Run& r, const ExactMap& f, int max_period, const std::string& field) {
  auto K = detail::parse_field(field);
  SpectrumConfig cfg;
  cfg.seed ^= r.seed;
  auto spec = algebraic_spectrum(f, max_period, cfg);
  auto m = membership(spec, K);
  auto iv = integrality(spec);
  json mem{{"field", K.name()}, {"status", m.all_in ? "AllIn" : "FirstViolation"}, {"heuristic", m.heuristic}};
  if (!m.all_in) {
    mem["period"] = m.period;
    mem["factor"] = display(m.factor);
    mem["factor_coefficients"] = coefficient_list(m.factor);
  }
  json integ{{"all_algebraic_integers", iv.all_algebraic_integers}, {"all_rational_integers", iv.all_rational_integers}};
  if (!iv.all_algebraic_integers) {
    integ["period"] = iv.period;
    integ["factor"] = display(iv.factor);
  }
  r.results["max_period"] = max_period;
  r.results["membership"] = mem;
  r.results["integrality"] = integ;
  r.table = Table{{"field", "status", "period", "factor"},
                  {{K.name(), mem["status"], m.all_in ? json(nullptr) : json(m.period),
                    m.all_in ? json(nullptr) : json(display(m.factor))}}};
}

inline void cmd_classify(Run& r, const ExactMap& f, int max_period) {
  SpectrumConfig cfg;
  cfg.seed ^= r.seed;
  auto c = classify(f, max_period, cfg);
  json weights = json::array(), pts = json::array();
  for (int w : c.signature.weights) weights.push_back(w == 0 ? json("inf") : json(w));
  for (const auto& p : c.signature.points) pts.push_back(to_json(p));
  r.results["class"] = c.str();
  r.results["kind"] = detail::kind_name(c.kind);
  r.results["sign"] = c.sign;
  r.results["degree"] = c.degree;
  r.results["signature"] = json{{"status", detail::status_name(c.signature.status)},
                                {"text", c.signature.str()},
                                {"weights", weights},
                                {"points", pts}};
  r.results["evidence"] = json::array({"orbifold signature " + c.signature.str(), c.reason});
  r.table = Table{{"class", "signature", "reason"}, {{c.str(), c.signature.str(), c.reason}}};
}

inline void cmd_lyapunov(Run& r, const ExactMap& f, long samples, int burn, std::optional<int> periodic) {
  const auto fn = to_complex(f);
  auto mc = lyapunov(fn, backward_orbit_sample(fn, samples, burn, r.seed));
  r.results["monte_carlo"] = to_json(mc);
  r.results["periodic"] = nullptr;
  r.results["difference"] = nullptr;
  r.results["agreement_bound"] = nullptr;
  r.table = Table{{"method", "value", "std_error", "samples"}, {{"MonteCarlo", mc.value, mc.std_error, mc.sample_count}}};
  if (periodic) {
    r.partial = true;
    PeriodicConfig cfg;
    cfg.seed ^= r.seed;
    auto pe = lyapunov_from_periodic(f, *periodic, cfg);
    r.partial = false;
    r.results["periodic"] = to_json(pe);
    r.results["periodic"]["period"] = *periodic;
    r.results["difference"] = std::abs(pe.value - mc.value);
    r.results["agreement_bound"] = 3 * (mc.std_error + pe.std_error + 0.02);
    r.table->rows.push_back({"PeriodicAverage", pe.value, pe.std_error, pe.sample_count});
  }
}

inline void cmd_equidist(Run& r, const ExactMap& f, const std::vector<int>& periods, int degree, int depth, double clip) {
  const auto fn = to_complex(f);
  if (depth < 0) {
    depth = 0;
    while (std::pow(static_cast<double>(f.degree()), depth + 1) <= 65536.0) ++depth;
  }
  auto ref = preimage_tree_cloud(fn, depth, r.seed);
  PeriodicConfig cfg;
  cfg.seed ^= r.seed;
  PeriodicSolver solver(fn, cfg);
  std::vector<PointCloud> clouds;
  for (int n : periods) clouds.push_back(periodic_cloud(solver, n));
  auto rep = weak_convergence_report(fn, clouds, ref, degree, clip);
  r.results["reference"] = json{{"kind", "preimage-tree"}, {"depth", depth}, {"points", ref.size()}};
  r.results["test_functions"] = rep.test_functions;
  json rows = json::array();
  Table t{{"period"}, {}};
  for (const auto& name : rep.test_functions) t.header.push_back(name);
  for (std::size_t i = 0; i < periods.size(); ++i) {
    rows.push_back(json{{"period", periods[i]}, {"points", clouds[i].size()}, {"discrepancy", rep.discrepancy[i]}});
    std::vector<json> row{periods[i]};
    for (double v : rep.discrepancy[i]) row.push_back(v);
    t.rows.push_back(row);
  }
  r.results["rows"] = rows;
  r.table = t;
}

inline void cmd_homoclinic(Run& r, const ExactMap& f, const std::string& point, int q, int n_min, int n_max, int depth) {
  auto seed = find_seed(to_complex(f), detail::parse_point(point), q, depth);
  json chain = json::array();
  for (const auto& p : seed.chain) chain.push_back(to_json(p));
  r.results["seed"] = json{{"z0", to_json(seed.z0)},       {"q", seed.q},         {"multiplier", to_json(seed.lambda)},
                           {"chi0", seed.chi0()},         {"l", seed.l},         {"chain", chain},
                           {"r_U", seed.r_U},             {"r_V", seed.r_V},     {"r_W", seed.r_W},
                           {"contraction", seed.contraction}};
  if (n_min <= 0) n_min = 2 * seed.l + 1;
  auto seq = lemma_sequence(seed, n_min, n_max);
  json entries = json::array();
  Table t{{"n", "chi", "deviation", "residual", "period_verified"}, {}};
  for (const auto& e : seq.entries) {
    entries.push_back(json{{"n", e.n},
                           {"w", to_json(e.w)},
                           {"period_verified", e.period_verified},
                           {"residual", e.residual},
                           {"multiplier", to_json(e.lambda)},
                           {"chi", e.chi}});
    t.rows.push_back({e.n, e.chi, e.chi - seq.target, e.residual, e.period_verified});
  }
  r.results["target_chi"] = seq.target;
  r.results["entries"] = entries;
  if (seq.entries.size() >= 4) {
    auto d = convergence_report(seq, seed);
    r.results["diagnostics"] = json{{"deviation", d.deviation},
                                    {"max_abs_deviation", d.max_abs_deviation},
                                    {"fitted_c", d.fitted_c},
                                    {"max_c_ratio", d.max_c_ratio},
                                    {"fit_a", to_json(d.fit_a)},
                                    {"fit_b", to_json(d.fit_b)},
                                    {"fit_relative_residual", d.fit_relative_residual},
                                    {"lower_slack", d.lower_slack},
                                    {"upper_slack", d.upper_slack}};
  }
  r.table = t;
}

inline void cmd_zdunik(Run& r, const ExactMap& f, int max_period, long samples, int burn) {
  const auto fn = to_complex(f);
  auto l = lyapunov(fn, backward_orbit_sample(fn, samples, burn, r.seed));
  PeriodicConfig cfg;
  cfg.seed ^= r.seed;
  PeriodicSolver solver(fn, cfg);
  auto hits = zdunik_scan(solver, max_period, l);
  json arr = json::array();
  Table t{{"period", "chi", "margin", "multiplier_re", "multiplier_im"}, {}};
  for (const auto& h : hits) {
    json c = to_json(h.cycle);
    c["margin"] = h.margin;
    arr.push_back(c);
    t.rows.push_back({h.cycle.period, h.cycle.char_exponent, h.margin, h.cycle.multiplier.real(), h.cycle.multiplier.imag()});
  }
  r.results["lyapunov"] = to_json(l);
  r.results["max_period"] = max_period;
  r.results["hits"] = arr;
  r.results["max_margin"] = hits.empty() ? json(nullptr) : json(hits.front().margin);
  r.table = t;
}

inline void cmd_make(Run& r, const ExactMap& f) {
  r.results["map"] = map_json(f);
  if (f.den().degree() == 0 && f.den()[0] == GaussRational(1)) r.results["coefficients"] = coefficient_list(f.num());
  r.table = Table{{"num", "den"}, {{r.results["map"]["num"].dump(), r.results["map"]["den"].dump()}}};
}

// ---------------------------------------------------------------------------

inline json make_report(const Run& r, int exit_code, const std::optional<std::pair<std::string, std::string>>& error,
                        double seconds) {
  json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["version"] = kVersion;
  rep["command"] = r.command;
  rep["status"] = exit_code == 0 ? "ok" : "error";
  rep["exit_code"] = exit_code;
  rep["seed"] = r.seed;
  rep["config"] = r.config;
  rep["results"] = r.results;
  rep["partial"] = r.partial;
  rep["error"] = error ? json{{"code", error->first}, {"message", error->second}} : json(nullptr);
  rep["timing"] = json{{"seconds", seconds}};
  return rep;
}

/// Entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"ratdyn: dynamics of rational maps on the Riemann sphere", "ratdyn"};
  app.set_config("--config", "", "Read options from a TOML/INI file; flags on the command line win");
  app.require_subcommand(1);
  app.fallthrough();  // inherited: --seed, --csv and --config also work after the subcommand
  bool csv = false;
  std::uint64_t seed = 1;
  app.add_flag("--csv", csv, "Emit the result table as CSV instead of JSON");
  app.add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();

  std::string map_spec;
  auto add_map = [&](CLI::App* s) {
    s->add_option("--map", map_spec, "Rational expression in z, a builder form, or - for stdin")->required();
  };
  int period = 1, max_period = 4, q = 1, n_min = 0, n_max = 25, test_degree = 2, burn = 50, depth = -1,
      search_depth = 16, periodic = 0;
  long samples = 100000;
  bool exact = false;
  double clip = -5.0;
  std::string field = "Q", point, periods = "4,6,8";

  auto* cycles = app.add_subcommand("cycles", "Cycles of one exact period with multipliers");
  add_map(cycles);
  cycles->add_option("--period", period)->required()->check(CLI::PositiveNumber);
  cycles->add_flag("--exact", exact, "Also compute the exact multiplier spectrum");

  auto* spectrum = app.add_subcommand("spectrum", "Factored multiplier polynomials per period");
  add_map(spectrum);
  spectrum->add_option("--max-period", max_period)->required()->check(CLI::PositiveNumber);

  auto* fieldc = app.add_subcommand("field-check", "Number-field membership and integrality of multipliers");
  add_map(fieldc);
  fieldc->add_option("--max-period", max_period)->required()->check(CLI::PositiveNumber);
  fieldc->add_option("--field", field, "Q, quad:D or poly:\"...\" in x")->required();

  auto* classify_c = app.add_subcommand("classify", "Exceptional class with evidence");
  add_map(classify_c);
  classify_c->add_option("--max-period", max_period)->capture_default_str()->check(CLI::PositiveNumber);

  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponent estimates");
  add_map(lyap);
  lyap->add_option("--samples", samples)->capture_default_str()->check(CLI::PositiveNumber);
  lyap->add_option("--burn", burn)->capture_default_str()->check(CLI::NonNegativeNumber);
  lyap->add_option("--periodic", periodic, "Also average over points of this exact period")->check(CLI::PositiveNumber);

  auto* equi = app.add_subcommand("equidist", "Discrepancy of periodic measures against a reference cloud");
  add_map(equi);
  equi->add_option("--periods", periods)->capture_default_str();
  equi->add_option("--test-degree", test_degree)->capture_default_str()->check(CLI::PositiveNumber);
  equi->add_option("--depth", depth, "Preimage tree depth for the reference (default: about 65536 points)");
  equi->add_option("--clip", clip, "Truncation level for log||f'||")->capture_default_str();

  auto* homo = app.add_subcommand("homoclinic", "Periodic points shadowing a homoclinic return");
  add_map(homo);
  homo->add_option("--point", point, "z0 as 're', 're,im' or 'inf'")->required();
  homo->add_option("--q", q)->capture_default_str()->check(CLI::PositiveNumber);
  homo->add_option("--n-min", n_min, "Smallest period (default 2l+1)");
  homo->add_option("--n-max", n_max)->capture_default_str();
  homo->add_option("--search-depth", search_depth)->capture_default_str()->check(CLI::PositiveNumber);

  auto* zd = app.add_subcommand("zdunik", "Cycles whose exponent exceeds the Lyapunov exponent");
  add_map(zd);
  zd->add_option("--max-period", max_period)->required()->check(CLI::PositiveNumber);
  zd->add_option("--samples", samples)->capture_default_str()->check(CLI::PositiveNumber);
  zd->add_option("--burn", burn)->capture_default_str()->check(CLI::NonNegativeNumber);

  auto* make = app.add_subcommand("make", "Emit coefficients of a standard map");
  make->require_subcommand(1);
  int d = 2, sign_i = 1, m = 2;
  std::string a_s = "-1", b_s = "0";
  auto* mk_power = make->add_subcommand("power", "z^d or z^-d");
  auto* mk_cheb = make->add_subcommand("chebyshev", "+-T_d");
  for (auto* s : {mk_power, mk_cheb}) {
    s->add_option("--d", d)->required();
    s->add_option("--sign", sign_i, "1 or -1")->capture_default_str()->check(CLI::IsMember({1, -1}));
  }
  auto* mk_lattes = make->add_subcommand("lattes", "Multiplication by m on y^2 = x^3 + a x + b");
  mk_lattes->add_option("--a", a_s)->capture_default_str();
  mk_lattes->add_option("--b", b_s)->capture_default_str();
  mk_lattes->add_option("--m", m)->capture_default_str();

  Run r;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    r.command = args.empty() ? "" : args.front();
    out << make_report(r, 2, std::make_pair(std::string("ParseError"), std::string(e.what())), 0.0).dump(2) << "\n";
    return 2;
  }

  r.seed = seed;
  int code = 0;
  std::optional<std::pair<std::string, std::string>> error;
  try {
    for (auto* s : app.get_subcommands()) r.command = s->get_name();
    auto& c = r.config;
    if (!map_spec.empty()) c["map"] = map_spec;
    if (cycles->parsed()) {
      c["period"] = period;
      c["exact"] = exact;
      cmd_cycles(r, detail::read_map(map_spec, in), period, exact);
    } else if (spectrum->parsed()) {
      c["max_period"] = max_period;
      cmd_spectrum(r, detail::read_map(map_spec, in), max_period);
    } else if (fieldc->parsed()) {
      c["max_period"] = max_period;
      c["field"] = field;
      cmd_field_check(r, detail::read_map(map_spec, in), max_period, field);
    } else if (classify_c->parsed()) {
      c["max_period"] = max_period;
      cmd_classify(r, detail::read_map(map_spec, in), max_period);
    } else if (lyap->parsed()) {
      c["samples"] = samples;
      c["burn"] = burn;
      c["periodic"] = periodic > 0 ? json(periodic) : json(nullptr);
      cmd_lyapunov(r, detail::read_map(map_spec, in), samples, burn,
                   periodic > 0 ? std::optional<int>(periodic) : std::nullopt);
    } else if (equi->parsed()) {
      auto ps = detail::parse_int_list(periods);
      c["periods"] = ps;
      c["test_degree"] = test_degree;
      c["depth"] = depth >= 0 ? json(depth) : json(nullptr);
      c["clip"] = clip;
      cmd_equidist(r, detail::read_map(map_spec, in), ps, test_degree, depth, clip);
    } else if (homo->parsed()) {
      c["point"] = point;
      c["q"] = q;
      c["n_min"] = n_min > 0 ? json(n_min) : json(nullptr);
      c["n_max"] = n_max;
      c["search_depth"] = search_depth;
      cmd_homoclinic(r, detail::read_map(map_spec, in), point, q, n_min, n_max, search_depth);
    } else if (zd->parsed()) {
      c["max_period"] = max_period;
      c["samples"] = samples;
      c["burn"] = burn;
      cmd_zdunik(r, detail::read_map(map_spec, in), max_period, samples, burn);
    } else if (make->parsed()) {
      if (mk_power->parsed() || mk_cheb->parsed()) {
        const bool p = mk_power->parsed();
        r.command = p ? "make power" : "make chebyshev";
        c["d"] = d;
        c["sign"] = sign_i;
        cmd_make(r, p ? power_map(d, sign_i) : chebyshev_map(d, sign_i));
      } else {
        r.command = "make lattes";
        c["a"] = a_s;
        c["b"] = b_s;
        c["m"] = m;
        cmd_make(r, flexible_lattes({GaussRational(parse_rational(a_s)), GaussRational(parse_rational(b_s)), m}));
      }
    }
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    error = std::make_pair(std::string(to_string(e.code())), std::string(e.what()));
    err << e.what() << "\n";
  } catch (const std::exception& e) {
    code = 3;
    error = std::make_pair(std::string("InternalError"), std::string(e.what()));
    err << e.what() << "\n";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (csv && code == 0 && r.table) {
    out << to_csv(r.table->header, r.table->rows);
  } else {
    out << make_report(r, code, error, secs).dump(2) << "\n";
  }
  return code;
}

}  // namespace ratdyn::cli
