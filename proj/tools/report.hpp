#pragma once

// JSON encodings shared by all subcommands. Complex numbers are {"re","im"},
// Infinity is {"inf":true}, exact rationals are decimal strings "p" or "p/q".

#include <json.hpp>
#include <string>
#include <vector>

#include "ratdyn/ergodic.hpp"
#include "ratdyn/periodic.hpp"
#include "ratdyn/spectra.hpp"

namespace ratdyn::cli {

using json = nlohmann::ordered_json;

inline json to_json(const Complex& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const SpherePoint& p) {
  if (p.infinite) return json{{"inf", true}};
  return to_json(p.z);
}

inline json to_json(const mpq_class& q) { return q.get_str(); }

inline json to_json(const GaussRational& g) {
  if (g.is_real()) return g.re().get_str();
  return json{{"re", g.re().get_str()}, {"im", g.im().get_str()}};
}

template <typename T>
json coefficient_list(const Polynomial<T>& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_json(c));
  if (a.empty()) a.push_back("0");
  return a;
}

/// Compact display, e.g. "λ^2-2λ-4"; coefficients over Q, highest degree first.
inline std::string display(const QPoly& q, const std::string& var = "λ") {
  if (q.is_zero()) return "0";
  std::string out;
  for (int i = q.degree(); i >= 0; --i) {
    const mpq_class& c = q[i];
    if (sgn(c) == 0) continue;
    mpq_class a = abs(c);
    if (sgn(c) < 0) out += "-";
    else if (!out.empty()) out += "+";
    const bool unit = a == 1;
    if (i == 0 || !unit) out += a.get_str();
    if (i >= 1) out += var;
    if (i > 1) out += "^" + std::to_string(i);
  }
  return out;
}

inline json to_json(const QPoly& q) {
  return json{{"text", display(q)}, {"coefficients", coefficient_list(q)}};
}

inline json to_json(const CycleRecord& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(to_json(p));
  json chi = std::isfinite(c.char_exponent) ? json(c.char_exponent) : json(nullptr);
  return json{{"period", c.period}, {"points", pts},      {"multiplier", to_json(c.multiplier)},
              {"chi", chi},         {"repelling", c.repelling}};
}

inline json to_json(const PeriodSpectrum& s) {
  json factors = json::array();
  for (const auto& f : s.factors) {
    json j = to_json(f.q);
    j["multiplicity"] = f.multiplicity;
    factors.push_back(j);
  }
  return json{{"period", s.period},
              {"cycle_count", s.cycle_count},
              {"certificate", s.certificate},
              {"primes_used", s.primes_used},
              {"factors", factors}};
}

inline json to_json(const LyapunovEstimate& e) {
  return json{{"method", e.method == LyapunovEstimate::Method::MonteCarlo ? "MonteCarlo" : "PeriodicAverage"},
              {"value", e.value},
              {"std_error", e.std_error},
              {"sample_count", e.sample_count},
              {"clipped", e.clipped}};
}

inline json map_json(const ExactMap& f) {
  return json{{"expression", "(" + f.num().str() + ")/(" + f.den().str() + ")"},
              {"degree", f.degree()},
              {"num", coefficient_list(f.num())},
              {"den", coefficient_list(f.den())}};
}

/// Minimal CSV rendering of a header and rows of scalar JSON cells.
inline std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows) {
  auto cell = [](const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    return s;
  };
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i]);
    out += "\n";
  }
  return out;
}

}  // namespace ratdyn::cli
