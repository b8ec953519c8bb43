#pragma once

// Power, Chebyshev and Lattès maps; orbifold signatures of postcritically
// finite maps; and a classifier combining the signature with multiplier
// arithmetic.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ratdyn/intfactor.hpp"
#include "ratdyn/periodic.hpp"
#include "ratdyn/spectra.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

// ---------------------------------------------------------------------------
// Constructors

inline ExactMap power_map(int d, int sign = 1) {
  if (d < 2) throw Error(ErrorCode::DegreeTooLow, "power map needs d >= 2");
  auto mono = Polynomial<GaussRational>::monomial(GaussRational(1), d);
  auto one = Polynomial<GaussRational>::constant(GaussRational(1));
  return sign >= 0 ? build_map(mono.coeffs(), one.coeffs()) : build_map(one.coeffs(), mono.coeffs());
}

/// T_d with T_d(z + 1/z) = z^d + z^-d: T_0 = 2, T_1 = w, T_{k+1} = w T_k - T_{k-1}.
inline ZPoly chebyshev_polynomial(int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "Chebyshev index must be >= 0");
  ZPoly prev = ZPoly::constant(mpz_class(2)), cur = ZPoly::x();
  if (d == 0) return prev;
  for (int k = 1; k < d; ++k) {
    ZPoly next = ZPoly::x() * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

inline Polynomial<GaussRational> to_gauss(const ZPoly& p) {
  return p.map<GaussRational>([](const mpz_class& c) { return GaussRational(mpq_class(c)); });
}

inline ExactMap chebyshev_map(int d, int sign = 1) {
  if (d < 2) throw Error(ErrorCode::DegreeTooLow, "Chebyshev map needs d >= 2");
  auto t = to_gauss(chebyshev_polynomial(d));
  if (sign < 0) t = -t;
  return build_map(t.coeffs(), Polynomial<GaussRational>::constant(GaussRational(1)).coeffs());
}

/// Weierstrass curve y^2 = x^3 + a x + b and multiplication by m.
struct LattesSpec {
  GaussRational a{0}, b{0};
  int m = 2;
};

/// Division polynomials in x alone: psi_n = g_n for odd n, psi_n = 2y g_n for
/// even n, with y^2 eliminated via 4y^2 = 4(x^3 + a x + b).
inline std::vector<Polynomial<GaussRational>> division_polynomials(const GaussRational& a, const GaussRational& b, int count) {
  using P = Polynomial<GaussRational>;
  using G = GaussRational;
  std::vector<P> g(static_cast<std::size_t>(std::max(count, 5)));
  g[0] = P{};
  g[1] = P::constant(G(1));
  g[2] = P::constant(G(1));
  g[3] = P({G(-(a * a)), G(12) * b, G(6) * a, G(0), G(3)});
  g[4] = P({G(-(G(8) * b * b + a * a * a)), G(-(G(4) * a * b)), G(-(G(5) * a * a)), G(20) * b, G(5) * a, G(0), G(1)}) * G(2);
  const P F4 = P({G(4) * b, G(4) * a, G(0), G(4)});  // 4y^2
  const P F4sq = F4 * F4;
  for (int n = 5; n < count; ++n) {
    auto at = [&](int i) -> const P& { return g[static_cast<std::size_t>(i)]; };
    if (n % 2 == 1) {
      const int k = (n - 1) / 2;
      P t1 = at(k + 2) * pow(at(k), 3), t2 = at(k - 1) * pow(at(k + 1), 3);
      g[static_cast<std::size_t>(n)] = (k % 2 == 0) ? F4sq * t1 - t2 : t1 - F4sq * t2;
    } else {
      const int k = n / 2;
      g[static_cast<std::size_t>(n)] = at(k) * (at(k + 2) * pow(at(k - 1), 2) - at(k - 2) * pow(at(k + 1), 2));
    }
  }
  g.resize(static_cast<std::size_t>(count));
  return g;
}

/// Induced map x(P) -> x(mP) on the Weierstrass x-coordinate; degree m^2.
inline ExactMap flexible_lattes(const LattesSpec& spec) {
  using P = Polynomial<GaussRational>;
  using G = GaussRational;
  const G& a = spec.a;
  const G& b = spec.b;
  if ((G(4) * a * a * a + G(27) * b * b).is_zero()) throw Error(ErrorCode::SingularCurve, "curve discriminant vanishes");
  if (spec.m < 2) throw Error(ErrorCode::InvalidArgument, "multiplier m must be >= 2");
  const int m = spec.m;
  auto g = division_polynomials(a, b, m + 2);
  const P F4 = P({G(4) * b, G(4) * a, G(0), G(4)});
  const P x = P::x();
  const P& gm = g[static_cast<std::size_t>(m)];
  const P& gl = g[static_cast<std::size_t>(m - 1)];
  const P& gh = g[static_cast<std::size_t>(m + 1)];
  P num, den;
  if (m % 2 == 0) {
    den = F4 * gm * gm;
    num = x * den - gl * gh;
  } else {
    den = gm * gm;
    num = x * den - F4 * gl * gh;
  }
  auto f = build_map(num.coeffs(), den.coeffs());
  if (f.degree() != m * m) throw Error(ErrorCode::SingularCurve, "multiplication map has degree " + std::to_string(f.degree()));
  return f;
}

/// Rigid Lattès map from multiplication by 1+i on y^2 = x^3 - x:
/// x -> -i (x^2 - 1) / (2x). Test fixture; degree 2.
inline ExactMap cm_lattes_fixture() {
  using G = GaussRational;
  G mi(mpq_class(0), mpq_class(-1));
  return build_map(std::vector<G>{G(-mi), G(0), mi}, std::vector<G>{G(0), G(2)});
}

// ---------------------------------------------------------------------------
// Orbifold signature

struct OrbifoldSignature {
  enum class Status { PCF, NotPCF, Undetermined };
  Status status = Status::Undetermined;
  std::vector<int> weights;  // sorted; 0 encodes an infinite weight
  std::vector<SpherePoint> points;  // postcritical points with weight >= 2, aligned with weights

  std::string str() const {
    if (status == Status::NotPCF) return "NotPCF";
    if (status == Status::Undetermined) return "Undetermined";
    std::string s = "(";
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (i) s += ",";
      s += weights[i] == 0 ? "inf" : std::to_string(weights[i]);
    }
    return s + ")";
  }
  bool matches(std::initializer_list<int> w) const {
    return status == Status::PCF && std::vector<int>(w) == weights;
  }
};

namespace detail {

constexpr int kWeightCap = 64;

inline OrbifoldSignature signature_from(const NumericMap& fn, const std::vector<CriticalPoint>& crit, int depth,
                                        double tol) {
  OrbifoldSignature sig;
  auto P = postcritical_truncation(fn, depth, tol);
  if (!P.closed) {
    sig.status = OrbifoldSignature::Status::Undetermined;
    return sig;
  }
  const auto& pts = P.points;
  const std::size_t n = pts.size();
  auto index_of = [&](const SpherePoint& q) -> std::size_t {
    std::size_t best = n;
    double bd = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      double d = chordal(q, pts[i]);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return bd < std::max(tol * 100, 1e-7) ? best : n;
  };
  auto local_degree = [&](const SpherePoint& q) {
    for (const auto& c : crit)
      if (chordal(c.point, q) < std::max(tol * 100, 1e-7)) return c.multiplicity + 1;
    return 1;
  };
  std::vector<std::size_t> image(n);
  std::vector<int> pdeg(n);
  for (std::size_t i = 0; i < n; ++i) {
    image[i] = index_of(evaluate(fn, pts[i]));
    if (image[i] == n) {
      sig.status = OrbifoldSignature::Status::Undetermined;
      return sig;
    }
    pdeg[i] = local_degree(pts[i]);
  }
  // Constant contributions from critical points outside P.
  std::vector<long> base(n, 1);
  for (const auto& c : crit) {
    if (index_of(c.point) != n) continue;
    std::size_t j = index_of(evaluate(fn, c.point));
    if (j == n) {
      sig.status = OrbifoldSignature::Status::Undetermined;
      return sig;
    }
    base[j] = std::lcm(base[j], static_cast<long>(c.multiplicity + 1));
  }
  std::vector<long> nu(n, 1);
  std::vector<char> inf(n, 0);
  for (int iter = 0; iter < 4 * kWeightCap + static_cast<int>(n) + 4; ++iter) {
    bool changed = false;
    for (std::size_t y = 0; y < n; ++y) {
      if (inf[y]) continue;
      long v = base[y];
      bool to_inf = false;
      for (std::size_t x = 0; x < n; ++x) {
        if (image[x] != y) continue;
        if (inf[x] && pdeg[x] >= 1) {
          to_inf = true;
          break;
        }
        v = std::lcm(v, nu[x] * pdeg[x]);
      }
      if (to_inf || v > kWeightCap) {
        inf[y] = 1;
        changed = true;
      } else if (v != nu[y]) {
        nu[y] = v;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<std::pair<int, SpherePoint>> w;
  for (std::size_t i = 0; i < n; ++i) {
    if (inf[i]) w.emplace_back(0, pts[i]);
    else if (nu[i] >= 2) w.emplace_back(static_cast<int>(nu[i]), pts[i]);
  }
  std::stable_sort(w.begin(), w.end(), [](const auto& a, const auto& b) {
    int ka = a.first == 0 ? 1 << 30 : a.first, kb = b.first == 0 ? 1 << 30 : b.first;
    return ka < kb;
  });
  sig.status = OrbifoldSignature::Status::PCF;
  for (auto& [k, p] : w) {
    sig.weights.push_back(k);
    sig.points.push_back(p);
  }
  return sig;
}

}  // namespace detail

inline OrbifoldSignature orbifold_signature(const ExactMap& f, int depth = 64, double tol = 1e-9) {
  return detail::signature_from(to_complex(f), critical_points(f), depth, tol);
}

inline OrbifoldSignature orbifold_signature(const NumericMap& f, int depth = 64, double tol = 1e-9) {
  return detail::signature_from(f, critical_points(f), depth, tol);
}

// ---------------------------------------------------------------------------
// Classification

struct ExceptionalClass {
  enum class Kind { Power, Chebyshev, LattesFlexible, LattesRigid, NotExceptional, Undetermined };
  Kind kind = Kind::Undetermined;
  int sign = 1;
  int degree = 0;
  std::string reason;
  OrbifoldSignature signature;

  std::string str() const {
    const char* s = sign >= 0 ? "+" : "-";
    switch (kind) {
      case Kind::Power: return std::string("Power(") + s + "," + std::to_string(degree) + ")";
      case Kind::Chebyshev: return std::string("Chebyshev(") + s + "," + std::to_string(degree) + ")";
      case Kind::LattesFlexible: return "LattesFlexible";
      case Kind::LattesRigid: return "LattesRigid";
      case Kind::NotExceptional: return "NotExceptional";
      case Kind::Undetermined: return "Undetermined";
    }
    return "Undetermined";
  }
};

namespace detail {

inline bool swapped(const NumericMap& f, const SpherePoint& a, const SpherePoint& b) {
  return chordal(evaluate(f, a), b) < 1e-7 && chordal(evaluate(f, b), a) < 1e-7;
}

}  // namespace detail

/// Decides the exceptional class of f from conjugation-invariant data.
inline ExceptionalClass classify(const ExactMap& f, int max_period = 4, SpectrumConfig cfg = {}) {
  using K = ExceptionalClass::Kind;
  ExceptionalClass out;
  out.degree = f.degree();
  const NumericMap fn = to_complex(f);
  out.signature = orbifold_signature(f);
  const auto& sig = out.signature;

  if (sig.matches({0, 0})) {
    out.kind = K::Power;
    out.sign = detail::swapped(fn, sig.points[0], sig.points[1]) ? -1 : 1;
    out.reason = "orbifold signature " + sig.str();
    return out;
  }
  if (sig.matches({2, 2, 0})) {
    out.kind = K::Chebyshev;
    out.sign = (f.degree() % 2 == 1 && detail::swapped(fn, sig.points[0], sig.points[1])) ? -1 : 1;
    out.reason = "orbifold signature " + sig.str();
    return out;
  }
  const bool lattes_sig =
      sig.matches({2, 2, 2, 2}) || sig.matches({3, 3, 3}) || sig.matches({2, 4, 4}) || sig.matches({2, 3, 6});
  const bool rational = has_rational_coefficients(f);

  if (lattes_sig) {
    if (rational) {
      SpectrumEngine engine(f, cfg);
      for (int n = 1; n <= max_period; ++n) {
        if (ipow(f.degree(), n) + 1 > cfg.exact_cap) break;
        auto s = engine.spectrum(n);
        for (const auto& fa : s.factors)
          if (fa.q.degree() != 1 || !is_integral(fa.q)) {
            out.kind = K::LattesRigid;
            out.reason = "Lattès signature " + sig.str() + ", period " + std::to_string(n) + " factor " + fa.q.str("l");
            return out;
          }
      }
      out.kind = K::LattesFlexible;
      out.reason = "Lattès signature " + sig.str() + " with rational integer spectra";
      return out;
    }
    PeriodicSolver solver(fn);
    for (int n = 1; n <= max_period; ++n) {
      if (ipow(f.degree(), n) + 1 > cfg.periodic.numeric_cap) break;
      for (const auto& c : cycles_of_period(solver, n)) {
        double im = std::abs(c.multiplier.imag());
        double re = c.multiplier.real();
        bool rational_int = im < 1e-6 * std::max(1.0, std::abs(c.multiplier)) &&
                            std::abs(re - std::round(re)) < 1e-6 * std::max(1.0, std::abs(re));
        if (!rational_int) {
          out.kind = K::LattesRigid;
          out.reason = "Lattès signature " + sig.str() + ", numeric multiplier not a rational integer (heuristic)";
          return out;
        }
      }
    }
    out.kind = K::LattesFlexible;
    out.reason = "Lattès signature " + sig.str() + " with numerically integral multipliers (heuristic)";
    return out;
  }

  // Not one of the exceptional signatures: look for a multiplier that cannot
  // lie in the ring of integers of a single imaginary quadratic field.
  if (rational) {
    SpectrumEngine engine(f, cfg);
    std::optional<mpz_class> field;
    for (int n = 1; n <= max_period; ++n) {
      if (ipow(f.degree(), n) + 1 > cfg.exact_cap) break;
      PeriodSpectrum s;
      try {
        s = engine.spectrum(n);
      } catch (const Error& e) {
        out.reason = std::string("spectrum failed: ") + e.what();
        break;
      }
      for (const auto& fa : s.factors) {
        bool ok = false;
        if (is_integral(fa.q) && fa.q.degree() == 1) ok = true;
        if (is_integral(fa.q) && fa.q.degree() == 2) {
          mpq_class disc = fa.q[1] * fa.q[1] - 4 * fa.q[0];
          if (disc < 0) {
            mpz_class D = NumberFieldSpec::squarefree_part(disc.get_num());
            if (!field || *field == D) {
              field = D;
              ok = true;
            }
          }
        }
        if (!ok) {
          out.kind = K::NotExceptional;
          out.reason = "period " + std::to_string(n) + " multiplier factor " + fa.q.str("l") +
                       " is not integral in a single imaginary quadratic field";
          return out;
        }
      }
    }
  }
  out.kind = K::Undetermined;
  if (out.reason.empty())
    out.reason = "signature " + sig.str() + " and no multiplier violation up to period " + std::to_string(max_period);
  return out;
}

}  // namespace ratdyn
