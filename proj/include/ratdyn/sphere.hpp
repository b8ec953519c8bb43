#pragma once

// Rational maps and Moebius transformations on the Riemann sphere.
//
// A point is either finite or the explicit Infinity tag. Evaluation and
// derivatives go through two affine charts: the finite chart t = z (used for
// |z| <= 1) and the inverse chart t = 1/z (used for |z| > 1 and for Infinity).
// In homogeneous terms the finite chart is [t:1] and the inverse chart [1:t].

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "ratdyn/error.hpp"
#include "ratdyn/polynomial.hpp"
#include "ratdyn/roots.hpp"
#include "ratdyn/scalar.hpp"

namespace ratdyn {

inline mpq_class abs2(const GaussRational& z) { return z.norm(); }
inline double abs2(const Complex& z) { return std::norm(z); }

template <typename S>
struct ProjPoint {
  bool infinite = false;
  S z = S(0);

  static ProjPoint infinity() { return ProjPoint{true, S(0)}; }
  static ProjPoint finite(S v) { return ProjPoint{false, std::move(v)}; }
  bool is_infinity() const { return infinite; }

  friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.z == b.z;
  }
};

using SpherePoint = ProjPoint<Complex>;

inline SpherePoint to_complex(const ProjPoint<GaussRational>& p) {
  return p.infinite ? SpherePoint::infinity() : SpherePoint::finite(p.z.to_complex());
}

/// Chordal distance 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)); Infinity is an ordinary point.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  if (a.infinite && b.infinite) return 0.0;
  if (a.infinite) return 2.0 / std::sqrt(1.0 + std::norm(b.z));
  if (b.infinite) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
  Complex z = a.z, w = b.z;
  if (std::abs(z) > 1.0 && std::abs(w) > 1.0) {
    // z -> 1/z is an isometry; avoids overflow for huge points.
    z = 1.0 / z;
    w = 1.0 / w;
  }
  return 2.0 * std::abs(z - w) / std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

/// Stereographic embedding of the sphere into the unit sphere of R^3.
inline std::array<double, 3> to_unit_sphere(const SpherePoint& p) {
  if (p.infinite) return {0.0, 0.0, 1.0};
  Complex z = p.z;
  double n = std::norm(z);
  if (!std::isfinite(n)) return {0.0, 0.0, 1.0};
  return {2.0 * z.real() / (1.0 + n), 2.0 * z.imag() / (1.0 + n), (n - 1.0) / (n + 1.0)};
}

enum class Chart { Finite, Inverse };

template <typename S>
Chart chart_of(const ProjPoint<S>& p) {
  if (p.infinite) return Chart::Inverse;
  return abs2(p.z) <= 1 ? Chart::Finite : Chart::Inverse;
}

template <typename S>
S chart_coordinate(const ProjPoint<S>& p, Chart c) {
  if (c == Chart::Finite) {
    if (p.infinite) throw Error(ErrorCode::InvalidArgument, "Infinity has no finite-chart coordinate");
    return p.z;
  }
  if (p.infinite) return S(0);
  if (ScalarTraits<S>::is_zero(p.z)) throw Error(ErrorCode::InvalidArgument, "0 has no inverse-chart coordinate");
  return S(1) / p.z;
}

template <typename S>
ProjPoint<S> from_chart(const S& t, Chart c) {
  if (c == Chart::Finite) return ProjPoint<S>::finite(t);
  if (ScalarTraits<S>::is_zero(t)) return ProjPoint<S>::infinity();
  return ProjPoint<S>::finite(S(1) / t);
}

/// A rational map num/den of degree d = max(deg num, deg den), normalized so the
/// highest nonzero coefficient of den is 1.
template <typename S>
class RationalMap {
 public:
  RationalMap() = default;

  /// Builds without coprimality or degree validation; use build_map for user input.
  static RationalMap from_reduced(Polynomial<S> num, Polynomial<S> den) {
    if (den.is_zero()) throw Error(ErrorCode::DegenerateMap, "zero denominator");
    S l = den.lead();
    if (l != S(1)) {
      S inv = S(1) / l;
      num *= inv;
      den *= inv;
    }
    RationalMap m;
    m.num_ = std::move(num);
    m.den_ = std::move(den);
    m.degree_ = std::max(m.num_.degree(), m.den_.degree());
    m.charts_[0] = {m.num_, m.den_};
    m.charts_[1] = {m.num_.reversed(m.degree_), m.den_.reversed(m.degree_)};
    for (int k = 0; k < 2; ++k) {
      m.dcharts_[k] = {m.charts_[k].first.derivative(), m.charts_[k].second.derivative()};
    }
    return m;
  }

  const Polynomial<S>& num() const { return num_; }
  const Polynomial<S>& den() const { return den_; }
  int degree() const { return degree_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  /// Chart polynomials (F(t), G(t)) with f([t:1]) = [F:G] or f([1:t]) = [F:G].
  const std::pair<Polynomial<S>, Polynomial<S>>& chart_pair(Chart c) const {
    return charts_[c == Chart::Finite ? 0 : 1];
  }
  const std::pair<Polynomial<S>, Polynomial<S>>& chart_dpair(Chart c) const {
    return dcharts_[c == Chart::Finite ? 0 : 1];
  }

  friend bool operator==(const RationalMap& a, const RationalMap& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str() const {
    if (is_polynomial()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  Polynomial<S> num_, den_;
  int degree_ = 0;
  std::array<std::pair<Polynomial<S>, Polynomial<S>>, 2> charts_;
  std::array<std::pair<Polynomial<S>, Polynomial<S>>, 2> dcharts_;
};

using ExactMap = RationalMap<GaussRational>;
using NumericMap = RationalMap<Complex>;

inline NumericMap to_complex(const ExactMap& f) {
  auto cv = [](const GaussRational& g) { return g.to_complex(); };
  return NumericMap::from_reduced(f.num().map<Complex>(cv), f.den().map<Complex>(cv));
}

inline bool has_rational_coefficients(const ExactMap& f) {
  for (const auto& c : f.num().coeffs()) if (!c.is_real()) return false;
  for (const auto& c : f.den().coeffs()) if (!c.is_real()) return false;
  return true;
}

/// Validating constructor: reduces to lowest terms (exactly for Gaussian
/// rationals) and enforces degree >= 2 with no common zero of num and den.
template <typename S>
RationalMap<S> build_map(const std::vector<S>& num_coeffs, const std::vector<S>& den_coeffs) {
  if (num_coeffs.empty() || den_coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient list");
  Polynomial<S> num(num_coeffs), den(den_coeffs);
  if (den.is_zero()) throw Error(ErrorCode::DegenerateMap, "denominator is identically zero");
  if (num.is_zero()) throw Error(ErrorCode::DegenerateMap, "numerator is identically zero");
  if constexpr (ScalarTraits<S>::exact) {
    Polynomial<S> g = gcd(num, den);
    if (g.degree() > 0) {
      num = exact_quotient(num, g);
      den = exact_quotient(den, g);
      if (num.degree() <= 0 && den.degree() <= 0)
        throw Error(ErrorCode::DegenerateMap, "numerator and denominator share the factor " + g.str());
    }
    if (std::max(num.degree(), den.degree()) < 2)
      throw Error(ErrorCode::DegreeTooLow, "map has degree " + std::to_string(std::max(num.degree(), den.degree())));
  } else {
    const int d = std::max(num.degree(), den.degree());
    if (d < 2) throw Error(ErrorCode::DegreeTooLow, "map has degree " + std::to_string(d));
    if (num.degree() < d && den.degree() < d) throw Error(ErrorCode::DegenerateMap, "common zero at infinity");
    auto zeros = polynomial_roots(num);
    auto poles = polynomial_roots(den);
    for (const auto& a : zeros)
      for (const auto& b : poles)
        if (chordal(SpherePoint::finite(a), SpherePoint::finite(b)) < 1e-8)
          throw Error(ErrorCode::DegenerateMap, "numerator and denominator share a root (resultant below tolerance)");
  }
  return RationalMap<S>::from_reduced(std::move(num), std::move(den));
}

template <typename S>
ProjPoint<S> evaluate(const RationalMap<S>& f, const ProjPoint<S>& p) {
  const Chart c = chart_of(p);
  const S t = chart_coordinate(p, c);
  const auto& [F, G] = f.chart_pair(c);
  S a = F.eval(t), b = G.eval(t);
  if (ScalarTraits<S>::is_zero(b)) return ProjPoint<S>::infinity();
  return ProjPoint<S>::finite(a / b);
}

/// One step of f together with its derivative between two charts.
template <typename S>
struct ChartJet {
  ProjPoint<S> image;
  Chart in = Chart::Finite, out = Chart::Finite;
  S t_in = S(0), t_out = S(0);
  S derivative = S(0);
};

/// Derivative of f from chart `in` at p to chart `out` at f(p); when `out` is
/// not given, the chart where the image has |t| <= 1 is used.
template <typename S>
ChartJet<S> jet(const RationalMap<S>& f, const ProjPoint<S>& p, Chart in, std::optional<Chart> out = std::nullopt) {
  ChartJet<S> j;
  j.in = in;
  j.t_in = chart_coordinate(p, in);
  const auto& [F, G] = f.chart_pair(in);
  const auto& [dF, dG] = f.chart_dpair(in);
  S fv = F.eval(j.t_in), gv = G.eval(j.t_in);
  S fd = dF.eval(j.t_in), gd = dG.eval(j.t_in);
  j.out = out ? *out : (abs2(fv) <= abs2(gv) ? Chart::Finite : Chart::Inverse);
  if (j.out == Chart::Inverse) {
    std::swap(fv, gv);
    std::swap(fd, gd);
  }
  if (ScalarTraits<S>::is_zero(gv)) throw Error(ErrorCode::InvalidArgument, "image not representable in requested chart");
  j.t_out = fv / gv;
  j.derivative = (fd * gv - fv * gd) / (gv * gv);
  j.image = from_chart(j.t_out, j.out);
  return j;
}

template <typename S>
ChartJet<S> jet(const RationalMap<S>& f, const ProjPoint<S>& p) {
  return jet(f, p, chart_of(p));
}

/// ||f'(z)|| = |f'(z)| (1+|z|^2) / (1+|f(z)|^2), continuously extended; the same
/// expression holds verbatim in either chart since z -> 1/z is an isometry.
inline double spherical_norm(const NumericMap& f, const SpherePoint& p) {
  auto j = jet(f, p);
  return std::abs(j.derivative) * (1.0 + std::norm(j.t_in)) / (1.0 + std::norm(j.t_out));
}

/// Exact square of the spherical norm for Gaussian-rational data.
inline mpq_class spherical_norm_squared(const ExactMap& f, const ProjPoint<GaussRational>& p) {
  auto j = jet(f, p);
  mpq_class num = abs2(j.derivative) * (1 + abs2(j.t_in)) * (1 + abs2(j.t_in));
  mpq_class den = (1 + abs2(j.t_out)) * (1 + abs2(j.t_out));
  return mpq_class(num / den);
}

template <typename S>
struct MoebiusMap {
  S a = S(1), b = S(0), c = S(0), d = S(1);

  MoebiusMap() = default;
  MoebiusMap(S a_, S b_, S c_, S d_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (ScalarTraits<S>::is_zero(S(a * d - b * c))) throw Error(ErrorCode::InvalidArgument, "Moebius determinant is zero");
  }
  static MoebiusMap identity() { return {}; }

  MoebiusMap inverse() const { return MoebiusMap(d, -b, -c, a); }

  ProjPoint<S> operator()(const ProjPoint<S>& p) const {
    if (p.infinite) {
      if (ScalarTraits<S>::is_zero(c)) return ProjPoint<S>::infinity();
      return ProjPoint<S>::finite(a / c);
    }
    S den = c * p.z + d;
    if (ScalarTraits<S>::is_zero(den)) return ProjPoint<S>::infinity();
    return ProjPoint<S>::finite((a * p.z + b) / den);
  }
};

namespace detail {

/// sum_i coeff_i * P^i * Q^(d-i): homogeneous substitution of (P, Q) into a
/// degree-d form with the given coefficients.
template <typename S>
Polynomial<S> substitute_form(const Polynomial<S>& coeffs, int d, const Polynomial<S>& P, const Polynomial<S>& Q) {
  std::vector<Polynomial<S>> qpow(static_cast<std::size_t>(d + 1));
  qpow[0] = Polynomial<S>::constant(S(1));
  for (int k = 1; k <= d; ++k) qpow[static_cast<std::size_t>(k)] = qpow[static_cast<std::size_t>(k - 1)] * Q;
  Polynomial<S> acc;
  Polynomial<S> ppow = Polynomial<S>::constant(S(1));
  for (int i = 0; i <= d; ++i) {
    S ci = coeffs[i];
    if (!ScalarTraits<S>::is_zero(ci)) acc += (ppow * qpow[static_cast<std::size_t>(d - i)]) * ci;
    if (i < d) ppow = ppow * P;
  }
  return acc;
}

}  // namespace detail

/// phi o f o phi^{-1}.
template <typename S>
RationalMap<S> conjugate(const RationalMap<S>& f, const MoebiusMap<S>& phi) {
  const int d = f.degree();
  // phi^{-1}[X:1] = [d X - b : -c X + a]
  Polynomial<S> l1({S(-phi.b), phi.d});
  Polynomial<S> l2({phi.a, S(-phi.c)});
  Polynomial<S> F = detail::substitute_form(f.num(), d, l1, l2);
  Polynomial<S> G = detail::substitute_form(f.den(), d, l1, l2);
  Polynomial<S> num = F * phi.a + G * phi.b;
  Polynomial<S> den = F * phi.c + G * phi.d;
  if constexpr (ScalarTraits<S>::exact) {
    Polynomial<S> g = gcd(num, den);
    if (g.degree() > 0) {
      num = exact_quotient(num, g);
      den = exact_quotient(den, g);
    }
  }
  return RationalMap<S>::from_reduced(std::move(num), std::move(den));
}

/// f o g.
template <typename S>
RationalMap<S> compose(const RationalMap<S>& f, const RationalMap<S>& g) {
  const int df = f.degree(), dg = g.degree();
  // Homogenize g with total degree dg before substitution.
  Polynomial<S> num = detail::substitute_form(f.num(), df, g.num(), g.den());
  Polynomial<S> den = detail::substitute_form(f.den(), df, g.num(), g.den());
  (void)dg;
  if constexpr (ScalarTraits<S>::exact) {
    Polynomial<S> h = gcd(num, den);
    if (h.degree() > 0) {
      num = exact_quotient(num, h);
      den = exact_quotient(den, h);
    }
  }
  return RationalMap<S>::from_reduced(std::move(num), std::move(den));
}

template <typename S>
RationalMap<S> iterate(const RationalMap<S>& f, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "iterate count must be >= 1");
  RationalMap<S> r = f;
  for (int k = 1; k < n; ++k) r = compose(f, r);
  return r;
}

struct CriticalPoint {
  SpherePoint point;
  int multiplicity = 1;
};

namespace detail {

inline std::vector<CriticalPoint> cluster_roots(const std::vector<Complex>& roots, int multiplicity, double tol) {
  std::vector<CriticalPoint> out;
  std::vector<int> counts;
  std::vector<Complex> sums;
  for (const auto& r : roots) {
    bool merged = false;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (chordal(out[k].point, SpherePoint::finite(r)) < tol) {
        sums[k] += r;
        ++counts[k];
        out[k].point = SpherePoint::finite(sums[k] / static_cast<double>(counts[k]));
        out[k].multiplicity += multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.push_back({SpherePoint::finite(r), multiplicity});
      counts.push_back(1);
      sums.push_back(r);
    }
  }
  return out;
}

}  // namespace detail

/// Critical points with multiplicity; the multiplicities always total 2d - 2.
template <typename S>
std::vector<CriticalPoint> critical_points(const RationalMap<S>& f) {
  const Polynomial<S> w = f.num().derivative() * f.den() - f.num() * f.den().derivative();
  std::vector<CriticalPoint> out;
  if constexpr (ScalarTraits<S>::exact) {
    auto parts = squarefree_decomposition(w);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].degree() < 1) continue;
      auto cp = parts[k].template map<Complex>([](const GaussRational& g) { return g.to_complex(); });
      for (const auto& r : polynomial_roots(cp)) out.push_back({SpherePoint::finite(r), static_cast<int>(k + 1)});
    }
  } else {
    if (w.degree() >= 1) out = detail::cluster_roots(polynomial_roots(w), 1, 1e-5);
  }
  const int at_infinity = 2 * f.degree() - 2 - std::max(w.degree(), 0);
  if (at_infinity > 0) out.push_back({SpherePoint::infinity(), at_infinity});
  int total = 0;
  for (const auto& c : out) total += c.multiplicity;
  if (total != 2 * f.degree() - 2)
    throw Error(ErrorCode::RootFindingFailed, "critical point count " + std::to_string(total) + " != 2d-2");
  return out;
}

struct PostcriticalTruncation {
  std::vector<SpherePoint> points;
  int depth = 0;
  bool closed = false;
};

inline bool contains_point(const std::vector<SpherePoint>& set, const SpherePoint& p, double tol) {
  for (const auto& q : set)
    if (chordal(p, q) < tol) return true;
  return false;
}

/// The union of f^k(C_f) for 1 <= k <= depth, merged at chordal tolerance.
inline PostcriticalTruncation postcritical_truncation(const NumericMap& f, int depth, double tol = 1e-9) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  PostcriticalTruncation out;
  out.depth = depth;
  std::vector<SpherePoint> frontier;
  for (const auto& c : critical_points(f)) frontier.push_back(evaluate(f, c.point));
  for (int k = 1; k <= depth; ++k) {
    std::vector<SpherePoint> added;
    for (const auto& p : frontier) {
      if (!contains_point(out.points, p, tol) && !contains_point(added, p, tol)) added.push_back(p);
    }
    out.points.insert(out.points.end(), added.begin(), added.end());
    if (added.empty()) {
      out.closed = true;
      return out;
    }
    frontier.clear();
    for (const auto& p : added) frontier.push_back(evaluate(f, p));
  }
  out.closed = true;
  for (const auto& p : frontier) {
    if (!contains_point(out.points, p, tol)) {
      out.closed = false;
      break;
    }
  }
  return out;
}

}  // namespace ratdyn
