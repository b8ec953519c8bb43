#pragma once

// Periodic points, cycles, multipliers and characteristic exponents.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ratdyn/arith.hpp"
#include "ratdyn/error.hpp"
#include "ratdyn/polynomial.hpp"
#include "ratdyn/roots.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

struct PeriodicConfig {
  int numeric_cap = 4096;  // moving roots in one simultaneous solve
  int exact_cap = 256;     // degree of exact period polynomials
  double tol = 1e-9;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// ---------------------------------------------------------------------------
// Period polynomials

/// A polynomial in the finite chart together with the multiplicity of the
/// root at Infinity that dehomogenization dropped.
template <typename S>
struct PeriodPolynomial {
  Polynomial<S> finite;
  int infinity_multiplicity = 0;
  int total_degree() const { return finite.degree() + infinity_multiplicity; }
};

namespace detail {

/// Dehomogenized forms (F_n(z,1), G_n(z,1)) with f^n = [F_n : G_n], each of
/// formal homogeneous degree d^n.
template <typename S>
std::pair<Polynomial<S>, Polynomial<S>> iterate_forms(const RationalMap<S>& f, int n) {
  Polynomial<S> F = f.num(), G = f.den();
  for (int k = 1; k < n; ++k) {
    Polynomial<S> nf = substitute_form(f.num(), f.degree(), F, G);
    Polynomial<S> ng = substitute_form(f.den(), f.degree(), F, G);
    F = std::move(nf);
    G = std::move(ng);
  }
  return {F, G};
}

inline void check_cap(std::int64_t degree, int cap, const std::string& what) {
  if (degree > cap)
    throw Error(ErrorCode::DegreeCapExceeded, what + " has degree " + std::to_string(degree) + " > cap " + std::to_string(cap));
}

}  // namespace detail

/// Dehomogenization of X G_n - Y F_n: its roots plus the dropped root at
/// Infinity are the points of period dividing n (total d^n + 1).
template <typename S>
PeriodPolynomial<S> fixed_point_polynomial(const RationalMap<S>& f, int n, int cap = 4096) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  const std::int64_t total = ipow(f.degree(), n) + 1;
  detail::check_cap(total, cap, "fixed-point polynomial");
  auto [F, G] = detail::iterate_forms(f, n);
  Polynomial<S> p = Polynomial<S>::x() * G - F;
  PeriodPolynomial<S> out;
  out.finite = p.monic();
  out.infinity_multiplicity = static_cast<int>(total) - out.finite.degree();
  return out;
}

/// Exact dynatomic polynomial: prod over k | n of Fix_k^{mu(n/k)} evaluated by
/// exact division. Its roots are the points of exact period n (with extra
/// multiplicity only in parabolic configurations).
template <typename S>
PeriodPolynomial<S> dynatomic_numerator(const RationalMap<S>& f, int n, int cap = 256) {
  static_assert(ScalarTraits<S>::exact, "numeric maps use periodic_points instead");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  detail::check_cap(ipow(f.degree(), n) + 1, cap, "dynatomic polynomial");
  Polynomial<S> num = Polynomial<S>::constant(S(1)), den = Polynomial<S>::constant(S(1));
  int inf = 0;
  for (int k : divisors(n)) {
    int mu = moebius_mu(n / k);
    if (mu == 0) continue;
    auto fix = fixed_point_polynomial(f, k, cap);
    if (mu > 0) num *= fix.finite;
    else den *= fix.finite;
    inf += mu * fix.infinity_multiplicity;
  }
  PeriodPolynomial<S> out;
  out.finite = exact_quotient(num, den).monic();
  out.infinity_multiplicity = inf;
  return out;
}

// ---------------------------------------------------------------------------
// Numeric periodic points

namespace detail {

/// Newton correction p/p' for p(z) = X_n(z) - z Y_n(z) with [X_n:Y_n] = g^n([z:1]),
/// evaluated by homogeneous iteration with per-step rescaling (p/p' is invariant
/// under scaling p and p' by the same constant).
class IterateNewton {
 public:
  IterateNewton(const NumericMap& g, int n) : n_(n), d_(g.degree()) {
    a_.resize(static_cast<std::size_t>(d_ + 1));
    b_.resize(static_cast<std::size_t>(d_ + 1));
    for (int i = 0; i <= d_; ++i) {
      a_[static_cast<std::size_t>(i)] = g.num()[i];
      b_[static_cast<std::size_t>(i)] = g.den()[i];
    }
  }

  Complex operator()(Complex z) const {
    Complex X = z, Y = 1.0, dX = 1.0, dY = 0.0;
    std::vector<Complex> xp(static_cast<std::size_t>(d_ + 1)), yp(static_cast<std::size_t>(d_ + 1));
    for (int step = 0; step < n_; ++step) {
      double s = std::max(std::abs(X), std::abs(Y));
      if (s == 0.0 || !std::isfinite(s)) return {std::nan(""), 0.0};
      X /= s; Y /= s; dX /= s; dY /= s;
      xp[0] = yp[0] = 1.0;
      for (int i = 1; i <= d_; ++i) {
        xp[static_cast<std::size_t>(i)] = xp[static_cast<std::size_t>(i - 1)] * X;
        yp[static_cast<std::size_t>(i)] = yp[static_cast<std::size_t>(i - 1)] * Y;
      }
      Complex F = 0, G = 0, FX = 0, FY = 0, GX = 0, GY = 0;
      for (int i = 0; i <= d_; ++i) {
        const auto ui = static_cast<std::size_t>(i), ri = static_cast<std::size_t>(d_ - i);
        Complex mono = xp[ui] * yp[ri];
        F += a_[ui] * mono;
        G += b_[ui] * mono;
        if (i > 0) {
          Complex m = static_cast<double>(i) * xp[ui - 1] * yp[ri];
          FX += a_[ui] * m;
          GX += b_[ui] * m;
        }
        if (i < d_) {
          Complex m = static_cast<double>(d_ - i) * xp[ui] * yp[ri - 1];
          FY += a_[ui] * m;
          GY += b_[ui] * m;
        }
      }
      Complex ndX = FX * dX + FY * dY;
      Complex ndY = GX * dX + GY * dY;
      X = F; Y = G; dX = ndX; dY = ndY;
    }
    Complex p = X - z * Y;
    Complex dp = dX - Y - z * dY;
    return p / dp;
  }

 private:
  int n_, d_;
  std::vector<Complex> a_, b_;
};

/// Random rotation of the sphere (a chordal isometry).
inline MoebiusMap<Complex> random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  double theta = 0.25 + 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double alpha = u(rng), beta = u(rng);
  Complex a = std::polar(std::cos(theta), alpha), b = std::polar(std::sin(theta), beta);
  return MoebiusMap<Complex>(a, b, -std::conj(b), std::conj(a));
}

/// Image of p under f^n, stepping through charts.
inline SpherePoint iterate_point(const NumericMap& f, SpherePoint p, int n) {
  for (int k = 0; k < n; ++k) p = evaluate(f, p);
  return p;
}

/// Newton refinement of f^n(z) = z in the chart of z.
inline SpherePoint polish_periodic(const NumericMap& f, SpherePoint p, int n, int steps = 4) {
  for (int s = 0; s < steps; ++s) {
    const Chart c = chart_of(p);
    SpherePoint cur = p;
    Complex deriv = 1.0;
    Chart in = c;
    for (int k = 0; k < n; ++k) {
      std::optional<Chart> out;
      if (k == n - 1) out = c;
      try {
        auto j = out ? jet(f, cur, in, out) : jet(f, cur, in);
        deriv *= j.derivative;
        cur = j.image;
        in = j.out;
      } catch (const Error&) {
        return p;
      }
    }
    Complex t = chart_coordinate(p, c);
    Complex t_img = chart_coordinate(cur, c);
    Complex denom = deriv - 1.0;
    if (std::abs(denom) < 1e-300) return p;
    Complex nt = t - (t_img - t) / denom;
    if (!std::isfinite(nt.real()) || !std::isfinite(nt.imag())) return p;
    SpherePoint np = from_chart(nt, c);
    if (chordal(np, p) < 1e-17) return np;
    p = np;
  }
  return p;
}

}  // namespace detail

struct PeriodicSolveReport {
  int period = 0;
  int found = 0;
  std::int64_t expected = 0;
  double residual_max = 0.0;
};

/// Computes and caches points of exact period n for a numeric map. Points of
/// lower period are solved first and deflated implicitly.
class PeriodicSolver {
 public:
  explicit PeriodicSolver(NumericMap f, PeriodicConfig cfg = {}) : f_(std::move(f)), cfg_(cfg) {}

  const NumericMap& map() const { return f_; }
  const PeriodicConfig& config() const { return cfg_; }

  const std::vector<SpherePoint>& points(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    solve(n);
    return cache_.at(n);
  }

  const PeriodicSolveReport& report(int n) {
    points(n);
    return reports_.at(n);
  }

 private:
  void solve(int n) {
    const int d = f_.degree();
    const std::int64_t expected = exact_period_count(d, n);
    detail::check_cap(expected, cfg_.numeric_cap, "exact-period point set");

    std::vector<SpherePoint> known;
    for (int k : divisors(n)) {
      if (k == n) continue;
      const auto& pts = points(k);
      known.insert(known.end(), pts.begin(), pts.end());
    }

    std::string failure;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const std::uint64_t seed = cfg_.seed + 0x1000193ULL * static_cast<std::uint64_t>(n) + 7919ULL * attempt;
      auto rot = detail::random_rotation(seed);
      auto rot_inv = rot.inverse();
      NumericMap g = conjugate(f_, rot);
      std::vector<Complex> fixed;
      bool bad_frame = false;
      for (const auto& p : known) {
        SpherePoint q = rot(p);
        if (q.infinite || std::abs(q.z) > 1e6) bad_frame = true;
        fixed.push_back(q.z);
      }
      if (bad_frame) continue;

      AberthOptions opt;
      opt.seed = seed;
      auto init = sphere_start_points(static_cast<std::size_t>(expected), seed ^ 0xabcdefULL);
      auto res = aberth(detail::IterateNewton(g, n), std::move(init), fixed, opt);

      std::vector<SpherePoint> found;
      found.reserve(res.roots.size());
      double residual_max = 0.0;
      bool ok = true;
      for (const auto& r : res.roots) {
        SpherePoint p = rot_inv(SpherePoint::finite(r));
        if (!p.infinite && chordal(p, SpherePoint::infinity()) < 1e-12) p = SpherePoint::infinity();
        if (!p.infinite) p = detail::polish_periodic(f_, p, n);
        if (!p.infinite && chordal(p, SpherePoint::infinity()) < 1e-13) p = SpherePoint::infinity();
        double resid = chordal(detail::iterate_point(f_, p, n), p);
        residual_max = std::max(residual_max, resid);
        if (!(resid < cfg_.tol)) {
          ok = false;
          failure = "residual " + std::to_string(resid) + " above tolerance";
          break;
        }
        for (int k : divisors(n)) {
          if (k == n) continue;
          if (chordal(detail::iterate_point(f_, p, k), p) <= 10 * cfg_.tol) {
            ok = false;
            failure = "root converged to a point of lower period " + std::to_string(k);
          }
        }
        if (!ok) break;
        found.push_back(p);
      }
      if (ok) {
        for (std::size_t i = 0; i < found.size() && ok; ++i)
          for (std::size_t j = i + 1; j < found.size(); ++j)
            if (chordal(found[i], found[j]) <= 10 * cfg_.tol) {
              ok = false;
              failure = "two roots collided";
              break;
            }
      }
      if (ok) {
        reports_[n] = PeriodicSolveReport{n, static_cast<int>(found.size()), expected, residual_max};
        cache_[n] = std::move(found);
        return;
      }
    }
    throw Error(ErrorCode::RootFindingFailed, "period " + std::to_string(n) + ": " + failure);
  }

  NumericMap f_;
  PeriodicConfig cfg_;
  std::map<int, std::vector<SpherePoint>> cache_;
  std::map<int, PeriodicSolveReport> reports_;
};

inline std::pair<std::vector<SpherePoint>, PeriodicSolveReport> periodic_points(const NumericMap& f, int n,
                                                                                double tol = 1e-9) {
  PeriodicConfig cfg;
  cfg.tol = tol;
  PeriodicSolver solver(f, cfg);
  auto pts = solver.points(n);
  return {pts, solver.report(n)};
}

// ---------------------------------------------------------------------------
// Cycles and multipliers

struct CycleRecord {
  std::vector<SpherePoint> points;
  int period = 0;
  Complex multiplier = 0.0;
  double char_exponent = 0.0;
  bool repelling = false;
};

/// (1/p) log|lambda|, or -infinity for a superattracting cycle.
inline double characteristic_exponent(Complex multiplier, int period) {
  double a = std::abs(multiplier);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(a) / period;
}

inline double characteristic_exponent(const CycleRecord& record) {
  return characteristic_exponent(record.multiplier, record.period);
}

/// Eigenvalue of the differential of f^p along the orbit: chain rule through
/// the chart of each orbit point.
inline Complex multiplier(const NumericMap& f, const std::vector<SpherePoint>& orbit, double tol = 1e-6) {
  if (orbit.empty()) throw Error(ErrorCode::NotACycle, "empty orbit");
  Complex lambda = 1.0;
  const std::size_t p = orbit.size();
  for (std::size_t j = 0; j < p; ++j) {
    const SpherePoint& cur = orbit[j];
    const SpherePoint& next = orbit[(j + 1) % p];
    auto jt = jet(f, cur, chart_of(cur), chart_of(next));
    if (chordal(jt.image, next) > tol)
      throw Error(ErrorCode::NotACycle, "orbit point " + std::to_string(j) + " does not map to its successor");
    lambda *= jt.derivative;
  }
  return lambda;
}

inline CycleRecord make_cycle(const NumericMap& f, std::vector<SpherePoint> orbit, double tol = 1e-6) {
  CycleRecord r;
  r.period = static_cast<int>(orbit.size());
  r.multiplier = multiplier(f, orbit, tol);
  r.points = std::move(orbit);
  r.char_exponent = characteristic_exponent(r);
  r.repelling = std::abs(r.multiplier) > 1.0;
  return r;
}

/// Partitions points of exact period n into cycles.
inline std::vector<CycleRecord> group_cycles(const NumericMap& f, const std::vector<SpherePoint>& points, int n,
                                             double tol = 1e-9) {
  const double match_tol = std::max(1e-7, 1e3 * tol);
  std::vector<char> used(points.size(), 0);
  std::vector<CycleRecord> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (used[i]) continue;
    std::vector<SpherePoint> orbit{points[i]};
    std::vector<std::size_t> members{i};
    SpherePoint cur = points[i];
    for (int k = 1; k < n; ++k) {
      SpherePoint img = evaluate(f, cur);
      std::size_t best = points.size();
      double best_d = std::numeric_limits<double>::infinity(), second_d = best_d;
      for (std::size_t j = 0; j < points.size(); ++j) {
        double dist = chordal(img, points[j]);
        if (dist < best_d) {
          second_d = best_d;
          best_d = dist;
          best = j;
        } else if (dist < second_d) {
          second_d = dist;
        }
      }
      if (best == points.size() || best_d >= match_tol)
        throw Error(ErrorCode::OrbitMismatch, "forward orbit leaves the point set (distance " + std::to_string(best_d) + ")");
      if (second_d <= std::max(10 * tol, 4 * best_d))
        throw Error(ErrorCode::OrbitMismatch, "ambiguous orbit continuation: distinct cycles closer than tolerance");
      if (used[best] || std::find(members.begin(), members.end(), best) != members.end())
        throw Error(ErrorCode::OrbitMismatch, "orbit revisits a point before closing");
      members.push_back(best);
      orbit.push_back(points[best]);
      cur = points[best];
    }
    if (chordal(evaluate(f, cur), points[i]) >= match_tol)
      throw Error(ErrorCode::OrbitMismatch, "orbit does not close after n steps");
    for (auto m : members) used[m] = 1;
    out.push_back(make_cycle(f, std::move(orbit), match_tol));
  }
  return out;
}

/// Cycles of exact period n via a (cached) solver.
inline std::vector<CycleRecord> cycles_of_period(PeriodicSolver& solver, int n) {
  return group_cycles(solver.map(), solver.points(n), n, solver.config().tol);
}

}  // namespace ratdyn
