#pragma once

// Periodic points shadowing a homoclinic return to a repelling point.
//
// Given a repelling fixed point z0 of F = f^q outside the postcritical set, a
// backward orbit z_l -> ... -> z_1 -> z_0 that re-enters a small disk V about
// z0 yields, for each n > 2l, a contraction w -> h(g^(n-l)(w)) of V, where g is
// the inverse branch of F fixing z0 and h the inverse branch of F^l along the
// chain. Its fixed point has exact period n and exponent tending to chi(z0).
// Inverse branches are evaluated by nearest-preimage continuation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ratdyn/arith.hpp"
#include "ratdyn/ergodic.hpp"
#include "ratdyn/periodic.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

struct HomoclinicSeed {
  NumericMap f;            // the original map
  NumericMap F;            // f^q
  int q = 1;
  SpherePoint z0;
  Complex lambda = 0.0;    // multiplier of F at z0
  int l = 0;
  std::vector<SpherePoint> chain;  // chain[j] = z_j, F(z_j) = z_{j-1}, chain[0] = z0
  double r_U = 0.0, r_V = 0.0, r_W = 0.0;
  double contraction = 0.0;        // measured Lipschitz ratio of g on V

  double chi0() const { return std::log(std::abs(lambda)) / q; }
};

namespace detail {

/// A point at chordal distance about r from p in direction angle.
inline SpherePoint point_near(const SpherePoint& p, double r, double angle) {
  const Chart c = chart_of(p);
  const Complex t = chart_coordinate(p, c);
  const double rho = r * (1.0 + std::norm(t)) / 2.0;
  return from_chart(t + std::polar(rho, angle), c);
}

/// Preimage of w under F nearest to anchor, with the gap to the next one.
inline std::pair<SpherePoint, double> nearest_preimage(const NumericMap& F, const SpherePoint& w, const SpherePoint& anchor) {
  auto pre = preimages(F, w);
  double best = std::numeric_limits<double>::infinity(), second = best;
  SpherePoint out = pre.front();
  for (const auto& p : pre) {
    double d = chordal(p, anchor);
    if (d < best) {
      second = best;
      best = d;
      out = p;
    } else if (d < second) {
      second = d;
    }
  }
  return {out, second};
}

inline double distance_to_set(const SpherePoint& p, const std::vector<SpherePoint>& set) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : set) d = std::min(d, chordal(p, s));
  return d;
}

}  // namespace detail

struct SeedOptions {
  int postcritical_depth = 32;
  std::size_t max_tree = 1u << 18;  // frontier size limit for the preimage search
};

/// Breadth-first search over iterated preimages of z0 (leaving the branch
/// that fixes z0) for the first one that lands back inside V.
inline HomoclinicSeed find_seed(const NumericMap& f, SpherePoint z0, int q = 1, int search_depth = 16, double tol = 1e-9,
                                const SeedOptions& opt = {}) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
  HomoclinicSeed s;
  s.f = f;
  s.q = q;
  s.F = q == 1 ? f : iterate(f, q);
  const NumericMap& F = s.F;

  // z0 may be given approximately; Newton settles it on the nearby fixed point.
  const SpherePoint given = z0;
  z0 = detail::polish_periodic(F, z0, 1, 12);
  if (chordal(evaluate(F, z0), z0) > std::max(1e3 * tol, 1e-6) || chordal(z0, given) > 1e-3)
    throw Error(ErrorCode::InvalidArgument, "z0 is not fixed by f^q");
  s.z0 = z0;
  s.lambda = jet(F, z0, chart_of(z0), chart_of(z0)).derivative;
  if (!(std::abs(s.lambda) > 1.0)) throw Error(ErrorCode::NotRepelling, "|multiplier| = " + std::to_string(std::abs(s.lambda)));

  auto post = postcritical_truncation(f, opt.postcritical_depth, 1e-9);
  if (detail::distance_to_set(z0, post.points) <= 10 * tol)
    throw Error(ErrorCode::InPostcriticalSet, "z0 lies in the postcritical set");

  // Critical values of F are f^k(c) for k <= q; V avoids them at twice its radius.
  auto crit_values = postcritical_truncation(f, q, 1e-12).points;
  std::vector<SpherePoint> crit;
  for (const auto& c : critical_points(F)) crit.push_back(c.point);
  const double abs_l = std::abs(s.lambda);
  double rv = std::min(0.25, 0.25 * detail::distance_to_set(z0, crit_values));

  // Shrink V until g contracts it at a rate close to 1/|lambda|.
  for (int shrink = 0;; ++shrink) {
    if (shrink > 40) throw Error(ErrorCode::NoReturnFound, "could not size a contracting disk");
    double theta = 0.0;
    bool ok = true;
    for (int k = 0; k < 16 && ok; ++k) {
      for (double frac : {1.0, 0.5}) {
        SpherePoint z = detail::point_near(z0, rv * frac, 2 * std::numbers::pi * (k + 0.37) / 16);
        auto [g, gap] = detail::nearest_preimage(F, z, z0);
        double ratio = chordal(g, z0) / chordal(z, z0);
        if (chordal(g, z0) * 4 > gap) ok = false;
        theta = std::max(theta, ratio);
      }
    }
    if (ok && theta < 1.0 && std::abs(theta * abs_l - 1.0) <= 0.2) {
      s.contraction = theta;
      break;
    }
    rv *= 0.5;
  }
  s.r_V = rv;
  s.r_U = rv / abs_l;

  struct Node {
    SpherePoint p;
    std::size_t parent;
  };
  std::vector<std::vector<Node>> levels{{Node{z0, 0}}};
  for (int depth = 1; depth <= search_depth; ++depth) {
    std::vector<Node> next;
    const auto& cur = levels.back();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (const auto& p : preimages(F, cur[i].p)) {
        if (depth == 1 && chordal(p, z0) < 1e-7) continue;  // the branch fixing z0
        next.push_back({p, i});
      }
    }
    if (next.size() > opt.max_tree) break;
    levels.push_back(next);
    std::vector<std::size_t> order(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return chordal(next[a].p, z0) < chordal(next[b].p, z0); });
    for (std::size_t idx : order) {
      const double dist = chordal(next[idx].p, z0);
      if (dist >= rv) break;
      if (dist <= 10 * tol) continue;
      std::vector<SpherePoint> chain(static_cast<std::size_t>(depth) + 1);
      std::size_t at = idx;
      for (int j = depth; j >= 1; --j) {
        chain[static_cast<std::size_t>(j)] = levels[static_cast<std::size_t>(j)][at].p;
        at = levels[static_cast<std::size_t>(j)][at].parent;
      }
      chain[0] = z0;
      // F^l must be unbranched along the chain.
      bool critical = false;
      double expand = 1.0;
      for (int j = 1; j <= depth; ++j) {
        if (detail::distance_to_set(chain[static_cast<std::size_t>(j)], crit) < 1e-6) critical = true;
        expand *= spherical_norm(F, chain[static_cast<std::size_t>(j)]);
      }
      if (critical) continue;
      const double rw = s.r_U / expand;
      if (dist + rw >= rv) continue;
      s.l = depth;
      s.chain = std::move(chain);
      s.r_W = rw;
      return s;
    }
  }
  throw Error(ErrorCode::NoReturnFound, "no return to V within " + std::to_string(search_depth) + " preimage steps");
}

struct LemmaEntry {
  int n = 0;
  SpherePoint w;
  bool period_verified = false;
  double residual = 0.0;  // max over the cycle of chordal(F(w_{k+1}), w_k), closure included
  Complex lambda = 0.0;   // multiplier of F^n at w
  double chi = 0.0;       // per iterate of f
};

struct LemmaSequence {
  std::vector<LemmaEntry> entries;
  double target = 0.0;
  int l = 0;
  int q = 1;
};

namespace detail {

struct ShadowCycle {
  std::vector<SpherePoint> backward;  // backward[0] = w, F(backward[k+1]) = backward[k]
  double residual = 0.0;
};

/// One pass of w -> h(g^(n-l)(w)), recording the backward orbit.
inline ShadowCycle shadow_pass(const HomoclinicSeed& s, int n, const SpherePoint& w) {
  ShadowCycle c;
  c.backward.reserve(static_cast<std::size_t>(n) + 1);
  c.backward.push_back(w);
  SpherePoint cur = w;
  for (int k = 0; k < n - s.l; ++k) {
    cur = nearest_preimage(s.F, cur, s.z0).first;
    c.backward.push_back(cur);
  }
  for (int j = 1; j <= s.l; ++j) {
    cur = nearest_preimage(s.F, cur, s.chain[static_cast<std::size_t>(j)]).first;
    c.backward.push_back(cur);
  }
  return c;
}

/// Closes the orbit at w and measures the stepwise residual.
inline ShadowCycle close_cycle(const HomoclinicSeed& s, int n, const SpherePoint& w) {
  ShadowCycle c = shadow_pass(s, n, w);
  c.backward.back() = c.backward.front();
  for (int k = 0; k < n; ++k)
    c.residual = std::max(c.residual, chordal(evaluate(s.F, c.backward[static_cast<std::size_t>(k) + 1]),
                                              c.backward[static_cast<std::size_t>(k)]));
  c.backward.pop_back();
  return c;
}

}  // namespace detail

inline LemmaSequence lemma_sequence(const HomoclinicSeed& s, int n_min, int n_max, double tol = 1e-9) {
  if (n_min < 2 * s.l + 1)
    throw Error(ErrorCode::InvalidArgument, "n_min must be at least 2l+1 = " + std::to_string(2 * s.l + 1));
  if (n_max < n_min) throw Error(ErrorCode::InvalidArgument, "n_max < n_min");
  LemmaSequence seq;
  seq.target = s.chi0();
  seq.l = s.l;
  seq.q = s.q;
  const std::size_t count = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<LemmaEntry> entries(count);
  std::vector<std::string> errors(count);
  std::vector<ErrorCode> codes(count, ErrorCode::NewtonDiverged);
  parallel_for(
      count,
      [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        try {
          // Contraction: each pass shrinks the error by about |lambda|^-(n-l).
          SpherePoint w = s.chain.back();
          for (int it = 0; it < 60; ++it) {
            SpherePoint nw = detail::shadow_pass(s, n, w).backward.back();
            double step = chordal(nw, w);
            w = nw;
            if (step < 1e-16) break;
          }
          auto best = detail::close_cycle(s, n, w);
          // Newton on F^n(w) = w; kept only when it does not degrade the residual.
          SpherePoint nw = detail::polish_periodic(s.F, w, n, 2);
          if (chordal(nw, s.chain.back()) < s.r_V) {
            auto alt = detail::close_cycle(s, n, nw);
            if (alt.residual < best.residual) {
              best = std::move(alt);
              w = nw;
            }
          }
          if (!(best.residual < tol) || chordal(w, s.chain.back()) > s.r_V) {
            codes[i] = ErrorCode::NewtonDiverged;
            errors[i] = "period " + std::to_string(n) + ": residual " + std::to_string(best.residual);
            return;
          }
          // Forward order: w, F(w), ..., F^(n-1)(w).
          std::vector<SpherePoint> orbit{best.backward[0]};
          for (int k = n - 1; k >= 1; --k) orbit.push_back(best.backward[static_cast<std::size_t>(k)]);
          for (int k : divisors(n)) {
            if (k == n) continue;
            if (chordal(orbit[static_cast<std::size_t>(k)], orbit[0]) <= 10 * tol) {
              codes[i] = ErrorCode::PeriodCollision;
              errors[i] = "period " + std::to_string(n) + " point has period " + std::to_string(k);
              return;
            }
          }
          LemmaEntry e;
          e.n = n;
          e.w = w;
          e.residual = best.residual;
          e.period_verified = true;
          e.lambda = multiplier(s.F, orbit, std::max(1e3 * tol, 1e-6));
          e.chi = std::log(std::abs(e.lambda)) / (static_cast<double>(n) * s.q);
          entries[i] = e;
        } catch (const Error& e) {
          codes[i] = e.code();
          errors[i] = e.what();
        }
      },
      1);
  for (std::size_t i = 0; i < count; ++i)
    if (!errors[i].empty()) throw Error(codes[i], errors[i]);
  seq.entries = std::move(entries);
  return seq;
}

struct LemmaDiagnostics {
  std::vector<int> n;
  std::vector<double> deviation;  // chi_n - chi(z0)
  double max_abs_deviation = 0.0;
  double fitted_c = 0.0;          // least-squares C in |deviation| ~ C/n
  double max_c_ratio = 0.0;       // max n|deviation| / C
  Complex fit_a = 0.0, fit_b = 0.0;  // lambda_n ~ a lambda^n + b
  std::vector<double> fit_relative_residual;
  std::vector<double> lower_slack, upper_slack;  // log|lambda_n| minus / below the empirical sandwich
};

/// Deviation table, the C/n fit, the affine fit in lambda^n and the slack
/// against bounds built from min/max of ||F'|| over V and along the chain.
inline LemmaDiagnostics convergence_report(const LemmaSequence& seq, const HomoclinicSeed& s) {
  if (seq.entries.size() < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 entries");
  LemmaDiagnostics d;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& e : seq.entries) {
    const double dev = e.chi - seq.target;
    d.n.push_back(e.n);
    d.deviation.push_back(dev);
    d.max_abs_deviation = std::max(d.max_abs_deviation, std::abs(dev));
    const double x = 1.0 / e.n;
    sxy += x * std::abs(dev);
    sxx += x * x;
  }
  d.fitted_c = sxy / sxx;
  for (std::size_t i = 0; i < d.n.size(); ++i)
    d.max_c_ratio = std::max(d.max_c_ratio, d.fitted_c > 0 ? d.n[i] * std::abs(d.deviation[i]) / d.fitted_c : 0.0);

  // Complex least squares for lambda_n = a * lambda^n + b, scaled by lambda^n.
  {
    Complex s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (const auto& e : seq.entries) {
      const Complex p = std::pow(s.lambda, e.n);
      const Complex x1 = 1.0, x2 = 1.0 / p, y = e.lambda / p;
      s11 += std::conj(x1) * x1;
      s12 += std::conj(x1) * x2;
      s22 += std::conj(x2) * x2;
      r1 += std::conj(x1) * y;
      r2 += std::conj(x2) * y;
    }
    const Complex det = s11 * s22 - std::conj(s12) * s12;
    if (std::abs(det) > 0) {
      d.fit_a = (s22 * r1 - s12 * r2) / det;
      d.fit_b = (s11 * r2 - std::conj(s12) * r1) / det;
    }
    for (const auto& e : seq.entries) {
      const Complex p = std::pow(s.lambda, e.n);
      d.fit_relative_residual.push_back(std::abs(e.lambda - (d.fit_a * p + d.fit_b)) / std::abs(e.lambda));
    }
  }

  double m = std::numeric_limits<double>::infinity(), M = 0.0;
  for (int ring = 0; ring <= 4; ++ring)
    for (int k = 0; k < 24; ++k) {
      SpherePoint z = ring == 0 ? s.z0 : detail::point_near(s.z0, s.r_V * ring / 4.0, 2 * std::numbers::pi * k / 24);
      const double v = spherical_norm(s.F, z);
      m = std::min(m, v);
      M = std::max(M, v);
    }
  double chain_log = 0.0;
  for (int j = 1; j < s.l; ++j) chain_log += std::log(spherical_norm(s.F, s.chain[static_cast<std::size_t>(j)]));
  for (const auto& e : seq.entries) {
    const double ll = std::log(std::abs(e.lambda));
    const double inside = static_cast<double>(e.n - s.l + 1);
    d.lower_slack.push_back(ll - (inside * std::log(m) + chain_log));
    d.upper_slack.push_back(inside * std::log(M) + chain_log - ll);
  }
  return d;
}

}  // namespace ratdyn
