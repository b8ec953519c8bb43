#pragma once

// Sampling of the measure of maximal entropy, Lyapunov exponents, weak
// convergence of periodic measures and the scan for cycles whose
// characteristic exponent exceeds the Lyapunov exponent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ratdyn/parallel.hpp"
#include "ratdyn/periodic.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

struct BackwardOrbit {
  std::uint64_t seed = 0;
  int burn_in = 0;
};

struct PreimageTree {
  std::uint64_t seed = 0;
  int depth = 0;
};

struct PeriodicSet {
  int period = 0;
  std::vector<std::string> factor_tags;
};

using CloudProvenance = std::variant<BackwardOrbit, PreimageTree, PeriodicSet>;

struct PointCloud {
  std::vector<SpherePoint> points;
  std::vector<double> weights;
  std::vector<int> chain;  // sampling chain per point; empty when points are not grouped
  CloudProvenance provenance;

  std::size_t size() const { return points.size(); }
};

struct LyapunovEstimate {
  enum class Method { MonteCarlo, PeriodicAverage };
  double value = 0.0;
  double std_error = 0.0;
  long sample_count = 0;
  long clipped = 0;
  Method method = Method::MonteCarlo;
};

inline constexpr double kNormFloor = 1e-300;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Pairwise summation keeps the reduction independent of chunking.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

inline SpherePoint random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double x = g(rng), y = g(rng), z = g(rng);
  double r = std::sqrt(x * x + y * y + z * z);
  x /= r, y /= r, z /= r;
  // Inverse stereographic projection from the north pole.
  if (z > 1.0 - 1e-15) return SpherePoint::infinity();
  return SpherePoint::finite(Complex(x, y) / (1.0 - z));
}

}  // namespace detail

/// All d preimages of w, listed with multiplicity.
inline std::vector<SpherePoint> preimages(const NumericMap& f, const SpherePoint& w) {
  const int d = f.degree();
  Polynomial<Complex> q;
  if (!w.infinite && std::abs(w.z) <= 1.0) {
    q = f.num() - f.den() * w.z;
  } else {
    Complex s = w.infinite ? Complex(0.0) : 1.0 / w.z;
    q = f.den() - f.num() * s;
  }
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(d));
  if (q.degree() >= 1)
    for (const auto& r : polynomial_roots(q)) out.push_back(SpherePoint::finite(r));
  while (static_cast<int>(out.size()) < d) out.push_back(SpherePoint::infinity());
  return out;
}

/// Equal-weight cloud from independent chains of random preimage choices;
/// each chain discards burn_in steps before recording.
inline PointCloud backward_orbit_sample(const NumericMap& f, long count, int burn_in, std::uint64_t seed, int chains = 32) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  if (burn_in < 0) throw Error(ErrorCode::InvalidArgument, "burn_in must be >= 0");
  const long nchains = std::max<long>(1, std::min<long>(chains, count));
  std::vector<std::vector<SpherePoint>> per_chain(static_cast<std::size_t>(nchains));
  std::vector<std::string> errors(static_cast<std::size_t>(nchains));
  parallel_for(
      static_cast<std::size_t>(nchains),
      [&](std::size_t c) {
        const long len = count / nchains + (static_cast<long>(c) < count % nchains ? 1 : 0);
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(c + 1)));
        try {
          for (int attempt = 0; attempt < 8; ++attempt) {
            SpherePoint z = detail::random_sphere_point(rng);
            std::vector<SpherePoint> hist;
            for (int k = 0; k < burn_in; ++k) {
              auto pre = preimages(f, z);
              z = pre[rng() % pre.size()];
              hist.push_back(z);
            }
            // A start in the exceptional set never moves; redraw it.
            if (hist.size() >= 8) {
              bool stuck = true;
              for (std::size_t k = hist.size() - 8; k < hist.size(); ++k)
                if (chordal(hist[k], hist.back()) > 1e-12) stuck = false;
              if (stuck) continue;
            }
            auto& out = per_chain[c];
            out.reserve(static_cast<std::size_t>(len));
            for (long k = 0; k < len; ++k) {
              if (k > 0) {
                auto pre = preimages(f, z);
                z = pre[rng() % pre.size()];
              }
              out.push_back(z);
            }
            return;
          }
          errors[c] = "backward orbit degenerates from every start point";
        } catch (const Error& e) {
          errors[c] = e.what();
        }
      },
      1);
  for (const auto& e : errors)
    if (!e.empty()) throw Error(ErrorCode::RootFindingFailed, e);
  PointCloud cloud;
  cloud.provenance = BackwardOrbit{seed, burn_in};
  for (std::size_t c = 0; c < per_chain.size(); ++c)
    for (const auto& p : per_chain[c]) {
      cloud.points.push_back(p);
      cloud.chain.push_back(static_cast<int>(c));
    }
  cloud.weights.assign(cloud.points.size(), 1.0 / static_cast<double>(cloud.points.size()));
  return cloud;
}

/// Every depth-level preimage of a start point, each weighted 1/d^depth. The
/// start is the end of a burnt-in backward chain, so it already lies within
/// rounding of the Julia set and the tree carries no drift from it.
inline PointCloud preimage_tree_cloud(const NumericMap& f, int depth, std::uint64_t seed, std::size_t max_points = 1u << 22) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  const double total = std::pow(static_cast<double>(f.degree()), depth);
  if (total > static_cast<double>(max_points)) throw Error(ErrorCode::DegreeCapExceeded, "preimage tree too large");
  std::vector<SpherePoint> level{backward_orbit_sample(f, 1, 200, seed, 1).points[0]};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::vector<SpherePoint>> next(level.size());
    parallel_for(level.size(), [&](std::size_t i) { next[i] = preimages(f, level[i]); });
    level.clear();
    for (auto& v : next) level.insert(level.end(), v.begin(), v.end());
  }
  PointCloud cloud;
  cloud.provenance = PreimageTree{seed, depth};
  cloud.points = std::move(level);
  cloud.weights.assign(cloud.points.size(), 1.0 / static_cast<double>(cloud.points.size()));
  return cloud;
}

/// Uniform measure on the points of exact period n.
inline PointCloud periodic_cloud(PeriodicSolver& solver, int n, std::vector<std::string> factor_tags = {}) {
  const auto& pts = solver.points(n);
  PointCloud cloud;
  cloud.provenance = PeriodicSet{n, std::move(factor_tags)};
  cloud.points = pts;
  cloud.weights.assign(pts.size(), pts.empty() ? 0.0 : 1.0 / static_cast<double>(pts.size()));
  return cloud;
}

inline PointCloud pushforward(const NumericMap& f, const PointCloud& cloud) {
  PointCloud out = cloud;
  for (auto& p : out.points) p = evaluate(f, p);
  return out;
}

inline double integrate(const PointCloud& cloud, const std::function<double(const SpherePoint&)>& phi) {
  std::vector<double> terms(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) terms[i] = cloud.weights[i] * phi(cloud.points[i]);
  return detail::pairwise_sum(terms);
}

namespace detail {

/// Weighted mean with a delete-one-group jackknife error. Without groups every
/// point is its own group.
inline std::pair<double, double> jackknife_mean(const std::vector<double>& values, const std::vector<double>& weights,
                                                const std::vector<int>& groups) {
  const std::size_t n = values.size();
  std::vector<double> wv(n);
  for (std::size_t i = 0; i < n; ++i) wv[i] = weights[i] * values[i];
  const double S = pairwise_sum(wv), W = pairwise_sum(weights);
  const double mean = S / W;
  int G = 0;
  std::vector<double> gs, gw;
  if (!groups.empty()) {
    G = *std::max_element(groups.begin(), groups.end()) + 1;
    gs.assign(static_cast<std::size_t>(G), 0.0);
    gw.assign(static_cast<std::size_t>(G), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      gs[static_cast<std::size_t>(groups[i])] += wv[i];
      gw[static_cast<std::size_t>(groups[i])] += weights[i];
    }
  } else {
    G = static_cast<int>(n);
    gs = wv;
    gw = weights;
  }
  if (G < 2) return {mean, 0.0};
  std::vector<double> theta;
  for (int g = 0; g < G; ++g) {
    double w = W - gw[static_cast<std::size_t>(g)];
    if (w > 0) theta.push_back((S - gs[static_cast<std::size_t>(g)]) / w);
  }
  if (theta.size() < 2) return {mean, 0.0};
  const double tbar = pairwise_sum(theta) / static_cast<double>(theta.size());
  std::vector<double> dev(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) dev[i] = (theta[i] - tbar) * (theta[i] - tbar);
  const double k = static_cast<double>(theta.size());
  return {mean, std::sqrt((k - 1) / k * pairwise_sum(dev))};
}

}  // namespace detail

inline LyapunovEstimate lyapunov(const NumericMap& f, const PointCloud& cloud) {
  if (cloud.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty cloud");
  LyapunovEstimate est;
  std::vector<double> vals(cloud.size());
  std::vector<char> clip(cloud.size(), 0);
  parallel_for(cloud.size(), [&](std::size_t i) {
    double nv = spherical_norm(f, cloud.points[i]);
    if (!(nv >= kNormFloor)) {
      nv = kNormFloor;
      clip[i] = 1;
    }
    vals[i] = std::log(nv);
  });
  for (char c : clip) est.clipped += c;
  auto [mean, se] = detail::jackknife_mean(vals, cloud.weights, cloud.chain);
  est.value = mean;
  est.std_error = se;
  est.sample_count = static_cast<long>(cloud.size());
  est.method = LyapunovEstimate::Method::MonteCarlo;
  return est;
}

/// Average of log||f'|| over all points of exact period n. The error is the
/// spread of the per-cycle exponents over sqrt(#cycles).
inline LyapunovEstimate lyapunov_from_periodic(PeriodicSolver& solver, int n) {
  const auto& f = solver.map();
  const auto& pts = solver.points(n);
  LyapunovEstimate est;
  est.method = LyapunovEstimate::Method::PeriodicAverage;
  est.sample_count = static_cast<long>(pts.size());
  if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "no points of exact period " + std::to_string(n));
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double nv = spherical_norm(f, pts[i]);
    if (!(nv >= kNormFloor)) {
      nv = kNormFloor;
      ++est.clipped;
    }
    vals[i] = std::log(nv);
  }
  est.value = detail::pairwise_sum(vals) / static_cast<double>(vals.size());
  auto cycles = group_cycles(f, pts, n, solver.config().tol);
  if (cycles.size() >= 2) {
    std::vector<double> chi;
    for (const auto& c : cycles) chi.push_back(std::max(c.char_exponent, std::log(kNormFloor)));
    double m = detail::pairwise_sum(chi) / static_cast<double>(chi.size());
    double ss = 0.0;
    for (double x : chi) ss += (x - m) * (x - m);
    est.std_error = std::sqrt(ss / static_cast<double>(chi.size() - 1)) / std::sqrt(static_cast<double>(chi.size()));
  }
  return est;
}

inline LyapunovEstimate lyapunov_from_periodic(const ExactMap& f, int n, const PeriodicConfig& cfg = {}) {
  PeriodicSolver solver(to_complex(f), cfg);
  return lyapunov_from_periodic(solver, n);
}

// ---------------------------------------------------------------------------
// Weak convergence

struct TestFunction {
  std::string name;
  std::function<double(const SpherePoint&)> eval;
};

/// Re/Im of zeta^a Z^c on the unit sphere (zeta = X + iY), 1 <= a + c <= degree,
/// plus max(log||f'||, clip_level).
inline std::vector<TestFunction> test_dictionary(const NumericMap& f, int degree, double clip_level = -5.0) {
  if (degree < 1) throw Error(ErrorCode::InvalidArgument, "test degree must be >= 1");
  std::vector<TestFunction> out;
  for (int total = 1; total <= degree; ++total)
    for (int a = total; a >= 0; --a) {
      const int c = total - a;
      auto mono = [a, c](const SpherePoint& p) {
        auto s = to_unit_sphere(p);
        return std::pow(Complex(s[0], s[1]), a) * std::pow(s[2], c);
      };
      std::string base = "zeta^" + std::to_string(a) + "*Z^" + std::to_string(c);
      out.push_back({"Re(" + base + ")", [mono](const SpherePoint& p) { return mono(p).real(); }});
      if (a > 0) out.push_back({"Im(" + base + ")", [mono](const SpherePoint& p) { return mono(p).imag(); }});
    }
  out.push_back({"max(log|f'|," + std::to_string(clip_level) + ")", [f, clip_level](const SpherePoint& p) {
                   double nv = spherical_norm(f, p);
                   return std::max(nv > 0 ? std::log(nv) : -std::numeric_limits<double>::infinity(), clip_level);
                 }});
  return out;
}

struct WeakConvergenceReport {
  std::vector<std::string> test_functions;
  std::vector<std::vector<double>> discrepancy;  // per cloud, per test function
};

inline WeakConvergenceReport weak_convergence_report(const NumericMap& f, const std::vector<PointCloud>& clouds,
                                                     const PointCloud& reference, int test_degree,
                                                     double clip_level = -5.0) {
  auto dict = test_dictionary(f, test_degree, clip_level);
  WeakConvergenceReport rep;
  std::vector<double> ref;
  for (const auto& t : dict) {
    rep.test_functions.push_back(t.name);
    ref.push_back(integrate(reference, t.eval));
  }
  for (const auto& c : clouds) {
    std::vector<double> row;
    for (std::size_t j = 0; j < dict.size(); ++j) row.push_back(std::abs(integrate(c, dict[j].eval) - ref[j]));
    rep.discrepancy.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cycles beating the Lyapunov exponent

struct ZdunikHit {
  CycleRecord cycle;
  double margin = 0.0;  // chi - L
};

struct ZdunikOptions {
  int postcritical_depth = 32;
  double sigma = 3.0;      // hits must clear sigma * std_error
  double slack = 1e-9;
};

/// Repelling cycles of period <= max_period, not in the postcritical set, with
/// chi > L + sigma * std_error + slack; sorted by decreasing margin.
inline std::vector<ZdunikHit> zdunik_scan(PeriodicSolver& solver, int max_period, const LyapunovEstimate& lyap,
                                          const ZdunikOptions& opt = {}) {
  const auto& f = solver.map();
  auto post = postcritical_truncation(f, opt.postcritical_depth, 1e-9);
  const double threshold = lyap.value + opt.sigma * lyap.std_error + opt.slack;
  std::vector<ZdunikHit> hits;
  for (int n = 1; n <= max_period; ++n) {
    for (auto& c : cycles_of_period(solver, n)) {
      if (!c.repelling) continue;
      bool in_post = false;
      for (const auto& p : c.points)
        if (contains_point(post.points, p, 1e-7)) in_post = true;
      if (in_post) continue;
      if (c.char_exponent > threshold) hits.push_back({std::move(c), 0.0});
    }
  }
  for (auto& h : hits) h.margin = h.cycle.char_exponent - lyap.value;
  std::stable_sort(hits.begin(), hits.end(), [](const ZdunikHit& a, const ZdunikHit& b) { return a.margin > b.margin; });
  return hits;
}

inline std::vector<ZdunikHit> zdunik_scan(const NumericMap& f, int max_period, const LyapunovEstimate& lyap,
                                          const ZdunikOptions& opt = {}, const PeriodicConfig& cfg = {}) {
  PeriodicSolver solver(f, cfg);
  return zdunik_scan(solver, max_period, lyap, opt);
}

}  // namespace ratdyn
