#pragma once

// Simultaneous polynomial root finding (Aberth-Ehrlich iteration).
//
// The polynomial is only accessed through its Newton correction p(z)/p'(z),
// so callers can supply implicitly defined polynomials (iterates of a map)
// without ever expanding coefficients. Roots already known can be passed as
// fixed roots; they take part in the repulsion sum but never move, which
// deflates them implicitly.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ratdyn/error.hpp"
#include "ratdyn/parallel.hpp"
#include "ratdyn/polynomial.hpp"

namespace ratdyn {

struct AberthOptions {
  int max_iterations = 600;
  int restarts = 3;
  double rel_tol = 4e-16;
  std::uint64_t seed = 0x5eed;
};

struct AberthResult {
  std::vector<Complex> roots;
  std::vector<bool> converged;
  int iterations = 0;
  int unconverged() const {
    int n = 0;
    for (bool c : converged) n += c ? 0 : 1;
    return n;
  }
};

using NewtonCorrection = std::function<Complex(Complex)>;

inline AberthResult aberth(const NewtonCorrection& newton, std::vector<Complex> init,
                           const std::vector<Complex>& fixed = {}, const AberthOptions& opt = {}) {
  const std::size_t n = init.size();
  AberthResult res;
  res.roots = std::move(init);
  res.converged.assign(n, false);
  if (n == 0) return res;

  std::mt19937_64 rng(opt.seed);
  std::vector<Complex> step(n);
  std::vector<char> done(n, 0);

  for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
    for (int it = 0; it < opt.max_iterations; ++it) {
      ++res.iterations;
      parallel_for(n, [&](std::size_t i) {
        step[i] = Complex(0.0, 0.0);
        if (done[i]) return;
        const Complex z = res.roots[i];
        Complex ratio = newton(z);
        if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
          step[i] = Complex(std::nan(""), 0.0);
          return;
        }
        Complex sum(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) sum += 1.0 / (z - res.roots[j]);
        }
        for (const auto& r : fixed) sum += 1.0 / (z - r);
        Complex denom = 1.0 - ratio * sum;
        step[i] = (std::abs(denom) < 1e-300) ? ratio : ratio / denom;
      }, 16);

      bool all_done = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        const Complex s = step[i];
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
          std::uniform_real_distribution<double> u(-1e-3, 1e-3);
          res.roots[i] += Complex(u(rng), u(rng)) * std::max(1.0, std::abs(res.roots[i]));
          all_done = false;
          continue;
        }
        res.roots[i] -= s;
        if (std::abs(s) <= opt.rel_tol * std::max(1.0, std::abs(res.roots[i]))) {
          done[i] = 1;
        } else {
          all_done = false;
        }
      }
      if (all_done) break;
    }
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) all = all && done[i];
    if (all) break;
    if (attempt == opt.restarts) break;
    // Multi-start fallback: scatter the stragglers and iterate again.
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      res.roots[i] += Complex(g(rng), g(rng)) * 1e-2 * std::max(1.0, std::abs(res.roots[i]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) res.converged[i] = done[i] != 0;
  return res;
}

/// Starting points evenly spread on the sphere (Fibonacci lattice), projected
/// stereographically; suitable when roots may sit anywhere on the sphere.
inline std::vector<Complex> sphere_start_points(std::size_t n, std::uint64_t seed) {
  std::vector<Complex> pts;
  pts.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const double offset = u(rng);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    double zc = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
    double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    double th = offset + golden * static_cast<double>(k);
    // Inverse stereographic projection from the north pole.
    double x = r * std::cos(th), y = r * std::sin(th);
    pts.emplace_back(x / (1.0 - zc), y / (1.0 - zc));
  }
  return pts;
}

inline std::vector<Complex> circle_start_points(std::size_t n, double radius, std::uint64_t seed) {
  std::vector<Complex> pts;
  pts.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const double offset = u(rng);
  for (std::size_t k = 0; k < n; ++k) {
    double th = offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    pts.push_back(std::polar(radius, th));
  }
  return pts;
}

/// All complex roots of an explicit polynomial, with multiplicity.
inline std::vector<Complex> polynomial_roots(const Polynomial<Complex>& p, const AberthOptions& opt = {}) {
  const int n = p.degree();
  if (n < 1) return {};
  if (n == 1) return {-p[0] / p[1]};
  if (n == 2) {
    Complex a = p[2], b = p[1], c = p[0];
    Complex disc = std::sqrt(b * b - 4.0 * a * c);
    Complex q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0 ? disc : -disc));
    if (q == Complex(0.0, 0.0)) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
    return {q / a, c / q};
  }
  const Polynomial<Complex> dp = p.derivative();
  // Geometric-mean radius of the roots.
  double radius = std::abs(p[0]) > 0 ? std::pow(std::abs(p[0] / p.lead()), 1.0 / n) : 1.0;
  if (!std::isfinite(radius) || radius == 0.0) radius = 1.0;
  auto init = circle_start_points(static_cast<std::size_t>(n), radius, opt.seed);
  auto res = aberth([&](Complex z) { return p.eval(z) / dp.eval(z); }, std::move(init), {}, opt);
  if (res.unconverged() > 0) {
    // Roots with multiplicity converge linearly; accept them if the residual is tiny.
    double scale = 0.0;
    for (const auto& c : p.coeffs()) scale = std::max(scale, std::abs(c));
    for (std::size_t i = 0; i < res.roots.size(); ++i) {
      if (res.converged[i]) continue;
      Complex z = res.roots[i];
      double mag = std::pow(std::max(1.0, std::abs(z)), n);
      if (std::abs(p.eval(z)) > 1e-7 * scale * mag) {
        throw Error(ErrorCode::RootFindingFailed,
                    std::to_string(res.unconverged()) + " of " + std::to_string(n) + " roots did not converge");
      }
    }
  }
  return res.roots;
}

}  // namespace ratdyn
