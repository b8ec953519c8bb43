#pragma once

// Factorization of integer polynomials: squarefree decomposition, then
// Cantor-Zassenhaus modulo a small prime, quadratic Hensel lifting to beyond
// a Mignotte-type coefficient bound, and recombination of lifted factors by
// trial division.

#include <gmpxx.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "ratdyn/modular.hpp"
#include "ratdyn/polynomial.hpp"

namespace ratdyn {

using ZPoly = Polynomial<mpz_class>;
using QPoly = Polynomial<mpq_class>;

inline mpz_class content(const ZPoly& f) {
  mpz_class g = 0;
  for (const auto& c : f.coeffs()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

/// Primitive integer polynomial with positive leading coefficient.
inline ZPoly primitive_part(const ZPoly& f) {
  if (f.is_zero()) return f;
  mpz_class g = content(f);
  if (f.lead() < 0) g = -g;
  std::vector<mpz_class> c;
  for (const auto& v : f.coeffs()) c.push_back(mpz_class(v / g));
  return ZPoly(std::move(c));
}

/// Primitive integer multiple of a rational polynomial.
inline ZPoly clear_denominators(const QPoly& f) {
  mpz_class l = 1;
  for (const auto& c : f.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  std::vector<mpz_class> c;
  for (const auto& v : f.coeffs()) c.push_back(mpz_class(v * l));
  return primitive_part(ZPoly(std::move(c)));
}

inline QPoly to_rational(const ZPoly& f) {
  return f.map<mpq_class>([](const mpz_class& v) { return mpq_class(v); });
}

namespace detail {

using modp::Field;
using modp::Poly;

/// Distinct-degree factorization of a monic squarefree polynomial mod p, using
/// a precomputed Frobenius matrix for h -> h^p mod f.
inline std::vector<std::pair<Poly, int>> distinct_degree(const Field& F, Poly f) {
  std::vector<std::pair<Poly, int>> out;
  const int n = modp::deg(f);
  if (n <= 0) return out;
  const Poly x{0, 1};
  const Poly xp = modp::powmod(F, x, modp::to_mpz(F.p), f);
  // rows[j] = x^{jp} mod f
  std::vector<Poly> rows(static_cast<std::size_t>(n));
  rows[0] = Poly{1};
  for (int j = 1; j < n; ++j) rows[static_cast<std::size_t>(j)] = modp::mulmod(F, rows[static_cast<std::size_t>(j - 1)], xp, f);
  auto frob = [&](const Poly& h) {
    std::vector<modp::u128> acc(static_cast<std::size_t>(n), 0);
    Poly r(static_cast<std::size_t>(n), 0);
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (h[j] == 0) continue;
      const Poly& row = rows[j];
      for (std::size_t k = 0; k < row.size(); ++k) acc[k] = (acc[k] + static_cast<modp::u128>(h[j]) * row[k]) % F.p;
    }
    for (int k = 0; k < n; ++k) r[static_cast<std::size_t>(k)] = static_cast<modp::u64>(acc[static_cast<std::size_t>(k)]);
    modp::trim(r);
    return r;
  };
  Poly g = f;
  Poly h = x;
  for (int i = 1; 2 * i <= modp::deg(g); ++i) {
    h = frob(h);  // x^{p^i} mod f
    Poly d = modp::gcd(F, modp::sub(F, modp::rem(F, h, g), modp::rem(F, x, g)), g);
    if (modp::deg(d) > 0) {
      out.emplace_back(d, i);
      g = modp::divmod(F, g, d).first;
    }
  }
  if (modp::deg(g) > 0) out.emplace_back(g, modp::deg(g));
  return out;
}

/// Equal-degree splitting (odd p): all irreducible factors of f have degree d.
inline void equal_degree(const Field& F, const Poly& f, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
  const int n = modp::deg(f);
  if (n == d) {
    out.push_back(modp::monic(F, f));
    return;
  }
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), F.p, static_cast<unsigned long>(d));
  e = (e - 1) / 2;
  std::uniform_int_distribution<modp::u64> u(0, F.p - 1);
  while (true) {
    Poly a(static_cast<std::size_t>(n), 0);
    for (auto& c : a) c = u(rng);
    modp::trim(a);
    if (modp::deg(a) < 1) continue;
    Poly g = modp::gcd(F, a, f);
    if (modp::deg(g) > 0 && modp::deg(g) < n) {
      equal_degree(F, g, d, rng, out);
      equal_degree(F, modp::divmod(F, f, g).first, d, rng, out);
      return;
    }
    Poly b = modp::powmod(F, a, e, f);
    b = modp::sub(F, b, Poly{1});
    g = modp::gcd(F, b, f);
    if (modp::deg(g) > 0 && modp::deg(g) < n) {
      equal_degree(F, g, d, rng, out);
      equal_degree(F, modp::divmod(F, f, g).first, d, rng, out);
      return;
    }
  }
}

/// Monic irreducible factors of a monic squarefree polynomial mod odd p.
inline std::vector<Poly> factor_mod_p(const Field& F, const Poly& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Poly> out;
  for (auto& [g, d] : distinct_degree(F, f)) equal_degree(F, g, d, rng, out);
  return out;
}

// Polynomials over Z/M for a big modulus M.

inline ZPoly zmod(const ZPoly& a, const mpz_class& M) {
  std::vector<mpz_class> c;
  c.reserve(a.coeffs().size());
  for (const auto& v : a.coeffs()) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), M.get_mpz_t());
    c.push_back(r);
  }
  return ZPoly(std::move(c));
}

inline ZPoly zmul(const ZPoly& a, const ZPoly& b, const mpz_class& M) { return zmod(a * b, M); }

/// Division by a monic b over Z/M.
inline std::pair<ZPoly, ZPoly> zdivmod_monic(const ZPoly& a, const ZPoly& b, const mpz_class& M) {
  if (a.degree() < b.degree()) return {ZPoly{}, zmod(a, M)};
  std::vector<mpz_class> r = zmod(a, M).coeffs();
  r.resize(static_cast<std::size_t>(a.degree() + 1), 0);
  const int db = b.degree();
  std::vector<mpz_class> q(static_cast<std::size_t>(a.degree() - db + 1), 0);
  for (int k = a.degree() - db; k >= 0; --k) {
    mpz_class c = r[static_cast<std::size_t>(k + db)];
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), M.get_mpz_t());
    q[static_cast<std::size_t>(k)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= c * b.coeffs()[static_cast<std::size_t>(j)];
  }
  r.resize(static_cast<std::size_t>(db));
  return {zmod(ZPoly(std::move(q)), M), zmod(ZPoly(std::move(r)), M)};
}

inline ZPoly lift_poly(const Poly& a) {
  std::vector<mpz_class> c;
  for (auto v : a) c.push_back(modp::to_mpz(v));
  return ZPoly(std::move(c));
}

/// Quadratic Hensel lifting of f = g h (mod p), g and h monic and coprime,
/// to modulus M = p^(2^k) >= target. Returns lifted (g, h) mod M.
inline std::pair<ZPoly, ZPoly> hensel_lift(const ZPoly& f, const Poly& g0, const Poly& h0, const Field& F,
                                           const mpz_class& M_final) {
  auto [one, s0, t0] = modp::xgcd(F, g0, h0);
  if (modp::deg(one) != 0) throw Error(ErrorCode::InvalidArgument, "Hensel lifting needs coprime factors");
  ZPoly g = lift_poly(g0), h = lift_poly(h0), s = lift_poly(s0), t = lift_poly(t0);
  mpz_class m = modp::to_mpz(F.p);
  while (m < M_final) {
    mpz_class m2 = m * m;
    if (m2 > M_final) m2 = M_final;
    ZPoly e = zmod(f - g * h, m2);
    auto [q, r] = zdivmod_monic(zmul(s, e, m2), h, m2);
    ZPoly gn = zmod(g + t * e + q * g, m2);
    ZPoly hn = zmod(h + r, m2);
    ZPoly b = zmod(s * gn + t * hn - ZPoly::constant(mpz_class(1)), m2);
    auto [c, dd] = zdivmod_monic(zmul(s, b, m2), hn, m2);
    s = zmod(s - dd, m2);
    t = zmod(t - t * b - c * gn, m2);
    g = std::move(gn);
    h = std::move(hn);
    m = m2;
  }
  return {g, h};
}

inline ZPoly symmetric(const ZPoly& a, const mpz_class& M) {
  mpz_class half = M / 2;
  std::vector<mpz_class> c;
  const ZPoly r = zmod(a, M);
  for (const auto& v : r.coeffs()) c.push_back(v > half ? mpz_class(v - M) : v);
  return ZPoly(std::move(c));
}

/// Exact division over Z by a monic divisor; nullopt if it does not divide.
inline std::optional<ZPoly> divide_monic(const ZPoly& a, const ZPoly& b) {
  if (a.degree() < b.degree()) return std::nullopt;
  std::vector<mpz_class> r = a.coeffs();
  const int db = b.degree();
  std::vector<mpz_class> q(static_cast<std::size_t>(a.degree() - db + 1), 0);
  for (int k = a.degree() - db; k >= 0; --k) {
    mpz_class c = r[static_cast<std::size_t>(k + db)];
    q[static_cast<std::size_t>(k)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= c * b.coeffs()[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < db; ++j)
    if (r[static_cast<std::size_t>(j)] != 0) return std::nullopt;
  return ZPoly(std::move(q));
}

/// Irreducible factors of a monic squarefree integer polynomial.
inline std::vector<ZPoly> factor_monic_squarefree(const ZPoly& f, std::uint64_t seed) {
  const int n = f.degree();
  if (n <= 1) return {f};
  std::mt19937_64 rng(seed);

  // Try several primes; keep the one with fewest modular factors and
  // intersect the achievable factor degrees.
  std::set<int> possible;
  for (int k = 0; k <= n; ++k) possible.insert(k);
  Field best{0};
  std::vector<Poly> best_factors;
  int good = 0;
  for (int attempt = 0; attempt < 40 && good < 5; ++attempt) {
    Field F{modp::random_prime(rng, 17)};
    Poly fp = modp::reduce(F, f);
    if (modp::deg(fp) != n || !modp::is_squarefree(F, fp)) continue;
    ++good;
    auto fac = factor_mod_p(F, fp, rng());
    std::set<int> sums{0};
    for (const auto& u : fac) {
      std::set<int> next = sums;
      for (int s : sums) next.insert(s + modp::deg(u));
      sums = std::move(next);
    }
    std::set<int> inter;
    std::set_intersection(possible.begin(), possible.end(), sums.begin(), sums.end(), std::inserter(inter, inter.begin()));
    possible = std::move(inter);
    if (best.p == 0 || fac.size() < best_factors.size()) {
      best = F;
      best_factors = std::move(fac);
    }
    if (best_factors.size() == 1) return {f};
  }
  if (best.p == 0) throw Error(ErrorCode::InvalidArgument, "no suitable prime for factorization");
  bool proper = false;
  for (int k : possible)
    if (k > 0 && k < n) proper = true;
  if (!proper) return {f};

  // Coefficient bound for any factor: 2^n ||f||_2; lift past twice that.
  mpz_class norm2 = 0;
  for (const auto& c : f.coeffs()) norm2 += c * c;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
  mpz_class bound = (root + 1) << static_cast<unsigned>(n + 1);
  mpz_class M = modp::to_mpz(best.p);
  while (M <= bound) M *= M;

  // Successive two-factor lifting.
  std::vector<ZPoly> lifted;
  ZPoly cur = zmod(f, M);
  for (std::size_t i = 0; i + 1 < best_factors.size(); ++i) {
    Poly rest{1};
    for (std::size_t j = i + 1; j < best_factors.size(); ++j) rest = modp::mul(best, rest, best_factors[j]);
    auto [g, h] = hensel_lift(cur, best_factors[i], rest, best, M);
    lifted.push_back(g);
    cur = h;
  }
  lifted.push_back(cur);

  // Recombination.
  std::vector<ZPoly> out;
  ZPoly remaining = f;
  std::vector<ZPoly> pool = lifted;
  for (std::size_t size = 1; 2 * size <= pool.size();) {
    bool found = false;
    std::vector<std::size_t> idx(size);
    for (std::size_t k = 0; k < size; ++k) idx[k] = k;
    while (true) {
      int degsum = 0;
      for (auto k : idx) degsum += pool[k].degree();
      if (possible.count(degsum) && possible.count(remaining.degree() - degsum)) {
        // Cheap constant-term filter before forming the full product.
        mpz_class c0 = 1;
        for (auto k : idx) c0 = (c0 * pool[k][0]) % M;
        mpz_class half = M / 2;
        if (c0 < 0) c0 += M;
        if (c0 > half) c0 -= M;
        bool plausible = (remaining[0] == 0) ? true : (c0 != 0 && remaining[0] % c0 == 0);
        if (plausible) {
          ZPoly prod = ZPoly::constant(mpz_class(1));
          for (auto k : idx) prod = zmul(prod, pool[k], M);
          ZPoly cand = symmetric(prod, M);
          if (auto q = divide_monic(remaining, cand)) {
            out.push_back(cand);
            remaining = *q;
            std::vector<ZPoly> next;
            for (std::size_t k = 0; k < pool.size(); ++k)
              if (std::find(idx.begin(), idx.end(), k) == idx.end()) next.push_back(pool[k]);
            pool = std::move(next);
            found = true;
            break;
          }
        }
      }
      // next combination
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == pool.size() - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t k = pos; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
    if (!found) ++size;
  }
  if (remaining.degree() > 0) out.push_back(remaining);
  return out;
}

}  // namespace detail

struct IntegerFactor {
  ZPoly factor;  // primitive, positive leading coefficient, irreducible over Q
  int multiplicity = 1;
};

/// Complete factorization over Z of a nonzero integer polynomial, up to the
/// content; factors are primitive with positive leading coefficient.
inline std::vector<IntegerFactor> factor_integer(const ZPoly& f, std::uint64_t seed = 0x2545f4914f6cdd1dULL) {
  if (f.is_zero()) throw Error(ErrorCode::InvalidArgument, "cannot factor the zero polynomial");
  std::vector<IntegerFactor> out;
  if (f.degree() < 1) return out;
  auto parts = squarefree_decomposition(to_rational(primitive_part(f)));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].degree() < 1) continue;
    ZPoly g = clear_denominators(parts[k]);
    // Monic transform: h(x) = lc^{n-1} g(x / lc).
    const mpz_class lc = g.lead();
    const int n = g.degree();
    std::vector<mpz_class> hc(static_cast<std::size_t>(n + 1));
    for (int i = 0; i < n; ++i) {
      mpz_class e;
      mpz_pow_ui(e.get_mpz_t(), lc.get_mpz_t(), static_cast<unsigned long>(n - 1 - i));
      hc[static_cast<std::size_t>(i)] = g[i] * e;
    }
    hc[static_cast<std::size_t>(n)] = 1;
    ZPoly h(std::move(hc));
    for (const auto& u : detail::factor_monic_squarefree(h, seed + k)) {
      // Undo: factor u(x) of h gives primitive part of u(lc x).
      std::vector<mpz_class> vc;
      mpz_class p = 1;
      for (int i = 0; i <= u.degree(); ++i) {
        vc.push_back(u[i] * p);
        p *= lc;
      }
      out.push_back({primitive_part(ZPoly(std::move(vc))), static_cast<int>(k + 1)});
    }
  }
  std::sort(out.begin(), out.end(), [](const IntegerFactor& a, const IntegerFactor& b) {
    if (a.factor.degree() != b.factor.degree()) return a.factor.degree() < b.factor.degree();
    return a.factor.coeffs() < b.factor.coeffs();
  });
  return out;
}

}  // namespace ratdyn
