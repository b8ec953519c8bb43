#pragma once

// Arithmetic in Z/p for word-size primes p < 2^62, dense polynomials over
// Z/p, Chinese remaindering and rational reconstruction.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ratdyn/polynomial.hpp"

namespace ratdyn::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct Field {
  u64 p;

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p ? s - p : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p - a; }
  u64 mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % p); }
  u64 pow(u64 a, u64 e) const {
    u64 r = 1 % p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 a) const {
    if (a == 0) throw Error(ErrorCode::InvalidArgument, "inverse of zero mod p");
    return pow(a, p - 2);
  }
  u64 from_long(long v) const {
    long m = v % static_cast<long>(p);
    return static_cast<u64>(m < 0 ? m + static_cast<long>(p) : m);
  }
  u64 from_mpz(const mpz_class& v) const {
    static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long required");
    return mpz_fdiv_ui(v.get_mpz_t(), p);
  }
  /// Reduction of a rational; nullopt when p divides the denominator.
  std::optional<u64> from_mpq(const mpq_class& v) const {
    u64 den = from_mpz(v.get_den());
    if (den == 0) return std::nullopt;
    return mul(from_mpz(v.get_num()), inv(den));
  }
};

inline mpz_class to_mpz(u64 v) { return mpz_class(static_cast<unsigned long>(v)); }

/// Random prime in [2^(bits-1), 2^bits).
inline u64 random_prime(std::mt19937_64& rng, int bits = 61) {
  u64 lo = u64(1) << (bits - 1);
  u64 start = lo | (rng() & (lo - 1)) | 1;
  mpz_class z = to_mpz(start), out;
  mpz_nextprime(out.get_mpz_t(), z.get_mpz_t());
  return out.get_ui();
}

// ---------------------------------------------------------------------------
// Polynomials over Z/p: coefficient vectors, lowest degree first, trimmed.

using Poly = std::vector<u64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}
inline Poly sub(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  trim(r);
  return r;
}
inline Poly scale(const Field& F, const Poly& a, u64 s) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], s);
  trim(r);
  return r;
}

/// Schoolbook product with lazy 128-bit accumulation.
inline Poly mul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t n = a.size() + b.size() - 1;
  Poly r(n, 0);
  // Each product is < 2^124; accumulate up to 8 before reducing.
  std::vector<u128> acc(n, 0);
  std::vector<unsigned char> cnt(n, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t k = i + j;
      acc[k] += static_cast<u128>(a[i]) * b[j];
      if (++cnt[k] == 8) {
        acc[k] %= F.p;
        cnt[k] = 1;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) r[k] = static_cast<u64>(acc[k] % F.p);
  trim(r);
  return r;
}

inline std::pair<Poly, Poly> divmod(const Field& F, const Poly& a, const Poly& b) {
  if (b.empty()) throw Error(ErrorCode::InvalidArgument, "division by zero polynomial mod p");
  if (a.size() < b.size()) return {{}, a};
  Poly r = a;
  const int db = deg(b);
  Poly q(static_cast<std::size_t>(deg(a) - db + 1), 0);
  const u64 il = F.inv(b.back());
  for (int k = deg(a) - db; k >= 0; --k) {
    u64 c = F.mul(r[static_cast<std::size_t>(k + db)], il);
    q[static_cast<std::size_t>(k)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) {
      auto& x = r[static_cast<std::size_t>(k + j)];
      x = F.sub(x, F.mul(c, b[static_cast<std::size_t>(j)]));
    }
  }
  r.resize(static_cast<std::size_t>(db));
  trim(r);
  trim(q);
  return {q, r};
}

inline Poly rem(const Field& F, const Poly& a, const Poly& b) { return divmod(F, a, b).second; }

inline Poly monic(const Field& F, const Poly& a) {
  if (a.empty()) return a;
  return scale(F, a, F.inv(a.back()));
}

inline Poly gcd(const Field& F, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = rem(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

/// Returns (g, s, t) with s a + t b = g monic.
inline std::tuple<Poly, Poly, Poly> xgcd(const Field& F, Poly a, Poly b) {
  Poly s0{1}, s1{}, t0{}, t1{1};
  while (!b.empty()) {
    auto [q, r] = divmod(F, a, b);
    a = std::move(b);
    b = std::move(r);
    Poly s2 = sub(F, s0, mul(F, q, s1));
    Poly t2 = sub(F, t0, mul(F, q, t1));
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (a.empty()) return {a, s0, t0};
  u64 il = F.inv(a.back());
  return {scale(F, a, il), scale(F, s0, il), scale(F, t0, il)};
}

inline Poly derivative(const Field& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = F.mul(a[i], static_cast<u64>(i) % F.p);
  trim(r);
  return r;
}

inline u64 eval(const Field& F, const Poly& a, u64 x) {
  u64 acc = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = F.add(F.mul(acc, x), *it);
  return acc;
}

inline Poly mulmod(const Field& F, const Poly& a, const Poly& b, const Poly& m) { return rem(F, mul(F, a, b), m); }

inline Poly powmod(const Field& F, Poly base, const mpz_class& e, const Poly& m) {
  Poly r = rem(F, Poly{1}, m);
  base = rem(F, base, m);
  const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    r = mulmod(F, r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(F, r, base, m);
  }
  return r;
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
inline std::optional<Poly> invmod(const Field& F, const Poly& a, const Poly& m) {
  auto [g, s, t] = xgcd(F, rem(F, a, m), m);
  if (g.size() != 1) return std::nullopt;
  return rem(F, s, m);
}

inline bool is_squarefree(const Field& F, const Poly& a) { return deg(gcd(F, a, derivative(F, a))) == 0; }

/// Reduction of a rational polynomial; nullopt when a denominator vanishes mod p.
inline std::optional<Poly> reduce(const Field& F, const Polynomial<mpq_class>& a) {
  Poly r(static_cast<std::size_t>(a.degree() + 1), 0);
  for (int i = 0; i <= a.degree(); ++i) {
    auto v = F.from_mpq(a[i]);
    if (!v) return std::nullopt;
    r[static_cast<std::size_t>(i)] = *v;
  }
  trim(r);
  return r;
}

inline Poly reduce(const Field& F, const Polynomial<mpz_class>& a) {
  Poly r(static_cast<std::size_t>(a.degree() + 1), 0);
  for (int i = 0; i <= a.degree(); ++i) r[static_cast<std::size_t>(i)] = F.from_mpz(a[i]);
  trim(r);
  return r;
}

/// Homogeneous substitution sum_i c_i P^i Q^(d-i).
inline Poly substitute_form(const Field& F, const Poly& c, int d, const Poly& P, const Poly& Q) {
  std::vector<Poly> qpow(static_cast<std::size_t>(d + 1));
  qpow[0] = Poly{1};
  for (int k = 1; k <= d; ++k) qpow[static_cast<std::size_t>(k)] = mul(F, qpow[static_cast<std::size_t>(k - 1)], Q);
  Poly acc, ppow{1};
  for (int i = 0; i <= d; ++i) {
    u64 ci = i < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(i)] : 0;
    if (ci != 0) acc = add(F, acc, scale(F, mul(F, ppow, qpow[static_cast<std::size_t>(d - i)]), ci));
    if (i < d) ppow = mul(F, ppow, P);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Characteristic polynomials in Z/p[z]/(m).

/// Power sums of the roots of monic m: s_0 .. s_{count-1} (Newton's identities).
inline std::vector<u64> root_power_sums(const Field& F, const Poly& m, int count) {
  const int n = deg(m);
  // e-form: m = z^n + c_{n-1} z^{n-1} + ... ; s_k + c_{n-1} s_{k-1} + ... + k c_{n-k} = 0
  std::vector<u64> s(static_cast<std::size_t>(count), 0);
  if (count > 0) s[0] = static_cast<u64>(n) % F.p;
  for (int k = 1; k < count; ++k) {
    u64 acc = 0;
    for (int j = 1; j <= std::min(k - 1, n); ++j)
      acc = F.add(acc, F.mul(m[static_cast<std::size_t>(n - j)], s[static_cast<std::size_t>(k - j)]));
    if (k <= n) acc = F.add(acc, F.mul(static_cast<u64>(k) % F.p, m[static_cast<std::size_t>(n - k)]));
    s[static_cast<std::size_t>(k)] = F.neg(acc);
  }
  return s;
}

/// Trace of multiplication by a on Z/p[z]/(m), given the root power sums of m.
inline u64 trace(const Field& F, const Poly& a, const std::vector<u64>& sums) {
  u64 acc = 0;
  for (std::size_t j = 0; j < a.size(); ++j) acc = F.add(acc, F.mul(a[j], sums[j]));
  return acc;
}

/// Monic polynomial of degree n whose roots have the given power sums
/// p_1..p_n (index 0 unused). Requires n < p.
inline Poly from_power_sums(const Field& F, const std::vector<u64>& ps, int n) {
  // Newton: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
  std::vector<u64> e(static_cast<std::size_t>(n + 1), 0);
  e[0] = 1;
  for (int k = 1; k <= n; ++k) {
    u64 acc = 0;
    for (int i = 1; i <= k; ++i) {
      u64 term = F.mul(e[static_cast<std::size_t>(k - i)], ps[static_cast<std::size_t>(i)]);
      acc = (i % 2 == 1) ? F.add(acc, term) : F.sub(acc, term);
    }
    e[static_cast<std::size_t>(k)] = F.mul(acc, F.inv(static_cast<u64>(k) % F.p));
  }
  Poly r(static_cast<std::size_t>(n + 1), 0);
  for (int k = 0; k <= n; ++k) {
    u64 v = e[static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(n - k)] = (k % 2 == 0) ? v : F.neg(v);
  }
  trim(r);
  return r;
}

// ---------------------------------------------------------------------------
// Chinese remaindering and rational reconstruction.

/// x mod m1 and y mod m2 (coprime) -> value mod m1 m2 in [0, m1 m2).
inline mpz_class crt(const mpz_class& x, const mpz_class& m1, u64 y, u64 m2) {
  mpz_class M2 = to_mpz(m2);
  mpz_class inv;
  mpz_class m1r = m1 % M2;
  mpz_invert(inv.get_mpz_t(), m1r.get_mpz_t(), M2.get_mpz_t());
  mpz_class diff = (to_mpz(y) - x % M2) % M2;
  if (diff < 0) diff += M2;
  mpz_class k = (diff * inv) % M2;
  return x + m1 * k;
}

/// Wang's rational reconstruction: a/b = x mod m with |a|, b <= sqrt(m/2).
inline std::optional<mpq_class> rational_reconstruct(const mpz_class& x, const mpz_class& m) {
  mpz_class bound;
  mpz_class half = m / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
  mpz_class r0 = m, r1 = x % m;
  if (r1 < 0) r1 += m;
  mpz_class t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1;
    mpz_class t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return std::nullopt;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
  if (g != 1) return std::nullopt;
  mpq_class out(r1, t1);
  out.canonicalize();
  return out;
}

}  // namespace ratdyn::modp
