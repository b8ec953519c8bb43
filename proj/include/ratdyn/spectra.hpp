#pragma once

// Exact multiplier spectra over Q and the fields where multipliers live.
//
// For each period n the characteristic polynomial of z -> (f^n)'(z) on the
// algebra Q[z]/(Phi_n) gives the multipliers of the finite exact-period-n
// points, each cycle counted once per point. It is computed modulo word-size
// primes from the iterated forms of f:
//   * when every numeric cycle multiplier rounds to an integer, the candidate
//     factorization is certified prime by prime through gcd degrees;
//   * otherwise the per-cycle polynomial is assembled from traces of powers
//     and recovered over Q by Chinese remaindering and rational
//     reconstruction, then checked against a fresh prime and the numeric
//     power sums.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ratdyn/intfactor.hpp"
#include "ratdyn/modular.hpp"
#include "ratdyn/periodic.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn {

struct SpectrumConfig {
  int exact_cap = 256;  // bound on d^n + 1
  int certificate_primes = 4;
  std::uint64_t seed = 0x1234abcd5678ef01ULL;
  PeriodicConfig periodic{};
};

struct SpectrumFactor {
  QPoly q;               // monic, irreducible over Q, in the variable lambda
  int multiplicity = 1;  // number of cycles with a multiplier root of q
};

struct PeriodSpectrum {
  int period = 0;
  int cycle_count = 0;  // with multiplicity, including an Infinity cycle
  std::vector<SpectrumFactor> factors;
  std::string certificate;  // "integer-candidates" or "modular-reconstruction"
  int primes_used = 0;

  /// Per-cycle polynomial prod q^m.
  QPoly cycle_polynomial() const {
    QPoly r = QPoly::constant(mpq_class(1));
    for (const auto& f : factors) r *= pow(f.q, f.multiplicity);
    return r;
  }
  /// Multiplier polynomial with each cycle counted once per point.
  QPoly polynomial() const { return pow(cycle_polynomial(), period); }
};

struct AlgebraicSpectrum {
  std::vector<PeriodSpectrum> periods;
};

inline QPoly to_rational_poly(const Polynomial<GaussRational>& p) {
  std::vector<mpq_class> c;
  for (const auto& v : p.coeffs()) {
    if (!v.is_real()) throw Error(ErrorCode::NotRationalCoefficients, "coefficient " + v.str() + " is not rational");
    c.push_back(v.re());
  }
  return QPoly(std::move(c));
}

/// Monic irreducible factors over Q with multiplicities.
inline std::vector<SpectrumFactor> factor_spectrum(const QPoly& p, std::uint64_t seed = 0x51ed270b27d0c9e5ULL) {
  if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "cannot factor the zero polynomial");
  std::vector<SpectrumFactor> out;
  for (const auto& f : factor_integer(clear_denominators(p), seed))
    out.push_back({to_rational(f.factor).monic(), f.multiplicity});
  return out;
}

namespace detail {

using modp::Field;
using modp::Poly;

/// f reduced mod p with the iterated forms needed for period n.
struct ModularIterates {
  Field F;
  std::map<int, Poly> fix;  // Fix_k = z G_k - F_k for k | n
  Poly Fn, Gn;
};

inline std::optional<ModularIterates> modular_iterates(const QPoly& num, const QPoly& den, int d, int n, modp::u64 p) {
  ModularIterates it{Field{p}, {}, {}, {}};
  const Field& F = it.F;
  auto a = modp::reduce(F, num), b = modp::reduce(F, den);
  if (!a || !b) return std::nullopt;
  if (std::max(modp::deg(*a), modp::deg(*b)) != d) return std::nullopt;
  if (modp::deg(modp::gcd(F, *a, *b)) > 0) return std::nullopt;
  Poly Fk = *a, Gk = *b;
  const Poly x{0, 1};
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      Poly nf = modp::substitute_form(F, *a, d, Fk, Gk);
      Poly ng = modp::substitute_form(F, *b, d, Fk, Gk);
      Fk = std::move(nf);
      Gk = std::move(ng);
    }
    if (n % k == 0) it.fix[k] = modp::sub(F, modp::mul(F, x, Gk), Fk);
  }
  it.Fn = std::move(Fk);
  it.Gn = std::move(Gk);
  return it;
}

inline std::optional<Poly> modular_dynatomic(const ModularIterates& it, int n) {
  const Field& F = it.F;
  Poly num{1}, den{1};
  for (int k : divisors(n)) {
    int mu = moebius_mu(n / k);
    if (mu > 0) num = modp::mul(F, num, it.fix.at(k));
    if (mu < 0) den = modp::mul(F, den, it.fix.at(k));
  }
  auto [q, r] = modp::divmod(F, num, den);
  if (!r.empty()) return std::nullopt;
  return modp::monic(F, q);
}

/// Exact data of the Infinity cycle when Infinity has exact period n.
struct InfinityCycle {
  bool present = false;
  mpq_class multiplier = 0;
};

inline InfinityCycle infinity_cycle(const ExactMap& f, int n) {
  using P = ProjPoint<GaussRational>;
  P cur = P::infinity();
  std::vector<P> orbit{cur};
  for (int k = 1; k <= n; ++k) {
    cur = evaluate(f, cur);
    if (cur.infinite) {
      if (k < n) return {};
      break;
    }
    if (k == n) return {};
    orbit.push_back(cur);
  }
  GaussRational lam(1);
  for (std::size_t j = 0; j < orbit.size(); ++j) {
    const P& next = orbit[(j + 1) % orbit.size()];
    lam = lam * jet(f, orbit[j], chart_of(orbit[j]), chart_of(next)).derivative;
  }
  if (!lam.is_real()) throw Error(ErrorCode::NotRationalCoefficients, "Infinity multiplier is not rational");
  return {true, lam.re()};
}

inline bool is_integer_like(Complex lam, long& out) {
  double r = std::round(lam.real());
  if (std::abs(lam - Complex(r, 0.0)) > 1e-6 * std::max(1.0, std::abs(lam))) return false;
  if (std::abs(r) > 1e15) return false;
  out = static_cast<long>(r);
  return true;
}

}  // namespace detail

/// Computes spectra and Galois-stable periodic sets of one exact map,
/// caching periodic points across periods.
class SpectrumEngine {
 public:
  explicit SpectrumEngine(ExactMap f, SpectrumConfig cfg = {})
      : f_(std::move(f)), cfg_(cfg), num_(to_rational_poly(f_.num())), den_(to_rational_poly(f_.den())),
        solver_(to_complex(f_), cfg.periodic), rng_(cfg.seed) {}

  const ExactMap& map() const { return f_; }
  PeriodicSolver& solver() { return solver_; }

  /// Numeric multipliers of the exact-period-n cycles.
  std::vector<CycleRecord> numeric_cycles(int n) { return cycles_of_period(solver_, n); }

  PeriodSpectrum spectrum(int n) {
    check_cap(n);
    const int d = f_.degree();
    const std::int64_t N = exact_period_count(d, n);
    if (N % n != 0) throw Error(ErrorCode::InexactDivision, "exact-period point count not divisible by the period");
    const auto inf = detail::infinity_cycle(f_, n);

    std::optional<std::vector<CycleRecord>> cycles;
    try {
      cycles = numeric_cycles(n);
    } catch (const Error&) {
      cycles.reset();
    }
    if (cycles) {
      std::map<long, int> candidates;
      bool integral = true;
      for (const auto& c : *cycles) {
        long r;
        if (!detail::is_integer_like(c.multiplier, r)) {
          integral = false;
          break;
        }
        ++candidates[r];
      }
      if (integral) {
        if (auto s = certify_integer_candidates(n, candidates, inf)) return *s;
      }
    }
    return reconstruct(n, N, inf, cycles ? &*cycles : nullptr);
  }

  AlgebraicSpectrum spectra(int max_period) {
    AlgebraicSpectrum out;
    for (int n = 1; n <= max_period; ++n) out.periods.push_back(spectrum(n));
    return out;
  }

 private:
  void check_cap(int n) const {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
    const std::int64_t total = ipow(f_.degree(), n) + 1;
    if (total > cfg_.exact_cap)
      throw Error(ErrorCode::DegreeCapExceeded,
                  "d^n + 1 = " + std::to_string(total) + " exceeds exact cap " + std::to_string(cfg_.exact_cap));
  }

  /// Reference degrees of Fix_k: a prime is good when none drops.
  bool degrees_ok(const detail::ModularIterates& it, bool& reset) {
    reset = false;
    bool ok = true;
    for (const auto& [k, p] : it.fix) {
      int dg = modp::deg(p);
      auto found = ref_degree_.find(k);
      if (found == ref_degree_.end() || dg > found->second) {
        if (found != ref_degree_.end()) reset = true;
        ref_degree_[k] = dg;
      } else if (dg < found->second) {
        ok = false;
      }
    }
    return ok;
  }

  std::optional<PeriodSpectrum> certify_integer_candidates(int n, const std::map<long, int>& candidates,
                                                           const detail::InfinityCycle& inf) {
    // Finite roots of Phi_n carrying each candidate multiplier.
    std::map<long, int> finite_count;
    for (const auto& [r, m] : candidates) finite_count[r] = m * n;
    if (inf.present) {
      if (inf.multiplier.get_den() != 1) return std::nullopt;
      long r = inf.multiplier.get_num().get_si();
      auto it = finite_count.find(r);
      if (it == finite_count.end() || it->second == 0) return std::nullopt;
      it->second -= 1;
    }
    int certified = 0, attempts = 0;
    while (certified < cfg_.certificate_primes && attempts < 8 * cfg_.certificate_primes) {
      ++attempts;
      const auto p = modp::random_prime(rng_);
      auto it = detail::modular_iterates(num_, den_, f_.degree(), n, p);
      if (!it) continue;
      bool reset;
      if (!degrees_ok(*it, reset)) continue;
      if (reset) certified = 0;
      auto phi = detail::modular_dynatomic(*it, n);
      if (!phi) continue;
      const auto& F = it->F;
      if (!modp::is_squarefree(F, *phi)) continue;
      if (modp::deg(modp::gcd(F, *phi, it->Gn)) > 0) continue;
      Poly dF = modp::derivative(F, it->Fn), dG = modp::derivative(F, it->Gn);
      Poly v = modp::rem(F, modp::sub(F, modp::mul(F, dF, it->Gn), modp::mul(F, it->Fn, dG)), *phi);
      Poly w = modp::rem(F, modp::mul(F, it->Gn, it->Gn), *phi);
      int total = 0;
      for (const auto& [r, cnt] : finite_count) {
        Poly t = modp::sub(F, v, modp::scale(F, w, F.from_long(r)));
        int g = modp::deg(modp::gcd(F, *phi, t));
        if (t.empty()) g = modp::deg(*phi);
        if (g != cnt) return std::nullopt;
        total += g;
      }
      if (total != modp::deg(*phi)) return std::nullopt;
      ++certified;
    }
    if (certified < cfg_.certificate_primes) return std::nullopt;
    PeriodSpectrum s;
    s.period = n;
    s.certificate = "integer-candidates";
    s.primes_used = certified;
    for (const auto& [r, m] : candidates) {
      s.factors.push_back({QPoly({mpq_class(-r), mpq_class(1)}), m});
      s.cycle_count += m;
    }
    return s;
  }

  using Poly = modp::Poly;

  PeriodSpectrum reconstruct(int n, std::int64_t N, const detail::InfinityCycle& inf,
                             const std::vector<CycleRecord>* cycles) {
    const int Nq = static_cast<int>(N / n);
    std::vector<mpz_class> acc;
    mpz_class M = 1;
    std::optional<std::vector<mpq_class>> previous;
    int used = 0;
    std::vector<mpq_class> result;
    bool done = false;
    for (int attempt = 0; attempt < 2000 && !done; ++attempt) {
      const auto p = modp::random_prime(rng_);
      auto q = cycle_poly_mod(n, Nq, inf, p);
      if (!q) continue;
      if (q->reset) {
        acc.clear();
        M = 1;
        previous.reset();
        used = 0;
      }
      if (acc.empty()) {
        acc.assign(static_cast<std::size_t>(Nq), 0);
        for (int i = 0; i < Nq; ++i) acc[static_cast<std::size_t>(i)] = modp::to_mpz(q->coeff(i));
        M = modp::to_mpz(p);
      } else {
        for (int i = 0; i < Nq; ++i)
          acc[static_cast<std::size_t>(i)] = modp::crt(acc[static_cast<std::size_t>(i)], M, q->coeff(i), p);
        M *= modp::to_mpz(p);
      }
      ++used;
      std::vector<mpq_class> rec;
      bool all = true;
      for (int i = 0; i < Nq && all; ++i) {
        auto r = modp::rational_reconstruct(acc[static_cast<std::size_t>(i)], M);
        if (!r) all = false;
        else rec.push_back(*r);
      }
      if (!all) {
        previous.reset();
        continue;
      }
      if (previous && *previous == rec) {
        result = rec;
        done = true;
      }
      previous = rec;
    }
    if (!done) throw Error(ErrorCode::RootFindingFailed, "modular reconstruction of the multiplier polynomial did not stabilize");

    std::vector<mpq_class> coeffs = result;
    coeffs.push_back(mpq_class(1));
    QPoly Q(coeffs);

    // Fresh-prime check.
    for (int attempt = 0; attempt < 50; ++attempt) {
      const auto p = modp::random_prime(rng_);
      auto q = cycle_poly_mod(n, Nq, inf, p);
      if (!q || q->reset) continue;
      modp::Field F{p};
      auto red = modp::reduce(F, Q);
      if (!red) continue;
      if (*red != q->poly)
        throw Error(ErrorCode::RootFindingFailed, "reconstructed multiplier polynomial fails the fresh-prime check");
      break;
    }
    if (cycles) check_numeric_power_sums(Q, *cycles);

    PeriodSpectrum s;
    s.period = n;
    s.certificate = "modular-reconstruction";
    s.primes_used = used;
    s.factors = factor_spectrum(Q, cfg_.seed + static_cast<std::uint64_t>(n));
    for (const auto& f : s.factors) s.cycle_count += f.multiplicity * f.q.degree();
    return s;
  }

  struct ModCyclePoly {
    Poly poly;
    bool reset = false;
    modp::u64 coeff(int i) const { return i < static_cast<int>(poly.size()) ? poly[static_cast<std::size_t>(i)] : 0; }
  };

  /// Per-cycle multiplier polynomial mod p from traces of powers of (f^n)'.
  std::optional<ModCyclePoly> cycle_poly_mod(int n, int Nq, const detail::InfinityCycle& inf, modp::u64 p) {
    auto it = detail::modular_iterates(num_, den_, f_.degree(), n, p);
    if (!it) return std::nullopt;
    bool reset;
    if (!degrees_ok(*it, reset)) return std::nullopt;
    auto phi = detail::modular_dynatomic(*it, n);
    if (!phi) return std::nullopt;
    const auto& F = it->F;
    std::optional<modp::u64> lam_inf;
    int inf_mult = 0;
    if (inf.present) {
      lam_inf = F.from_mpq(inf.multiplier);
      if (!lam_inf) return std::nullopt;
    }
    // Multiplicity of Infinity carried by Phi_n.
    for (int k : divisors(n)) inf_mult += moebius_mu(n / k) * static_cast<int>(ipow(f_.degree(), k) + 1 - ref_degree_.at(k));
    if (!inf.present && inf_mult != 0) return std::nullopt;
    if (modp::deg(*phi) + inf_mult != Nq * n) return std::nullopt;

    Poly dF = modp::derivative(F, it->Fn), dG = modp::derivative(F, it->Gn);
    Poly v = modp::rem(F, modp::sub(F, modp::mul(F, dF, it->Gn), modp::mul(F, it->Fn, dG)), *phi);
    Poly w = modp::rem(F, modp::mul(F, it->Gn, it->Gn), *phi);
    auto winv = modp::invmod(F, w, *phi);
    if (!winv) return std::nullopt;
    Poly u = modp::mulmod(F, v, *winv, *phi);
    auto sums = modp::root_power_sums(F, *phi, modp::deg(*phi) + 1);
    std::vector<modp::u64> ps(static_cast<std::size_t>(Nq + 1), 0);
    const modp::u64 inv_n = F.inv(static_cast<modp::u64>(n));
    Poly uk{1};
    modp::u64 lk = 1;
    for (int k = 1; k <= Nq; ++k) {
      uk = modp::mulmod(F, uk, u, *phi);
      modp::u64 s = modp::deg(*phi) >= 0 ? modp::trace(F, uk, sums) : 0;
      if (lam_inf) {
        lk = F.mul(lk, *lam_inf);
        s = F.add(s, F.mul(F.from_long(inf_mult), lk));
      }
      ps[static_cast<std::size_t>(k)] = F.mul(s, inv_n);
    }
    return ModCyclePoly{modp::from_power_sums(F, ps, Nq), reset};
  }

  void check_numeric_power_sums(const QPoly& Q, const std::vector<CycleRecord>& cycles) const {
    const int Nq = Q.degree();
    // Exact power sums of Q's roots via Newton identities.
    std::vector<mpq_class> e(static_cast<std::size_t>(Nq + 1));
    for (int k = 0; k <= Nq; ++k) e[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1 : -1) * Q[Nq - k];
    const int K = std::min(Nq, 4);
    std::vector<mpq_class> s(static_cast<std::size_t>(K + 1), 0);
    for (int k = 1; k <= K; ++k) {
      mpq_class acc = 0;
      for (int i = 1; i < k; ++i) acc += ((i % 2 == 1) ? 1 : -1) * e[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(k - i)];
      // p_k = (-1)^{k-1} k e_k + sum_{i=1}^{k-1} (-1)^{i-1} e_i p_{k-i}
      acc += ((k % 2 == 1) ? 1 : -1) * k * e[static_cast<std::size_t>(k)];
      s[static_cast<std::size_t>(k)] = acc;
    }
    for (int k = 1; k <= K; ++k) {
      Complex num = 0.0;
      double scale = 0.0;
      for (const auto& c : cycles) {
        num += std::pow(c.multiplier, k);
        scale += std::pow(std::abs(c.multiplier), k);
      }
      double exact = s[static_cast<std::size_t>(k)].get_d();
      if (std::abs(num - exact) > 1e-6 * std::max(1.0, scale))
        throw Error(ErrorCode::RootFindingFailed, "exact and numeric multiplier power sums disagree at k=" + std::to_string(k));
    }
  }

  ExactMap f_;
  SpectrumConfig cfg_;
  QPoly num_, den_;
  PeriodicSolver solver_;
  std::mt19937_64 rng_;
  std::map<int, int> ref_degree_;
};

/// P_n: multipliers of the exact-period-n points, monic, each cycle counted
/// once per point (Infinity's cycle included).
inline QPoly multiplier_polynomial(const ExactMap& f, int n, SpectrumConfig cfg = {}) {
  SpectrumEngine engine(f, cfg);
  return engine.spectrum(n).polynomial();
}

inline AlgebraicSpectrum algebraic_spectrum(const ExactMap& f, int max_period, SpectrumConfig cfg = {}) {
  SpectrumEngine engine(f, cfg);
  return engine.spectra(max_period);
}

// ---------------------------------------------------------------------------
// Number fields and membership

struct NumberFieldSpec {
  ZPoly defining;  // monic irreducible over Q
  int degree = 1;
  std::optional<mpz_class> quadratic_d;  // squarefree D with K = Q(sqrt D) when degree 2
  bool imaginary_quadratic = false;

  static NumberFieldSpec rationals() {
    NumberFieldSpec k;
    k.defining = ZPoly({mpz_class(0), mpz_class(1)});
    return k;
  }

  /// Q(sqrt D) for a nonzero non-square integer D (reduced to its squarefree part).
  static NumberFieldSpec quadratic(const mpz_class& D) {
    if (D == 0) throw Error(ErrorCode::InvalidArgument, "quadratic field needs D != 0");
    mpz_class sf = squarefree_part(D);
    if (sf == 1) throw Error(ErrorCode::InvalidArgument, "D is a perfect square; the field is Q");
    NumberFieldSpec k;
    k.defining = ZPoly({mpz_class(-sf), mpz_class(0), mpz_class(1)});
    k.degree = 2;
    k.quadratic_d = sf;
    k.imaginary_quadratic = sf < 0;
    return k;
  }

  /// Field generated by a root of a monic irreducible integer polynomial.
  static NumberFieldSpec from_polynomial(const ZPoly& q) {
    if (q.degree() < 1 || q.lead() != 1) throw Error(ErrorCode::InvalidArgument, "defining polynomial must be monic of degree >= 1");
    auto fac = factor_integer(q);
    if (fac.size() != 1 || fac[0].multiplicity != 1 || fac[0].factor.degree() != q.degree())
      throw Error(ErrorCode::InvalidArgument, "defining polynomial " + q.str("x") + " is reducible over Q");
    if (q.degree() == 1) return rationals();
    if (q.degree() == 2) {
      NumberFieldSpec k = quadratic(q[1] * q[1] - 4 * q[0]);
      k.defining = q;
      return k;
    }
    NumberFieldSpec k;
    k.defining = q;
    k.degree = q.degree();
    return k;
  }

  static mpz_class squarefree_part(const mpz_class& D) {
    mpz_class n = abs(D), out = 1;
    for (mpz_class p = 2; p * p <= n; ++p) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      if (e % 2) out *= p;
    }
    out *= n;
    return D < 0 ? mpz_class(-out) : out;
  }

  std::string name() const {
    if (degree == 1) return "Q";
    if (quadratic_d) return "Q(sqrt(" + quadratic_d->get_str() + "))";
    return "Q[x]/(" + defining.str("x") + ")";
  }
};

struct MembershipVerdict {
  bool all_in = true;
  int period = 0;  // first violating period
  QPoly factor;    // first violating factor
  bool heuristic = false;
};

namespace detail {

inline bool is_rational_square(const mpq_class& x) {
  if (x < 0) return false;
  return mpz_perfect_square_p(x.get_num().get_mpz_t()) && mpz_perfect_square_p(x.get_den().get_mpz_t());
}

/// Whether gamma = sum c_j theta^j (c rational) is a root of q modulo the
/// defining polynomial of K: exact check in Q[x]/(m).
inline bool root_in_field(const QPoly& q, const QPoly& gamma, const QPoly& m) {
  QPoly acc;
  for (int i = q.degree(); i >= 0; --i) {
    acc = divmod(acc * gamma, m).second;
    acc += QPoly::constant(q[i]);
  }
  return divmod(acc, m).second.is_zero();
}

/// LLL reduction (long double) of integer-relation basis vectors.
inline std::vector<std::vector<long double>> lll(std::vector<std::vector<long double>> b, long double delta = 0.75L) {
  const std::size_t n = b.size();
  auto dot = [](const std::vector<long double>& x, const std::vector<long double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<std::vector<long double>> bs(n);
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> B(n);
  auto gso = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      bs[i] = b[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(b[i], bs[j]) / B[j];
        for (std::size_t t = 0; t < bs[i].size(); ++t) bs[i][t] -= mu[i][j] * bs[j][t];
      }
      B[i] = dot(bs[i], bs[i]);
    }
  };
  gso();
  std::size_t k = 1;
  int guard = 0;
  while (k < n && guard++ < 100000) {
    for (std::size_t j = k; j-- > 0;) {
      long double r = std::round(mu[k][j]);
      if (r != 0) {
        for (std::size_t t = 0; t < b[k].size(); ++t) b[k][t] -= r * b[j][t];
        gso();
      }
    }
    if (B[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return b;
}

/// Heuristic embedding search for a root of q in K = Q(theta), verified exactly.
inline bool factor_has_root_in_field(const QPoly& q, const NumberFieldSpec& K) {
  const int k = K.degree;
  if (k % q.degree() != 0) return false;
  auto cq = q.map<Complex>([](const mpq_class& v) { return Complex(v.get_d(), 0.0); });
  auto cm = K.defining.map<Complex>([](const mpz_class& v) { return Complex(v.get_d(), 0.0); });
  auto qroots = polynomial_roots(cq);
  auto thetas = polynomial_roots(cm);
  const QPoly m = to_rational(K.defining);
  const auto theta = thetas.front();
  for (const auto& g : qroots) {
    // Integer relation among (1, theta, ..., theta^{k-1}, gamma), real and imaginary parts.
    const long double scale = 1e15L;
    std::vector<std::vector<long double>> basis;
    Complex tp = 1.0;
    for (int j = 0; j <= k; ++j) {
      Complex val = (j < k) ? tp : g;
      std::vector<long double> row(static_cast<std::size_t>(k + 1 + 2), 0);
      row[static_cast<std::size_t>(j)] = 1;
      row[static_cast<std::size_t>(k + 1)] = scale * static_cast<long double>(val.real());
      row[static_cast<std::size_t>(k + 2)] = scale * static_cast<long double>(val.imag());
      basis.push_back(row);
      tp *= theta;
    }
    auto red = lll(basis);
    for (const auto& v : red) {
      long double last = v[static_cast<std::size_t>(k)];
      if (last == 0) continue;
      std::vector<mpq_class> c;
      for (int j = 0; j < k; ++j)
        c.push_back(mpq_class(static_cast<long>(-std::llround(v[static_cast<std::size_t>(j)])), 1) /
                    mpq_class(static_cast<long>(std::llround(last)), 1));
      if (root_in_field(q, QPoly(c), m)) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Whether one irreducible factor has a root in K; sets heuristic for deg K > 2.
inline bool factor_in_field(const QPoly& q, const NumberFieldSpec& K, bool& heuristic) {
  heuristic = false;
  if (q.degree() == 1) return true;
  if (K.degree == 1) return false;
  if (K.degree == 2 && K.quadratic_d) {
    if (q.degree() > 2) return false;
    mpq_class disc = q[1] * q[1] - 4 * q[0] * q[2];
    return detail::is_rational_square(mpq_class(disc / mpq_class(*K.quadratic_d)));
  }
  heuristic = true;
  return detail::factor_has_root_in_field(q, K);
}

inline MembershipVerdict membership(const AlgebraicSpectrum& s, const NumberFieldSpec& K) {
  MembershipVerdict v;
  for (const auto& ps : s.periods)
    for (const auto& f : ps.factors) {
      bool h;
      bool in = factor_in_field(f.q, K, h);
      v.heuristic = v.heuristic || h;
      if (!in) {
        v.all_in = false;
        v.period = ps.period;
        v.factor = f.q;
        return v;
      }
    }
  return v;
}

struct IntegralityVerdict {
  bool all_algebraic_integers = true;
  bool all_rational_integers = true;
  int period = 0;  // first factor that is not an algebraic integer
  QPoly factor;
};

inline bool is_integral(const QPoly& q) {
  for (const auto& c : q.coeffs())
    if (c.get_den() != 1) return false;
  return true;
}

inline IntegralityVerdict integrality(const AlgebraicSpectrum& s) {
  IntegralityVerdict v;
  for (const auto& ps : s.periods)
    for (const auto& f : ps.factors) {
      if (!is_integral(f.q)) {
        if (v.all_algebraic_integers) {
          v.period = ps.period;
          v.factor = f.q;
        }
        v.all_algebraic_integers = false;
        v.all_rational_integers = false;
      } else if (f.q.degree() != 1) {
        v.all_rational_integers = false;
      }
    }
  return v;
}

// ---------------------------------------------------------------------------
// Galois-stable periodic sets

struct GaloisPeriodicSet {
  int period = 0;
  QPoly factor;  // irreducible dynatomic factor; zero polynomial for the bare Infinity set
  std::vector<SpherePoint> points;
  std::vector<CycleRecord> cycles;
  std::size_t size() const { return points.size(); }
};

namespace detail {

inline double relative_value(const QPoly& q, Complex z) {
  Complex acc = 0.0;
  double scale = 0.0;
  const double az = std::abs(z);
  for (int i = q.degree(); i >= 0; --i) {
    acc = acc * z + q[i].get_d();
    scale = scale * az + std::abs(q[i].get_d());
  }
  return std::abs(acc) / std::max(scale, 1e-300);
}

}  // namespace detail

/// Partition of the exact-period-n points into root sets of the irreducible
/// factors of the dynatomic polynomial; a set containing a point of Infinity's
/// cycle absorbs Infinity.
inline std::vector<GaloisPeriodicSet> galois_orbit_sets(SpectrumEngine& engine, int n, int cap = 256) {
  const ExactMap& f = engine.map();
  auto phi = dynatomic_numerator(f, n, cap);
  QPoly phq = to_rational_poly(phi.finite);
  auto factors = phq.degree() > 0 ? factor_spectrum(phq) : std::vector<SpectrumFactor>{};
  std::vector<GaloisPeriodicSet> sets;
  for (const auto& fa : factors) {
    if (fa.multiplicity != 1)
      throw Error(ErrorCode::InvalidArgument, "dynatomic polynomial has repeated factors (parabolic cycle)");
    GaloisPeriodicSet s;
    s.period = n;
    s.factor = fa.q;
    sets.push_back(std::move(s));
  }
  auto cycles = engine.numeric_cycles(n);
  std::vector<std::size_t> cycle_set(cycles.size());
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    // Tag the cycle by the factor closest to vanishing on its first finite point.
    const SpherePoint* probe = nullptr;
    for (const auto& p : cycles[c].points)
      if (!p.infinite && !probe) probe = &p;
    std::size_t best = sets.size();
    if (probe) {
      double bv = 1e300;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        if (sets[k].factor.is_zero()) continue;
        double v = detail::relative_value(sets[k].factor, probe->z);
        if (v < bv) {
          bv = v;
          best = k;
        }
      }
    }
    if (best == sets.size()) {
      GaloisPeriodicSet s;
      s.period = n;
      sets.push_back(std::move(s));
    }
    cycle_set[c] = best;
  }
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    auto& s = sets[cycle_set[c]];
    s.points.insert(s.points.end(), cycles[c].points.begin(), cycles[c].points.end());
    s.cycles.push_back(cycles[c]);
  }
  for (const auto& s : sets) {
    std::size_t finite = 0;
    for (const auto& p : s.points) finite += p.infinite ? 0 : 1;
    if (s.factor.degree() > 0 && static_cast<int>(finite) != s.factor.degree())
      throw Error(ErrorCode::OrbitMismatch, "numeric points do not match the dynatomic factor " + s.factor.str());
  }
  return sets;
}

inline std::vector<GaloisPeriodicSet> galois_orbit_sets(const ExactMap& f, int n, SpectrumConfig cfg = {}) {
  SpectrumEngine engine(f, cfg);
  return galois_orbit_sets(engine, n, cfg.exact_cap);
}

}  // namespace ratdyn
