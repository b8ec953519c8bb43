#pragma once

// Dense univariate polynomials over a coefficient ring T. Coefficients are
// stored lowest degree first; the zero polynomial has no coefficients.

#include <gmpxx.h>

#include <algorithm>
#include <complex>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ratdyn/error.hpp"
#include "ratdyn/scalar.hpp"

namespace ratdyn {

inline bool coeff_is_zero(const mpz_class& x) { return sgn(x) == 0; }
inline bool coeff_is_zero(const mpq_class& x) { return sgn(x) == 0; }
inline bool coeff_is_zero(const GaussRational& x) { return x.is_zero(); }
inline bool coeff_is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
inline bool coeff_is_zero(double x) { return x == 0.0; }

inline std::string coeff_str(const mpz_class& x) { return x.get_str(); }
inline std::string coeff_str(const mpq_class& x) { return x.get_str(); }
inline std::string coeff_str(const GaussRational& x) { return x.str(); }
inline std::string coeff_str(const Complex& x) {
  std::ostringstream os;
  os.precision(17);
  if (x.imag() == 0.0) {
    os << x.real();
  } else {
    os << "(" << x.real() << (x.imag() < 0 ? "" : "+") << x.imag() << "i)";
  }
  return os.str();
}

template <typename T>
class Polynomial {
 public:
  using value_type = T;

  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(T v) { return Polynomial(std::vector<T>{std::move(v)}); }
  static Polynomial monomial(T v, int deg) {
    std::vector<T> c(static_cast<std::size_t>(deg + 1), T(0));
    c.back() = std::move(v);
    return Polynomial(std::move(c));
  }
  static Polynomial x() { return monomial(T(1), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }

  T operator[](int i) const {
    if (i < 0 || i > degree()) return T(0);
    return c_[static_cast<std::size_t>(i)];
  }
  const T& lead() const { return c_.back(); }

  void set(int i, T v) {
    if (i > degree()) c_.resize(static_cast<std::size_t>(i + 1), T(0));
    c_[static_cast<std::size_t>(i)] = std::move(v);
    trim();
  }

  template <typename U>
  U eval(const U& z) const {
    U acc = U(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + U(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = T(c_[i] * T(static_cast<long>(i)));
    return Polynomial(std::move(d));
  }

  /// z^n p(1/z); n defaults to the degree.
  Polynomial reversed(int n) const {
    std::vector<T> r(static_cast<std::size_t>(n + 1), T(0));
    for (int i = 0; i <= degree(); ++i) r[static_cast<std::size_t>(n - i)] = c_[static_cast<std::size_t>(i)];
    return Polynomial(std::move(r));
  }

  Polynomial monic() const {
    if (is_zero()) return {};
    T l = lead();
    std::vector<T> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = T(c_[i] / l);
    return Polynomial(std::move(r));
  }

  template <typename U, typename F>
  Polynomial<U> map(F&& fn) const {
    std::vector<U> r;
    r.reserve(c_.size());
    for (const auto& v : c_) r.push_back(fn(v));
    return Polynomial<U>(std::move(r));
  }

  Polynomial operator-() const {
    std::vector<T> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = T(-c_[i]);
    return Polynomial(std::move(r));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (coeff_is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(r));
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string str(const std::string& var = "z") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const T& v = c_[static_cast<std::size_t>(i)];
      if (coeff_is_zero(v)) continue;
      std::string s = coeff_str(v);
      bool neg = !s.empty() && s[0] == '-';
      if (!out.empty()) out += neg ? " - " : " + ";
      else if (neg) out += "-";
      if (neg) s = s.substr(1);
      bool unit = (s == "1");
      if (i == 0) out += s;
      else {
        if (!unit) out += s + "*";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && coeff_is_zero(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
};

/// Quotient and remainder; T must be a field.
template <typename T>
std::pair<Polynomial<T>, Polynomial<T>> divmod(const Polynomial<T>& a, const Polynomial<T>& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "polynomial division by zero");
  if (a.degree() < b.degree()) return {Polynomial<T>{}, a};
  std::vector<T> r = a.coeffs();
  std::vector<T> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), T(0));
  const T& lb = b.lead();
  const int db = b.degree();
  for (int k = a.degree() - db; k >= 0; --k) {
    T coef = T(r[static_cast<std::size_t>(k + db)] / lb);
    if (coeff_is_zero(coef)) continue;
    q[static_cast<std::size_t>(k)] = coef;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= coef * b.coeffs()[static_cast<std::size_t>(j)];
  }
  r.resize(static_cast<std::size_t>(db));
  return {Polynomial<T>(std::move(q)), Polynomial<T>(std::move(r))};
}

template <typename T>
Polynomial<T> exact_quotient(const Polynomial<T>& a, const Polynomial<T>& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw Error(ErrorCode::InexactDivision, "nonzero remainder in exact polynomial division");
  return q;
}

/// Monic gcd over a field.
template <typename T>
Polynomial<T> gcd(Polynomial<T> a, Polynomial<T> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

template <typename T>
Polynomial<T> pow(const Polynomial<T>& p, int e) {
  Polynomial<T> result = Polynomial<T>::constant(T(1));
  Polynomial<T> base = p;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

/// p(q(z)).
template <typename T>
Polynomial<T> compose(const Polynomial<T>& p, const Polynomial<T>& q) {
  Polynomial<T> acc;
  for (int i = p.degree(); i >= 0; --i) acc = acc * q + Polynomial<T>::constant(p[i]);
  return acc;
}

}  // namespace ratdyn

namespace ratdyn {

/// Yun's square-free decomposition over a field of characteristic zero:
/// returns (a_1, a_2, ...) with p = lc * a_1 * a_2^2 * a_3^3 ..., each a_k monic
/// and square-free (possibly constant 1).
template <typename T>
std::vector<Polynomial<T>> squarefree_decomposition(const Polynomial<T>& p) {
  std::vector<Polynomial<T>> out;
  if (p.degree() < 1) return out;
  Polynomial<T> dp = p.derivative();
  Polynomial<T> a = gcd(p, dp);
  Polynomial<T> b = exact_quotient(p, a);
  Polynomial<T> c = exact_quotient(dp, a);
  Polynomial<T> d = c - b.derivative();
  while (b.degree() > 0) {
    Polynomial<T> g = gcd(b, d);
    out.push_back(g);
    b = exact_quotient(b, g);
    c = exact_quotient(d, g);
    d = c - b.derivative();
  }
  while (!out.empty() && out.back().degree() == 0) out.pop_back();
  return out;
}

}  // namespace ratdyn
