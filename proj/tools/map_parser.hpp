#pragma once

// Map specifications: rational expressions in z, or builder forms
// power:d:s, chebyshev:d:s and lattes:a:b:m.

#include <cctype>
#include <string>
#include <vector>

#include "ratdyn/exceptional.hpp"
#include "ratdyn/sphere.hpp"

namespace ratdyn::cli {

class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& msg, std::size_t pos)
      : Error(ErrorCode::ParseError, msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

using P = Polynomial<GaussRational>;

struct Fraction {
  P num, den;
};

inline Fraction constant(const mpq_class& v) { return {P::constant(GaussRational(v)), P::constant(GaussRational(1))}; }

/// Recursive descent over: expr := term (('+'|'-') term)*,
/// term := unary (('*'|'/'|juxtaposition) unary)*, unary := '-' unary | power,
/// power := atom ('^' '-'? int)?, atom := int | var | '(' expr ')'.
class ExpressionParser {
 public:
  explicit ExpressionParser(std::string text, char var = 'z') : s_(std::move(text)), var_(var) {}

  Fraction parse() {
    Fraction f = expr();
    skip();
    if (i_ != s_.size()) throw ParseFailure(std::string("unexpected '") + s_[i_] + "'", i_);
    return f;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }
  bool starts_atom() {
    skip();
    return i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == var_ || s_[i_] == '(');
  }

  Fraction expr() {
    Fraction acc = term();
    for (;;) {
      if (peek('+')) {
        ++i_;
        Fraction r = term();
        acc = {acc.num * r.den + r.num * acc.den, acc.den * r.den};
      } else if (peek('-')) {
        ++i_;
        Fraction r = term();
        acc = {acc.num * r.den - r.num * acc.den, acc.den * r.den};
      } else {
        return acc;
      }
    }
  }

  Fraction term() {
    Fraction acc = unary();
    for (;;) {
      if (peek('*')) {
        ++i_;
        Fraction r = unary();
        acc = {acc.num * r.num, acc.den * r.den};
      } else if (peek('/')) {
        const std::size_t at = ++i_;
        Fraction r = unary();
        if (r.num.is_zero()) throw ParseFailure("division by zero", at);
        acc = {acc.num * r.den, acc.den * r.num};
      } else if (starts_atom()) {
        Fraction r = power();
        acc = {acc.num * r.num, acc.den * r.den};
      } else {
        return acc;
      }
    }
  }

  Fraction unary() {
    if (peek('-')) {
      ++i_;
      Fraction f = unary();
      return {-f.num, f.den};
    }
    if (peek('+')) {
      ++i_;
      return unary();
    }
    return power();
  }

  Fraction power() {
    Fraction base = atom();
    if (!peek('^')) return base;
    ++i_;
    skip();
    bool neg = false;
    if (i_ < s_.size() && s_[i_] == '-') {
      neg = true;
      ++i_;
    }
    const std::size_t at = i_;
    mpz_class e = integer();
    if (e > 4096) throw ParseFailure("exponent too large", at);
    const auto k = static_cast<unsigned>(e.get_ui());
    if (neg) {
      if (base.num.is_zero()) throw ParseFailure("zero to a negative power", at);
      std::swap(base.num, base.den);
    }
    return {pow(base.num, k), pow(base.den, k)};
  }

  Fraction atom() {
    skip();
    if (i_ >= s_.size()) throw ParseFailure("unexpected end of expression", i_);
    const char c = s_[i_];
    if (c == var_) {
      ++i_;
      return {P::x(), P::constant(GaussRational(1))};
    }
    if (c == '(') {
      const std::size_t open = i_++;
      Fraction f = expr();
      if (!peek(')')) throw ParseFailure("unbalanced parenthesis opened", open);
      ++i_;
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return constant(mpq_class(integer()));
    throw ParseFailure(std::string("unexpected '") + c + "'", i_);
  }

  mpz_class integer() {
    skip();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) throw ParseFailure("expected an integer", start);
    return mpz_class(s_.substr(start, i_ - start));
  }

  std::string s_;
  char var_;
  std::size_t i_ = 0;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad " + what + " '" + s + "'");
  }
}

inline int parse_sign(const std::string& s) {
  if (s == "+" || s == "1" || s == "+1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw Error(ErrorCode::ParseError, "sign must be + or -, got '" + s + "'");
}

}  // namespace detail

inline mpq_class parse_rational(const std::string& s) {
  try {
    mpq_class q(s);
    q.canonicalize();
    if (sgn(q.get_den()) == 0) throw std::invalid_argument(s);
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
  }
}

inline ExactMap parse_expression(const std::string& text) {
  auto f = detail::ExpressionParser(text).parse();
  if (f.den.is_zero()) throw Error(ErrorCode::ParseError, "denominator vanishes identically");
  return build_map(f.num.coeffs(), f.den.coeffs());
}

/// A polynomial with rational coefficients in the given variable.
inline QPoly parse_polynomial(const std::string& text, char var = 'x') {
  auto f = detail::ExpressionParser(text, var).parse();
  auto [q, r] = divmod(f.num, f.den);
  if (!r.is_zero()) throw Error(ErrorCode::ParseError, "'" + text + "' is not a polynomial");
  return to_rational_poly(q);
}

inline ExactMap parse_map(const std::string& spec) {
  auto parts = detail::split(spec, ':');
  const std::string& head = parts[0];
  if (head == "power" || head == "chebyshev") {
    if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorCode::ParseError, head + " builder expects " + head + ":d:sign");
    int d = detail::parse_int(parts[1], "degree");
    int s = parts.size() == 3 ? detail::parse_sign(parts[2]) : 1;
    return head == "power" ? power_map(d, s) : chebyshev_map(d, s);
  }
  if (head == "lattes") {
    if (parts.size() != 4) throw Error(ErrorCode::ParseError, "lattes builder expects lattes:a:b:m");
    return flexible_lattes({GaussRational(parse_rational(parts[1])), GaussRational(parse_rational(parts[2])),
                            detail::parse_int(parts[3], "multiplier")});
  }
  return parse_expression(spec);
}

}  // namespace ratdyn::cli
