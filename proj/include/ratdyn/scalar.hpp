#pragma once

// Scalar realizations: exact Gaussian rationals (elements of Q(i)) and
// double-precision complex numbers. ScalarTraits gives both the same vocabulary.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace ratdyn {

using Complex = std::complex<double>;

/// An element re + i*im of Q(i); both parts are kept in lowest terms.
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
  GaussRational(int v) : re_(v), im_(0) {}   // NOLINT(google-explicit-constructor)
  GaussRational(mpq_class re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
  GaussRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }
  explicit GaussRational(const mpz_class& z) : re_(z), im_(0) {}

  static GaussRational i() { return GaussRational(mpq_class(0), mpq_class(1)); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return mpq_class(re_ * re_ + im_ * im_); }

  Complex to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussRational operator-() const { return {-re_, -im_}; }

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    if (is_real() && o.is_real()) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class m = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    if (o.is_real()) {
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    mpq_class n = o.norm();
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  std::string str() const {
    if (is_real()) return re_.get_str();
    return "(" + re_.get_str() + (sgn(im_) < 0 ? "" : "+") + im_.get_str() + "i)";
  }
  friend std::ostream& operator<<(std::ostream& os, const GaussRational& g) { return os << g.str(); }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussRational> {
  static constexpr bool exact = true;
  static GaussRational zero() { return GaussRational(0); }
  static GaussRational one() { return GaussRational(1); }
  static bool is_zero(const GaussRational& x) { return x.is_zero(); }
  static Complex to_complex(const GaussRational& x) { return x.to_complex(); }
  static GaussRational from_int(long v) { return GaussRational(v); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static bool is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
  static Complex to_complex(const Complex& x) { return x; }
  static Complex from_int(long v) { return {static_cast<double>(v), 0.0}; }
};

template <typename T>
concept ExactScalar = ScalarTraits<T>::exact;

}  // namespace ratdyn
