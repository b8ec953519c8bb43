#include <gtest/gtest.h>

#include "ratdyn/spectra.hpp"
#include "test_util.hpp"

using namespace ratdyn;
using ratdyn::testing::exact;

namespace {

QPoly qp(std::initializer_list<long> c) {
  std::vector<mpq_class> v;
  for (long x : c) v.emplace_back(x);
  return QPoly(std::move(v));
}

ExactMap lattes() { return exact({1, 0, 2, 0, 1}, {0, -4, 0, 4}); }

}  // namespace

TEST(MultiplierPolynomial, Examples) {
  EXPECT_EQ(multiplier_polynomial(exact({0, 0, 1}, {1}), 1).str("l"), "l^3 - 2*l^2");
  EXPECT_EQ(multiplier_polynomial(exact({-1, 0, 1}, {1}), 1), qp({0, -4, -2, 1}));
  EXPECT_EQ(multiplier_polynomial(exact({0, 0, 1}, {1}), 2), qp({16, -8, 1}));
}

TEST(MultiplierPolynomial, DegreeBookkeeping) {
  std::vector<GaussRational> num{GaussRational(mpq_class(-2)), GaussRational(mpq_class(1, 3)), GaussRational(1)};
  std::vector<GaussRational> den{GaussRational(5), GaussRational(1)};
  auto f = build_map(num, den);
  SpectrumEngine engine(f);
  for (int n = 1; n <= 4; ++n) {
    auto s = engine.spectrum(n);
    EXPECT_EQ(s.polynomial().degree(), exact_period_count(2, n)) << n;
    EXPECT_EQ(s.certificate, "modular-reconstruction");
  }
}

TEST(MultiplierPolynomial, RootsMatchNumericMultipliers) {
  std::vector<GaussRational> num{GaussRational(mpq_class(3, 2)), GaussRational(-1), GaussRational(0), GaussRational(2)};
  std::vector<GaussRational> den{GaussRational(1), GaussRational(mpq_class(-1, 4)), GaussRational(1)};
  auto f = build_map(num, den);
  SpectrumEngine engine(f);
  for (int n = 1; n <= 3; ++n) {
    auto s = engine.spectrum(n);
    auto Q = s.cycle_polynomial().map<Complex>([](const mpq_class& c) { return Complex(c.get_d(), 0.0); });
    auto roots = polynomial_roots(Q);
    auto cycles = engine.numeric_cycles(n);
    ASSERT_EQ(roots.size(), cycles.size());
    std::vector<char> used(roots.size(), 0);
    for (const auto& c : cycles) {
      double best = 1e300;
      std::size_t bi = 0;
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (!used[j] && std::abs(roots[j] - c.multiplier) < best) best = std::abs(roots[j] - c.multiplier), bi = j;
      used[bi] = 1;
      EXPECT_LT(best, 1e-8 * std::max(1.0, std::abs(c.multiplier))) << "n=" << n;
    }
  }
}

TEST(MultiplierPolynomial, RejectsGaussianCoefficients) {
  std::vector<GaussRational> num{GaussRational::i(), GaussRational(0), GaussRational(1)};
  std::vector<GaussRational> den{GaussRational(1)};
  try {
    multiplier_polynomial(build_map(num, den), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRationalCoefficients);
  }
}

TEST(MultiplierPolynomial, CapExceeded) {
  try {
    multiplier_polynomial(exact({0, 0, 1}, {1}), 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeCapExceeded);
  }
}

TEST(FactorSpectrum, Examples) {
  auto a = factor_spectrum(qp({0, 0, -2, 1}));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].q, qp({-2, 1}));
  EXPECT_EQ(a[1].q, qp({0, 1}));
  EXPECT_EQ(a[1].multiplicity, 2);
  auto b = factor_spectrum(qp({-4, -2, 1}));
  ASSERT_EQ(b.size(), 1u);
  auto c = factor_spectrum(qp({1, 0, 1}));
  ASSERT_EQ(c.size(), 1u);
}

TEST(Membership, Examples) {
  auto sq = algebraic_spectrum(exact({0, 0, 1}, {1}), 3);
  EXPECT_TRUE(membership(sq, NumberFieldSpec::rationals()).all_in);
  auto bas = algebraic_spectrum(exact({-1, 0, 1}, {1}), 1);
  auto v = membership(bas, NumberFieldSpec::rationals());
  EXPECT_FALSE(v.all_in);
  EXPECT_EQ(v.period, 1);
  EXPECT_EQ(v.factor, qp({-4, -2, 1}));
  EXPECT_TRUE(membership(bas, NumberFieldSpec::quadratic(5)).all_in);
  EXPECT_TRUE(membership(bas, NumberFieldSpec::quadratic(20)).all_in);
  for (long D : {-1, -2, -3, -7, -11}) EXPECT_FALSE(membership(bas, NumberFieldSpec::quadratic(D)).all_in) << D;
}

TEST(Membership, Monotone) {
  auto sq = algebraic_spectrum(exact({0, 0, 1}, {1}), 3);
  for (long D : {2, 3, -1, -7}) EXPECT_TRUE(membership(sq, NumberFieldSpec::quadratic(D)).all_in);
}

TEST(Membership, HigherDegreeFieldHeuristic) {
  // Q(sqrt5) inside the quartic field Q(sqrt5, i) = Q[x]/(x^4 - 8x^2 + 36)... use x^4 - 6x^2 + 4:
  // its roots are +-1 +- sqrt5, so sqrt5 lies in it.
  auto K = NumberFieldSpec::from_polynomial(ZPoly({mpz_class(4), mpz_class(0), mpz_class(-6), mpz_class(0), mpz_class(1)}));
  auto bas = algebraic_spectrum(exact({-1, 0, 1}, {1}), 1);
  auto v = membership(bas, K);
  EXPECT_TRUE(v.heuristic);
  EXPECT_TRUE(v.all_in);
}

TEST(NumberField, RejectsReducible) {
  EXPECT_THROW(NumberFieldSpec::from_polynomial(ZPoly({mpz_class(-1), mpz_class(0), mpz_class(1)})), Error);
  auto k = NumberFieldSpec::from_polynomial(ZPoly({mpz_class(1), mpz_class(0), mpz_class(1)}));
  EXPECT_TRUE(k.imaginary_quadratic);
  EXPECT_EQ(*k.quadratic_d, -1);
}

TEST(Integrality, ChebyshevAndLattes) {
  for (long s : {1, -1}) {
    auto t3 = exact({0, -3 * s, 0, 4 * 0 + s}, {1});
    auto v = integrality(algebraic_spectrum(t3, 4));
    EXPECT_TRUE(v.all_rational_integers) << s;
  }
  SpectrumConfig cfg;
  auto v = integrality(algebraic_spectrum(lattes(), 2, cfg));
  EXPECT_TRUE(v.all_rational_integers);
  auto b = integrality(algebraic_spectrum(exact({-1, 0, 1}, {1}), 1));
  EXPECT_TRUE(b.all_algebraic_integers);
  EXPECT_FALSE(b.all_rational_integers);
}

TEST(GaloisSets, Examples) {
  auto a = galois_orbit_sets(exact({0, 0, 1}, {1}), 2);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].size(), 2u);
  EXPECT_EQ(a[0].factor, qp({1, 1, 1}));

  auto b = galois_orbit_sets(exact({-1, 0, 1}, {1}), 1);
  ASSERT_EQ(b.size(), 2u);
  std::size_t inf_sets = 0;
  for (const auto& s : b) {
    if (s.factor.is_zero()) {
      ++inf_sets;
      ASSERT_EQ(s.size(), 1u);
      EXPECT_TRUE(s.points[0].infinite);
    } else {
      EXPECT_EQ(s.factor, qp({-1, -1, 1}));
      EXPECT_EQ(s.size(), 2u);
    }
  }
  EXPECT_EQ(inf_sets, 1u);

  auto c = galois_orbit_sets(exact({0, 0, 1}, {1}), 4);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].size() + c[1].size(), 12u);
  EXPECT_EQ(std::min(c[0].size(), c[1].size()), 4u);
}

TEST(GaloisSets, NormIdentity) {
  // Average log spherical derivative over a Galois set = (1/n)(1/deg q) log|Norm q|.
  std::vector<GaussRational> num{GaussRational(mpq_class(3, 2)), GaussRational(-1), GaussRational(2)};
  std::vector<GaussRational> den{GaussRational(1), GaussRational(mpq_class(1, 3))};
  auto f = build_map(num, den);
  auto fn = to_complex(f);
  SpectrumEngine engine(f);
  for (int n = 1; n <= 3; ++n) {
    auto sets = galois_orbit_sets(engine, n);
    auto spec = engine.spectrum(n);
    for (const auto& s : sets) {
      // Multiplier factor shared by the set's cycles.
      const SpectrumFactor* q = nullptr;
      for (const auto& fa : spec.factors) {
        auto cq = fa.q.map<Complex>([](const mpq_class& c) { return Complex(c.get_d(), 0.0); });
        if (std::abs(cq.eval(s.cycles[0].multiplier)) < 1e-6 * std::pow(1 + std::abs(s.cycles[0].multiplier), fa.q.degree()))
          q = &fa;
      }
      ASSERT_NE(q, nullptr);
      if (static_cast<std::size_t>(q->q.degree()) != s.cycles.size()) continue;
      double lhs = 0;
      for (const auto& p : s.points) lhs += std::log(spherical_norm(fn, p));
      lhs /= static_cast<double>(s.size());
      double rhs = std::log(std::abs(q->q[0].get_d())) / (n * q->q.degree());
      EXPECT_NEAR(lhs, rhs, 1e-8) << "n=" << n;
    }
  }
}
