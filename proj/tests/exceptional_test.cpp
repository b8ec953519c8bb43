#include <gtest/gtest.h>

#include <random>

#include "ratdyn/exceptional.hpp"
#include "test_util.hpp"

using namespace ratdyn;
using ratdyn::testing::exact;

namespace {

ZPoly zp(std::initializer_list<long> c) {
  std::vector<mpz_class> v;
  for (long x : c) v.emplace_back(x);
  return ZPoly(std::move(v));
}

using Pt = std::pair<Complex, Complex>;

// Chord-and-tangent arithmetic on y^2 = x^3 + a x + b.
Pt add(Pt p, Pt q, Complex a) {
  Complex l = (std::abs(p.first - q.first) < 1e-14) ? (3.0 * p.first * p.first + a) / (2.0 * p.second)
                                                    : (q.second - p.second) / (q.first - p.first);
  Complex x = l * l - p.first - q.first;
  return {x, l * (p.first - x) - p.second};
}

Pt random_point(std::mt19937_64& rng, Complex a, Complex b) {
  Complex x = ratdyn::testing::random_complex(rng, 1.0);
  return {x, std::sqrt(x * x * x + a * x + b)};
}

}  // namespace

TEST(Constructors, PowerMaps) {
  EXPECT_EQ(power_map(2, 1), exact({0, 0, 1}, {1}));
  EXPECT_EQ(power_map(3, -1), exact({1}, {0, 0, 0, 1}));
  EXPECT_EQ(power_map(2, -1).degree(), 2);
}

TEST(Constructors, ChebyshevPolynomials) {
  EXPECT_EQ(chebyshev_polynomial(2), zp({-2, 0, 1}));
  EXPECT_EQ(chebyshev_polynomial(3), zp({0, -3, 0, 1}));
  EXPECT_EQ(chebyshev_polynomial(4), zp({2, 0, -4, 0, 1}));
  EXPECT_EQ(chebyshev_map(2, -1), exact({2, 0, -1}, {1}));
  EXPECT_EQ(chebyshev_map(3, 1), exact({0, -3, 0, 1}, {1}));
}

TEST(Constructors, ChebyshevIdentity) {
  // z^d T_d(z + 1/z) = z^{2d} + 1
  const ZPoly zsq1 = zp({1, 0, 1});
  for (int d = 1; d <= 16; ++d) {
    ZPoly t = chebyshev_polynomial(d);
    ZPoly acc;
    for (int k = 0; k <= d; ++k)
      acc += pow(zsq1, k) * ZPoly::monomial(mpz_class(1), d - k) * t[k];
    EXPECT_EQ(acc, ZPoly::monomial(mpz_class(1), 2 * d) + ZPoly::constant(mpz_class(1))) << d;
  }
}

TEST(Constructors, ChebyshevSemiconjugacy) {
  for (int d = 1; d <= 6; ++d)
    for (int e = 1; e <= 6; ++e) EXPECT_EQ(compose(chebyshev_polynomial(d), chebyshev_polynomial(e)), chebyshev_polynomial(d * e));
}

TEST(Constructors, LattesExamples) {
  EXPECT_EQ(flexible_lattes({GaussRational(-1), GaussRational(0), 2}), exact({1, 0, 2, 0, 1}, {0, -4, 0, 4}));
  // ((z^2-1)^2 - 8z) / (4(z^3+z+1))
  EXPECT_EQ(flexible_lattes({GaussRational(1), GaussRational(1), 2}), exact({1, -8, -2, 0, 1}, {4, 4, 0, 4}));
  EXPECT_EQ(flexible_lattes({GaussRational(-1), GaussRational(0), 3}).degree(), 9);
  EXPECT_THROW(flexible_lattes({GaussRational(0), GaussRational(0), 2}), Error);
  try {
    flexible_lattes({GaussRational(-3), GaussRational(2), 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularCurve);
  }
}

TEST(Constructors, LattesSemiconjugacy) {
  std::mt19937_64 rng(8);
  struct Case {
    long a, b;
  };
  for (Case c : {Case{-1, 0}, Case{1, 1}, Case{2, -3}}) {
    for (int m = 2; m <= 4; ++m) {
      auto f = to_complex(flexible_lattes({GaussRational(c.a), GaussRational(c.b), m}));
      for (int trial = 0; trial < 5; ++trial) {
        Pt p = random_point(rng, double(c.a), double(c.b));
        Pt q = p;
        for (int k = 1; k < m; ++k) q = add(q, p, double(c.a));
        auto img = evaluate(f, SpherePoint::finite(p.first));
        EXPECT_LT(chordal(img, SpherePoint::finite(q.first)), 1e-9) << "m=" << m;
      }
    }
  }
}

TEST(Constructors, RigidLattesFixture) {
  auto f = to_complex(cm_lattes_fixture());
  std::mt19937_64 rng(2);
  const Complex I(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Pt p = random_point(rng, -1.0, 0.0);
    Pt ip{-p.first, I * p.second};  // complex multiplication by i
    Pt q = add(p, ip, -1.0);
    EXPECT_LT(chordal(evaluate(f, SpherePoint::finite(p.first)), SpherePoint::finite(q.first)), 1e-9);
  }
  auto [pts, rep] = periodic_points(f, 1);
  bool gaussian = false;
  for (const auto& c : group_cycles(f, pts, 1)) {
    Complex l = c.multiplier;
    if (std::abs(l.imag()) > 0.5 && std::abs(l - Complex(std::round(l.real()), std::round(l.imag()))) < 1e-6) gaussian = true;
  }
  EXPECT_TRUE(gaussian);
}

TEST(Orbifold, Examples) {
  EXPECT_EQ(orbifold_signature(exact({0, 0, 1}, {1})).str(), "(inf,inf)");
  EXPECT_EQ(orbifold_signature(exact({-2, 0, 1}, {1})).str(), "(2,2,inf)");
  EXPECT_EQ(orbifold_signature(exact({1, 0, 2, 0, 1}, {0, -4, 0, 4})).str(), "(2,2,2,2)");
  EXPECT_EQ(orbifold_signature(cm_lattes_fixture()).str(), "(2,2,2,2)");
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(power_map(2, 1)).str(), "Power(+,2)");
  auto c = classify(exact({-1, 0, 1}, {1}));
  EXPECT_EQ(c.str(), "NotExceptional");
  EXPECT_EQ(classify(flexible_lattes({GaussRational(-1), GaussRational(0), 2}), 3).str(), "LattesFlexible");
  EXPECT_EQ(classify(cm_lattes_fixture(), 2).str(), "LattesRigid");
}

TEST(Classify, PowerAndChebyshevClosure) {
  for (int d : {2, 3, 4})
    for (int s : {1, -1}) {
      EXPECT_EQ(classify(power_map(d, s)).str(), std::string("Power(") + (s > 0 ? "+" : "-") + "," + std::to_string(d) + ")");
      std::string cheb = std::string("Chebyshev(") + ((s > 0 || d % 2 == 0) ? "+" : "-") + "," + std::to_string(d) + ")";
      EXPECT_EQ(classify(chebyshev_map(d, s)).str(), cheb);
    }
}

TEST(Classify, ConjugationStable) {
  std::mt19937_64 rng(17);
  std::vector<ExactMap> maps{power_map(2, -1), chebyshev_map(3, -1), flexible_lattes({GaussRational(-1), GaussRational(0), 2}),
                             exact({-1, 0, 1}, {1})};
  for (const auto& f : maps) {
    auto base = classify(f, 2).str();
    for (int t = 0; t < 3; ++t) {
      auto phi = ratdyn::testing::random_exact_moebius(rng);
      EXPECT_EQ(classify(conjugate(f, phi), 2).str(), base);
    }
  }
}
