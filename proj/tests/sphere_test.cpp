#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ratdyn/sphere.hpp"
#include "test_util.hpp"

using namespace ratdyn;
using namespace ratdyn::testing;

TEST(BuildMap, Examples) {
  auto sq = exact({0, 0, 1}, {1});
  EXPECT_EQ(sq.degree(), 2);
  EXPECT_EQ(sq.num().str(), "z^2");
  auto basilica = exact({-1, 0, 1}, {1});
  EXPECT_EQ(basilica.degree(), 2);
  EXPECT_EQ(basilica.num().str(), "z^2 - 1");
}

TEST(BuildMap, Errors) {
  try {
    exact({0, 0, 1}, {0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateMap);
  }
  try {
    exact({1, 1}, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeTooLow);
  }
  // z^2 (z - 1) / (z (z - 1)) reduces to z: common factor removed, degree 1.
  try {
    exact({0, 0, -1, 1}, {0, -1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeTooLow);
  }
  try {
    build_map(std::vector<Complex>{0, 0, 1}, std::vector<Complex>{0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateMap);
  }
  try {
    build_map(std::vector<Complex>{-1, 0, 1}, std::vector<Complex>{1 + 1e-12, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateMap);
  }
}

TEST(BuildMap, ReducesCommonFactorExactly) {
  // (z^3 - z^2) / (z - 1) = z^2
  auto f = exact({0, 0, -1, 1}, {-1, 1});
  EXPECT_EQ(f, exact({0, 0, 1}, {1}));
}

TEST(Evaluate, Examples) {
  auto sq = exact({0, 0, 1}, {1});
  EXPECT_EQ(evaluate(sq, q(2)), q(4));
  EXPECT_TRUE(evaluate(sq, ProjPoint<GaussRational>::infinity()).is_infinity());
  EXPECT_EQ(evaluate(exact({-1, 0, 1}, {1}), q(0)), q(-1));
  auto inv = exact({1}, {0, 0, 1});
  EXPECT_EQ(evaluate(inv, q(0)), ProjPoint<GaussRational>::infinity());
  EXPECT_EQ(evaluate(inv, ProjPoint<GaussRational>::infinity()), q(0));
}

TEST(SphericalNorm, Examples) {
  auto sq = to_complex(exact({0, 0, 1}, {1}));
  EXPECT_NEAR(spherical_norm(sq, SpherePoint::finite(1.0)), 2.0, 1e-15);
  EXPECT_NEAR(spherical_norm(sq, SpherePoint::finite(2.0)), 20.0 / 17.0, 1e-15);
  EXPECT_EQ(spherical_norm(sq, SpherePoint::infinity()), 0.0);
  // The displayed formula tends to 0 as |z| grows, matching the chart value at infinity.
  double z = 1e6;
  double formula = 2 * z * (1 + z * z) / (1 + z * z * z * z);
  EXPECT_LT(formula, 1e-5);
  EXPECT_NEAR(spherical_norm(sq, SpherePoint::finite(z)), formula, 1e-18);
}

TEST(SphericalNorm, ExactSquaredForm) {
  auto sq = exact({0, 0, 1}, {1});
  EXPECT_EQ(spherical_norm_squared(sq, q(2)), mpq_class(400, 289));
  EXPECT_EQ(spherical_norm_squared(sq, ProjPoint<GaussRational>::infinity()), 0);
  // f(z) = z^2 - 1 at z = 1/2: |2z| (1 + 1/4) / (1 + 9/16) = 1 * (5/4) / (25/16) = 4/5
  EXPECT_EQ(spherical_norm_squared(exact({-1, 0, 1}, {1}), q(1, 2)), mpq_class(16, 25));
  // Infinity mapped to a finite point: 1/z^2 at z = 3, squared form of formula.
  auto inv = exact({1}, {0, 0, 1});
  mpq_class fp(2, 27), z2(9), fz2(1, 81);
  mpq_class expected = fp * fp * (1 + z2) * (1 + z2) / ((1 + fz2) * (1 + fz2));
  EXPECT_EQ(spherical_norm_squared(inv, q(3)), expected);
}

TEST(SphericalNorm, AgreesWithFormula) {
  std::mt19937_64 rng(7);
  auto f = to_complex(exact({1, 0, 3, 0, 1}, {0, -4, 0, 4}));  // (z^2+1)^2 / (4 z^3 - 4 z)
  for (int k = 0; k < 500; ++k) {
    Complex z = random_complex(rng);
    auto j = jet(f, SpherePoint::finite(z), Chart::Finite, Chart::Finite);
    Complex fz = f.num().eval(z) / f.den().eval(z);
    double formula = std::abs(j.derivative) * (1 + std::norm(z)) / (1 + std::norm(fz));
    EXPECT_NEAR(spherical_norm(f, SpherePoint::finite(z)), formula, 64 * std::numeric_limits<double>::epsilon() * formula);
  }
}

TEST(SphericalNorm, ChainRule) {
  std::mt19937_64 rng(11);
  auto f = to_complex(exact({-1, 0, 1}, {1, 0, 0, 2}));
  auto ff = compose(f, f);
  for (int k = 0; k < 200; ++k) {
    SpherePoint z = SpherePoint::finite(random_complex(rng));
    double lhs = spherical_norm(ff, z);
    double rhs = spherical_norm(f, evaluate(f, z)) * spherical_norm(f, z);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, rhs));
  }
}

TEST(Conjugate, Examples) {
  auto sq = exact({0, 0, 1}, {1});
  EXPECT_EQ(conjugate(sq, MoebiusMap<GaussRational>::identity()), sq);
  auto half = build_map(std::vector<GaussRational>{0, 0, GaussRational(mpq_class(1, 2))}, ints({1}));
  EXPECT_EQ(conjugate(sq, MoebiusMap<GaussRational>(2, 0, 0, 1)), half);
  EXPECT_EQ(conjugate(sq, MoebiusMap<GaussRational>(0, 1, 1, 0)), sq);
}

TEST(Conjugate, RoundTripExact) {
  std::mt19937_64 rng(3);
  auto f = exact({1, 0, 3, 0, 1}, {0, -4, 0, 4});
  for (int k = 0; k < 20; ++k) {
    auto phi = random_exact_moebius(rng);
    EXPECT_EQ(conjugate(conjugate(f, phi), phi.inverse()), f);
  }
}

TEST(Conjugate, CommutesWithEvaluation) {
  std::mt19937_64 rng(5);
  auto f = to_complex(exact({-1, 0, 1}, {1}));
  for (int k = 0; k < 50; ++k) {
    auto phi = random_moebius(rng);
    auto g = conjugate(f, phi);
    SpherePoint z = SpherePoint::finite(random_complex(rng, 1.0));
    EXPECT_LT(chordal(evaluate(g, phi(z)), phi(evaluate(f, z))), 1e-9);
  }
}

TEST(CriticalPoints, Examples) {
  auto sq = critical_points(exact({0, 0, 1}, {1}));
  ASSERT_EQ(sq.size(), 2u);
  EXPECT_LT(chordal(sq[0].point, SpherePoint::finite(0.0)), 1e-12);
  EXPECT_TRUE(sq[1].point.is_infinity());
  auto lat = critical_points(exact({1, 0, 2, 0, 1}, {0, -4, 0, 4}));
  int total = 0;
  for (const auto& c : lat) total += c.multiplicity;
  EXPECT_EQ(total, 6);
  for (const auto& c : lat) EXPECT_FALSE(c.point.is_infinity());
}

TEST(CriticalPoints, CountIsTwoDMinusTwo) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    std::uniform_int_distribution<long> u(-5, 5);
    std::vector<GaussRational> num, den;
    for (int i = 0; i < 4; ++i) num.emplace_back(u(rng));
    for (int i = 0; i < 3; ++i) den.emplace_back(u(rng));
    num.back() = 1;
    try {
      auto f = build_map(num, den);
      int total = 0;
      for (const auto& c : critical_points(f)) total += c.multiplicity;
      EXPECT_EQ(total, 2 * f.degree() - 2);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::DegenerateMap || e.code() == ErrorCode::DegreeTooLow);
    }
  }
  // A degenerate critical point: z^3 has multiplicity 2 at 0 and at infinity.
  auto cube = critical_points(exact({0, 0, 0, 1}, {1}));
  ASSERT_EQ(cube.size(), 2u);
  EXPECT_EQ(cube[0].multiplicity, 2);
  EXPECT_EQ(cube[1].multiplicity, 2);
}

TEST(Postcritical, Examples) {
  auto a = postcritical_truncation(to_complex(exact({0, 0, 1}, {1})), 3);
  EXPECT_EQ(a.points.size(), 2u);
  EXPECT_TRUE(a.closed);
  auto b = postcritical_truncation(to_complex(exact({-1, 0, 1}, {1})), 4);
  EXPECT_EQ(b.points.size(), 3u);
  EXPECT_TRUE(b.closed);
  for (double v : {-1.0, 0.0}) EXPECT_TRUE(contains_point(b.points, SpherePoint::finite(v), 1e-9));
  EXPECT_TRUE(contains_point(b.points, SpherePoint::infinity(), 1e-9));
  auto c = postcritical_truncation(to_complex(exact({1, 0, 1}, {1})), 2);
  EXPECT_EQ(c.points.size(), 3u);
  EXPECT_FALSE(c.closed);
  for (double v : {1.0, 2.0}) EXPECT_TRUE(contains_point(c.points, SpherePoint::finite(v), 1e-9));
}

TEST(Chordal, InfinityIsOrdinary) {
  EXPECT_NEAR(chordal(SpherePoint::finite(0.0), SpherePoint::infinity()), 2.0, 1e-15);
  EXPECT_NEAR(chordal(SpherePoint::finite(1e200), SpherePoint::infinity()), 0.0, 1e-150);
  EXPECT_NEAR(chordal(SpherePoint::finite(1.0), SpherePoint::finite(-1.0)), 2.0, 1e-15);
}
