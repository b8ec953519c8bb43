#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "ratdyn/periodic.hpp"
#include "test_util.hpp"

using namespace ratdyn;
using ratdyn::testing::exact;

namespace {

NumericMap numeric(std::initializer_list<double> num, std::initializer_list<double> den) {
  std::vector<Complex> a(num.begin(), num.end()), b(den.begin(), den.end());
  return build_map(a, b);
}

NumericMap random_map(std::mt19937_64& rng, int d) {
  std::vector<Complex> a, b;
  for (int i = 0; i <= d; ++i) {
    a.push_back(ratdyn::testing::random_complex(rng, 1.0));
    b.push_back(ratdyn::testing::random_complex(rng, 1.0));
  }
  return build_map(a, b);
}

std::vector<Complex> sorted_multipliers(const std::vector<CycleRecord>& cycles) {
  std::vector<Complex> out;
  for (const auto& c : cycles) out.push_back(c.multiplier);
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

double nearest(const std::vector<SpherePoint>& pts, const SpherePoint& p) {
  double best = 1e9;
  for (const auto& q : pts) best = std::min(best, chordal(p, q));
  return best;
}

}  // namespace

TEST(Dynatomic, SquaringPeriodTwo) {
  auto phi = dynatomic_numerator(exact({0, 0, 1}, {1}), 2);
  EXPECT_EQ(phi.finite.str(), "z^2 + z + 1");
  EXPECT_EQ(phi.infinity_multiplicity, 0);
}

TEST(Dynatomic, BasilicaPeriodTwo) {
  auto phi = dynatomic_numerator(exact({-1, 0, 1}, {1}), 2);
  EXPECT_EQ(phi.finite.str(), "z^2 + z");
}

TEST(Dynatomic, InfinityMultiplicityTracked) {
  auto fix = fixed_point_polynomial(exact({0, 0, 1}, {1}), 1);
  EXPECT_EQ(fix.finite.str(), "z^2 - z");
  EXPECT_EQ(fix.infinity_multiplicity, 1);
  EXPECT_EQ(fix.total_degree(), 3);
}

TEST(Dynatomic, DegreeMatchesCount) {
  auto f = exact({1, 0, 3, 0, 1}, {0, 4, 0, 4});
  for (int n = 1; n <= 3; ++n) {
    auto phi = dynatomic_numerator(f, n);
    EXPECT_EQ(phi.total_degree(), exact_period_count(4, n)) << n;
  }
}

TEST(Dynatomic, CapExceeded) {
  try {
    dynatomic_numerator(exact({0, 0, 1}, {1}), 9, 256);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeCapExceeded);
  }
}

TEST(Periodic, SquaringPeriodFour) {
  auto [pts, rep] = periodic_points(numeric({0, 0, 1}, {1}), 4, 1e-12);
  ASSERT_EQ(pts.size(), 12u);
  EXPECT_EQ(rep.expected, 12);
  for (const auto& p : pts) {
    ASSERT_FALSE(p.infinite);
    EXPECT_NEAR(std::abs(p.z), 1.0, 1e-12);
    // 15th roots of unity that are not 3rd or 5th roots.
    double k = std::arg(p.z) / (2 * std::numbers::pi) * 15.0;
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(Periodic, BasilicaFixedPoints) {
  auto [pts, rep] = periodic_points(numeric({-1, 0, 1}, {1}), 1, 1e-12);
  ASSERT_EQ(pts.size(), 3u);
  const double s5 = std::sqrt(5.0);
  EXPECT_LT(nearest(pts, SpherePoint::finite((1 + s5) / 2)), 1e-12);
  EXPECT_LT(nearest(pts, SpherePoint::finite((1 - s5) / 2)), 1e-12);
  bool has_inf = std::any_of(pts.begin(), pts.end(), [](const SpherePoint& p) { return p.infinite; });
  EXPECT_TRUE(has_inf);
}

TEST(Multiplier, Examples) {
  auto sq = numeric({0, 0, 1}, {1});
  Complex w = std::polar(1.0, 2 * std::numbers::pi / 3);
  EXPECT_NEAR(std::abs(multiplier(sq, {SpherePoint::finite(w), SpherePoint::finite(w * w)}) - 4.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(multiplier(sq, {SpherePoint::finite(1.0)}) - 2.0), 0.0, 1e-14);
  EXPECT_EQ(multiplier(sq, {SpherePoint::infinity()}), Complex(0.0));
  auto bas = numeric({-1, 0, 1}, {1});
  EXPECT_EQ(multiplier(bas, {SpherePoint::finite(0.0), SpherePoint::finite(-1.0)}), Complex(0.0));
  Complex lam = multiplier(bas, {SpherePoint::finite((1 + std::sqrt(5.0)) / 2)});
  EXPECT_NEAR(std::abs(lam - (1 + std::sqrt(5.0))), 0.0, 1e-14);
  EXPECT_EQ(characteristic_exponent(0.0, 2), -std::numeric_limits<double>::infinity());
}

TEST(Multiplier, RejectsNonCycle) {
  auto sq = numeric({0, 0, 1}, {1});
  try {
    multiplier(sq, {SpherePoint::finite(0.5), SpherePoint::finite(0.3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotACycle);
  }
}

TEST(Periodic, CountsSumToIterateDegree) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3}) {
    auto f = random_map(rng, d);
    PeriodicSolver solver(f);
    for (int n = 1; n <= (d == 2 ? 5 : 3); ++n) {
      std::size_t total = 0;
      for (int k : divisors(n)) total += solver.points(k).size();
      EXPECT_EQ(static_cast<std::int64_t>(total), ipow(d, n) + 1) << "d=" << d << " n=" << n;
    }
  }
}

TEST(Periodic, CyclesPartitionPoints) {
  std::mt19937_64 rng(5);
  auto f = random_map(rng, 2);
  PeriodicSolver solver(f);
  for (int n = 1; n <= 5; ++n) {
    auto cycles = cycles_of_period(solver, n);
    EXPECT_EQ(static_cast<std::int64_t>(cycles.size() * n), exact_period_count(2, n));
  }
}

TEST(Periodic, MultiplierSpectrumConjugationInvariant) {
  std::mt19937_64 rng(21);
  auto f = random_map(rng, 2);
  auto phi = ratdyn::testing::random_moebius(rng);
  auto g = conjugate(f, phi);
  for (int n = 1; n <= 4; ++n) {
    PeriodicSolver sf(f), sg(g);
    auto a = sorted_multipliers(cycles_of_period(sf, n));
    auto b = sorted_multipliers(cycles_of_period(sg, n));
    ASSERT_EQ(a.size(), b.size());
    // Sorting is fragile near ties; compare via greedy matching instead.
    std::vector<char> used(b.size(), 0);
    for (auto x : a) {
      double best = 1e300;
      std::size_t bi = 0;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (!used[j] && std::abs(x - b[j]) < best) best = std::abs(x - b[j]), bi = j;
      used[bi] = 1;
      EXPECT_LT(best, 1e-7 * std::max(1.0, std::abs(x))) << "n=" << n;
    }
  }
}

TEST(Periodic, AgreesWithExactDynatomic) {
  auto f = exact({1, -2, 0, 1}, {3, 0, 2});
  auto fn = to_complex(f);
  for (int n = 1; n <= 3; ++n) {
    auto phi = dynatomic_numerator(f, n);
    auto roots = polynomial_roots(phi.finite.map<Complex>([](const GaussRational& c) { return c.to_complex(); }));
    auto [pts, rep] = periodic_points(fn, n);
    ASSERT_EQ(static_cast<int>(pts.size()), phi.total_degree());
    for (auto r : roots) EXPECT_LT(nearest(pts, SpherePoint::finite(r)), 1e-9) << n;
  }
}

TEST(Periodic, ExponentScalesUnderIteration) {
  auto f = numeric({-1, 0, 1}, {1});
  auto f3 = iterate(f, 3);
  PeriodicSolver solver(f);
  for (const auto& c : cycles_of_period(solver, 3)) {
    Complex lam3 = multiplier(f3, {c.points[0]}, 1e-6);
    EXPECT_NEAR(characteristic_exponent(lam3, 1) / 3.0, c.char_exponent, 1e-10);
  }
}
