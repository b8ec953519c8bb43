#pragma once

#include <cstdint>
#include <vector>

namespace ratdyn {

inline std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int k = 1; k <= n; ++k)
    if (n % k == 0) out.push_back(k);
  return out;
}

inline int moebius_mu(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
  }
  if (n > 1) result = -result;
  return result;
}

/// d^n without overflow checks beyond the int64 range; callers cap first.
inline std::int64_t ipow(std::int64_t d, int n) {
  std::int64_t r = 1;
  for (int k = 0; k < n; ++k) r *= d;
  return r;
}

/// Number of points of exact period n of a degree-d map, counted with multiplicity.
inline std::int64_t exact_period_count(int d, int n) {
  std::int64_t total = 0;
  for (int k : divisors(n)) total += moebius_mu(n / k) * (ipow(d, k) + 1);
  return total;
}

}  // namespace ratdyn
