#include <gtest/gtest.h>

#include <random>

#include "covercert/factorbase.hpp"

using namespace covercert;

bool trial_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

TEST(FactorBase, PrimalityMatchesTrialDivision) {
  for (u64 n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(from_u64(n)), trial_prime(n)) << n;
  // strong pseudoprimes to several bases
  for (const char* n : {"3215031751", "2152302898747", "3474749660383", "341550071728321", "3825123056546413051"})
    EXPECT_FALSE(is_prime(Int(n))) << n;
  EXPECT_TRUE(primality(Int("18446744073709551557")).proven);
  EXPECT_TRUE(is_prime(Int("170141183460469231731687303715884105727")));
}

TEST(FactorBase, FactorizationMultipliesBack) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Int n = from_u64(rng() % (u64{1} << 50) + 2);
    const FactorList f = factorize(n);
    EXPECT_EQ(f.value(), n);
    for (const auto& pp : f.factors) EXPECT_TRUE(is_prime(pp.prime));
  }
  const Int f6("18446744073709551617");  // 2^64 + 1
  const FactorList f = factorize(f6);
  ASSERT_EQ(f.factors.size(), 2U);
  EXPECT_EQ(f.factors[0].prime, 274177);
  EXPECT_EQ(f.factors[1].prime, Int("67280421310721"));
}

TEST(FactorBase, MultOrderMatchesScan) {
  for (u64 p : {3, 5, 7, 13, 641, 65537})
    for (u64 a = 1; a < std::min<u64>(p, 200); ++a) {
      u64 ord = 1, x = a % p;
      while (x != 1) x = x * a % p, ++ord;
      ASSERT_EQ(mult_order(from_u64(a), from_u64(p)), from_u64(ord));
    }
}

TEST(FactorBase, FermatTableEntriesDivide) {
  for (unsigned m = 5; m <= 18; ++m)
    for (const Int& q : FermatTable::builtin().factors(m)) {
      const Int two_m = pow_int(Int(2), 1UL << m);
      EXPECT_EQ(mod_floor(two_m + 1, q), 0) << "F_" << m << " " << q;
      EXPECT_EQ(fermat_tau(q), m + 1);
    }
  EXPECT_THROW(FermatTable::parse("5 642\n"), Error);
}

TEST(FactorBase, ZsigmondyExceptions) {
  EXPECT_TRUE(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(2), Int(1), Int(6))));
  EXPECT_TRUE(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(3), Int(1), Int(2))));
  EXPECT_TRUE(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(7), Int(1), Int(2))));
  EXPECT_FALSE(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(5), Int(1), Int(2))));
}

// Oracle: q | a^n - b^n and q divides no earlier term.
TEST(FactorBase, PrimitivePrimesArePrimitive) {
  for (u64 a = 2; a <= 12; ++a)
    for (u64 b = 1; b < a; ++b) {
      if (gcd(from_u64(a), from_u64(b)) != 1) continue;
      for (u64 n = 1; n <= 24; ++n) {
        const auto set = primitive_primes(from_u64(a), from_u64(b), from_u64(n));
        for (const Int& q : set.primes) {
          u64 first = 0;
          for (u64 e = 1; e <= n && first == 0; ++e)
            if (mod_pow(from_u64(a), from_u64(e), q) == mod_pow(from_u64(b), from_u64(e), q)) first = e;
          EXPECT_EQ(first, n) << a << "^n-" << b << "^n q=" << q;
        }
        EXPECT_EQ(set.primes.empty(), zsigmondy_exception(from_u64(a), from_u64(b), from_u64(n)) || (n == 1 && a - b == 1))
            << a << " " << b << " " << n;
      }
    }
}

TEST(FactorBase, FermatLevelPrimes) {
  const std::vector<u64> expect{3, 5, 17, 257, 65537};
  for (unsigned l = 1; l <= 5; ++l)
    EXPECT_EQ(std::get<Int>(primitive_prime(Int(2), Int(1), Int(1UL << l))), from_u64(expect[l - 1]));
  const Int q6 = std::get<Int>(primitive_prime(Int(2), Int(1), Int(64)));
  EXPECT_TRUE(q6 == 641 || q6 == 6700417);
  EXPECT_EQ(mult_order(Int(2), q6), 64);
}
