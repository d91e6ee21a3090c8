#include <gtest/gtest.h>

#include <random>

#include "covercert/modmath.hpp"

using namespace covercert;

TEST(ModMath, ParseIntRejectsJunk) {
  EXPECT_EQ(parse_int("12345678901234567890123"), Int("12345678901234567890123"));
  for (const char* bad : {"", "-1", "+3", "1 2", "0x10", "12a"}) EXPECT_THROW(parse_int(bad), InvalidArgument) << bad;
}

TEST(ModMath, ModFloorIsNonNegative) {
  EXPECT_EQ(mod_floor(Int(-7), Int(5)), 3);
  EXPECT_EQ(mod_floor(Int(7), Int(5)), 2);
  EXPECT_EQ(mod_floor(Int(-10), Int(5)), 0);
}

TEST(ModMath, PowModMatchesRepeatedMultiplication) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const u64 m = rng() % 1'000'000'007ULL + 2;
    const u64 b = rng() % m;
    const u64 e = rng() % 200;
    u64 naive = 1 % m;
    for (u64 i = 0; i < e; ++i) naive = static_cast<u64>((static_cast<unsigned __int128>(naive) * b) % m);
    EXPECT_EQ(pow_mod(b, e, m), naive);
    EXPECT_EQ(mod_pow(from_u64(b), from_u64(e), from_u64(m)), from_u64(naive));
  }
}

TEST(ModMath, InverseOrNotInvertible) {
  EXPECT_EQ(mod_inv(Int(3), Int(7)), 5);
  EXPECT_THROW(mod_inv(Int(6), Int(9)), NotInvertible);
}

// Oracle: scan [0, lcm) for the least x meeting every congruence.
TEST(ModMath, CrtMatchesScanOnNonCoprimeModuli) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    CrtSystem system;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const u64 m = 1 + rng() % 24;
      system.emplace_back(from_u64(rng() % m), from_u64(m));
    }
    Int l = 1;
    for (const auto& c : system) l = lcm(l, c.modulus);
    std::optional<u64> least;
    for (u64 x = 0; x < to_u64(l) && !least; ++x)
      if (std::all_of(system.begin(), system.end(), [&](const Congruence& c) { return c.contains(from_u64(x)); }))
        least = x;
    if (least) {
      const Congruence sol = crt(system);
      EXPECT_EQ(sol.modulus, l);
      EXPECT_EQ(sol.residue, from_u64(*least));
    } else {
      EXPECT_THROW(crt(system), Inconsistent);
    }
  }
}

TEST(ModMath, CrtOnHugeModuli) {
  const Int m1 = pow_int(Int(641), 40), m2 = pow_int(Int(3), 200);
  const Int x = pow_int(Int(10), 150) + 12345;
  const std::vector<Congruence> system{{x, m1}, {x, m2}};
  const Congruence sol = crt(system);
  EXPECT_EQ(sol.modulus, m1 * m2);
  EXPECT_EQ(sol.residue, mod_floor(x, m1 * m2));
}

TEST(ModMath, DigitsRoundTripAndMatchRepeatedDivision) {
  std::mt19937_64 rng(3);
  gmp_randclass gr(gmp_randinit_default);
  gr.seed(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Int n = gr.get_z_bits(1 + rng() % 20000);
    const Int base = from_u64(2 + rng() % 5000);
    const DigitVector dv = digits_base(n, base);
    EXPECT_EQ(dv.value(), n);
    Int rest = n;
    for (std::size_t i = 0; i < dv.size(); ++i) {
      ASSERT_EQ(dv.digits[i], mod_floor(rest, base));
      rest /= base;
    }
    EXPECT_EQ(rest, 0);
    if (n != 0) {
      EXPECT_NE(dv.digits.back(), 0);
    }
  }
  EXPECT_TRUE(digits_base(Int(0), Int(10)).digits.empty());
}
