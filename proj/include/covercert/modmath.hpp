#pragma once

// Exact modular arithmetic over arbitrary-precision integers: powers,
// inverses, CRT merging (coprime or not) and base-p digit vectors.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covercert/errors.hpp"

namespace covercert {

using Int = mpz_class;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline bool fits_u64(const Int& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

inline u64 to_u64(const Int& n) {
  if (!fits_u64(n)) throw InvalidArgument("value does not fit in 64 bits: " + n.get_str());
  static_assert(sizeof(unsigned long) == 8);
  return mpz_get_ui(n.get_mpz_t());
}

inline Int from_u64(u64 v) { return Int(static_cast<unsigned long>(v)); }

/// Decimal parse; rejects signs, blanks and leading junk.
inline Int parse_int(std::string_view text) {
  if (text.empty() || text.size() > 1'000'000 ||
      !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw InvalidArgument("not a nonnegative decimal integer: '" + std::string(text.substr(0, 40)) + "'");
  return Int(std::string(text), 10);
}

inline std::string to_string(const Int& n) { return n.get_str(10); }

inline Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline Int pow_int(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// base^exp mod m as the least nonnegative residue.
inline Int mod_pow(const Int& base, const Int& exp, const Int& m) {
  if (m < 2) throw InvalidArgument("mod_pow: modulus must be at least 2");
  if (sgn(exp) < 0) throw InvalidArgument("mod_pow: negative exponent");
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int mod_inv(const Int& a, const Int& m) {
  if (m < 2) throw InvalidArgument("mod_inv: modulus must be at least 2");
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw NotInvertible(a.get_str() + " has no inverse modulo " + m.get_str());
  return r;
}

/// x ≡ residue (mod modulus), residue kept in [0, modulus).
struct Congruence {
  Int residue;
  Int modulus;

  Congruence() : residue(0), modulus(2) {}
  Congruence(const Int& r, const Int& m) : residue(r), modulus(m) {
    if (modulus < 1) throw InvalidArgument("congruence modulus must be positive");
    residue = mod_floor(residue, modulus);
  }

  bool contains(const Int& x) const { return mod_floor(x, modulus) == residue; }

  friend bool operator==(const Congruence& a, const Congruence& b) {
    return a.residue == b.residue && a.modulus == b.modulus;
  }
};

using CrtSystem = std::vector<Congruence>;

/// Combined solution of a system of congruences. Moduli need not be coprime;
/// the result modulus is their lcm and the residue the least solution.
inline Congruence crt(std::span<const Congruence> system) {
  if (system.empty()) throw InvalidArgument("crt: empty system");
  Int r = system[0].residue;
  Int m = system[0].modulus;
  for (std::size_t i = 1; i < system.size(); ++i) {
    const Int& r2 = system[i].residue;
    const Int& m2 = system[i].modulus;
    Int g = gcd(m, m2);
    Int diff = r2 - r;
    if (mod_floor(diff, g) != 0)
      throw Inconsistent("no common solution for x ≡ " + r.get_str() + " (mod " + m.get_str() +
                         ") and x ≡ " + r2.get_str() + " (mod " + m2.get_str() + ")");
    Int m_g = m / g;
    Int m2_g = m2 / g;
    Int t = 0;
    if (m2_g > 1) t = mod_floor((diff / g) * mod_inv(mod_floor(m_g, m2_g), m2_g), m2_g);
    Int l = m_g * m2;
    r = mod_floor(r + m * t, l);
    m = l;
  }
  return Congruence(r, m);
}

/// Little-endian base-`base` digits; empty for zero.
struct DigitVector {
  Int base;
  std::vector<Int> digits;

  Int value() const {
    Int v = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) v = v * base + *it;
    return v;
  }
  std::size_t size() const { return digits.size(); }
  Int digit(std::size_t i) const { return i < digits.size() ? digits[i] : Int(0); }
};

namespace detail {

inline void digits_small(Int n, const Int& base, std::size_t count, std::vector<Int>& out) {
  for (std::size_t i = 0; i < count; ++i) {
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), base.get_mpz_t());
    out.push_back(r);
    n = q;
  }
}

// Emits exactly 2^(level+1) digits of n < base^(2^(level+1)).
inline void digits_split(const Int& n, const std::vector<Int>& pow2, int level, std::vector<Int>& out) {
  if (level < 4) {
    digits_small(n, pow2[0], std::size_t{1} << (level + 1), out);
    return;
  }
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), pow2[level].get_mpz_t());
  digits_split(r, pow2, level - 1, out);
  digits_split(q, pow2, level - 1, out);
}

}  // namespace detail

inline DigitVector digits_base(const Int& n, const Int& base) {
  if (base < 2) throw InvalidArgument("digits_base: base must be at least 2");
  if (sgn(n) < 0) throw InvalidArgument("digits_base: negative value");
  DigitVector dv{base, {}};
  if (n == 0) return dv;
  if (fits_u64(n) && fits_u64(base)) {
    u64 v = to_u64(n);
    const u64 b = to_u64(base);
    while (v != 0) {
      dv.digits.push_back(from_u64(v % b));
      v /= b;
    }
    return dv;
  }
  // pow2[i] = base^(2^i); divide-and-conquer keeps large conversions subquadratic.
  std::vector<Int> pow2{base};
  while (pow2.back() <= n) pow2.push_back(pow2.back() * pow2.back());
  int level = static_cast<int>(pow2.size()) - 2;
  if (level < 0) {
    dv.digits.push_back(n);
    return dv;
  }
  detail::digits_split(n, pow2, level, dv.digits);
  while (!dv.digits.empty() && dv.digits.back() == 0) dv.digits.pop_back();
  return dv;
}

/// Number of base-`base` digits of n, i.e. the least j+1 with n < base^(j+1);
/// 1 for n = 0.
inline std::size_t digit_count(const Int& n, const Int& base) {
  std::size_t count = 1;
  Int bound = base;
  while (bound <= n) {
    bound *= base;
    ++count;
  }
  return count;
}

inline bool is_power_of(const Int& n, const Int& a) {
  if (n < 1) throw InvalidArgument("is_power_of: n must be positive");
  if (a < 2) throw InvalidArgument("is_power_of: base must be at least 2");
  Int v = n;
  while (mpz_divisible_p(v.get_mpz_t(), a.get_mpz_t()) != 0) v /= a;
  return v == 1;
}

}  // namespace covercert
