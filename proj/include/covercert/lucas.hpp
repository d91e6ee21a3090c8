#pragma once

// Binomial coefficients: exact values, residues modulo a prime through base-p
// digits (Lucas), and the digit-agreement modulus that pins C(k,r) to 1.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "covercert/modmath.hpp"

namespace covercert {

/// C(k, r) exactly; 0 when r > k.
inline Int binom_exact(const Int& k, const Int& r) {
  if (sgn(k) < 0 || sgn(r) < 0) throw InvalidArgument("binom_exact: negative argument");
  if (r > k) return 0;
  Int s = r;
  if (k - r < s) s = k - r;
  if (!s.fits_ulong_p()) throw InvalidArgument("binom_exact: result too large to materialize");
  const unsigned long steps = s.get_ui();
  Int result = 1;
  Int factor = k - s;
  for (unsigned long i = 1; i <= steps; ++i) {
    factor += 1;
    result *= factor;
    mpz_divexact_ui(result.get_mpz_t(), result.get_mpz_t(), i);
  }
  return result;
}

/// Whether C(k, r) > bound, without materializing a large binomial: for
/// 1 <= r < k the value is at least k, and otherwise the partial products
/// C(k, i), i <= min(r, k - r), grow at least geometrically.
inline bool binom_exceeds(const Int& k, const Int& r, const Int& bound) {
  if (sgn(k) < 0 || sgn(r) < 0) throw InvalidArgument("binom_exceeds: negative argument");
  if (r > k) return sgn(bound) < 0;
  Int s = r;
  if (k - r < s) s = k - r;
  if (s == 0) return bound < 1;
  if (k > bound) return true;
  Int value = 1;
  for (Int i = 1; i <= s; ++i) {
    value = value * (k - s + i) / i;
    if (value > bound) return true;
  }
  return false;
}

/// Primes up to this bound get full factorial tables; larger primes use
/// falling-factorial products per digit.
inline constexpr u64 kFactorialTableLimit = u64{1} << 22;

class FactorialTable {
 public:
  explicit FactorialTable(u64 p) : p_(p), fact_(p), inv_fact_(p) {
    fact_[0] = 1;
    for (u64 i = 1; i < p; ++i) fact_[i] = static_cast<std::uint32_t>(mul_mod(fact_[i - 1], i, p));
    inv_fact_[p - 1] = static_cast<std::uint32_t>(pow_mod(fact_[p - 1], p - 2, p));
    for (u64 i = p - 1; i > 0; --i) inv_fact_[i - 1] = static_cast<std::uint32_t>(mul_mod(inv_fact_[i], i, p));
  }

  u64 binom(u64 n, u64 m) const {
    if (m > n) return 0;
    return mul_mod(mul_mod(fact_[n], inv_fact_[m], p_), inv_fact_[n - m], p_);
  }

  /// Shared immutable table for p; built once under a lock.
  static std::shared_ptr<const FactorialTable> get(u64 p) {
    static std::mutex mutex;
    static std::map<u64, std::shared_ptr<const FactorialTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[p];
    if (!slot) slot = std::make_shared<const FactorialTable>(p);
    return slot;
  }

 private:
  u64 p_;
  std::vector<std::uint32_t> fact_;
  std::vector<std::uint32_t> inv_fact_;
};

/// C(n, m) mod p for single digits n, m < p, p prime below 2^32.
inline u64 digit_binom_mod(u64 n, u64 m, u64 p) {
  if (m > n) return 0;
  if (m == 0 || m == n) return 1 % p;
  if (p <= kFactorialTableLimit) return FactorialTable::get(p)->binom(n, m);
  m = std::min(m, n - m);
  u64 num = 1;
  u64 den = 1;
  for (u64 i = 0; i < m; ++i) {
    num = mul_mod(num, n - i, p);
    den = mul_mod(den, i + 1, p);
  }
  return mul_mod(num, pow_mod(den, p - 2, p), p);
}

namespace detail {

inline std::vector<u64> small_digits(const Int& n, u64 p) {
  std::vector<u64> out;
  if (fits_u64(n)) {
    for (u64 v = to_u64(n); v != 0; v /= p) out.push_back(v % p);
    return out;
  }
  const DigitVector dv = digits_base(n, from_u64(p));
  out.reserve(dv.digits.size());
  for (const Int& d : dv.digits) out.push_back(to_u64(d));
  return out;
}

}  // namespace detail

/// C(k, r) mod p via Lucas' digit product; p must be a prime below 2^32.
inline u64 binom_mod_p(const Int& k, const Int& r, u64 p) {
  if (p < 2 || p >= (u64{1} << 32)) throw InvalidArgument("binom_mod_p: prime out of range");
  if (sgn(k) < 0 || sgn(r) < 0) throw InvalidArgument("binom_mod_p: negative argument");
  if (r > k) return 0;
  if (p == 2) {
    // Odd iff every set bit of r is set in k.
    Int rest;
    mpz_com(rest.get_mpz_t(), k.get_mpz_t());
    mpz_and(rest.get_mpz_t(), rest.get_mpz_t(), r.get_mpz_t());
    return rest == 0 ? 1 : 0;
  }
  const std::vector<u64> kd = detail::small_digits(k, p);
  const std::vector<u64> rd = detail::small_digits(r, p);
  u64 result = 1;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    const u64 ki = i < kd.size() ? kd[i] : 0;
    if (rd[i] > ki) return 0;
    if (rd[i] != 0 && rd[i] != ki) result = mul_mod(result, digit_binom_mod(ki, rd[i], p), p);
  }
  return result;
}

/// General prime modulus. Digits whose binomial would need more than
/// `max_product_terms` factors are rejected.
inline Int binom_mod_p(const Int& k, const Int& r, const Int& p, u64 max_product_terms = 50'000'000) {
  if (p < 2) throw InvalidArgument("binom_mod_p: modulus must be prime");
  if (p < Int(1UL << 32)) return from_u64(binom_mod_p(k, r, to_u64(p)));
  if (sgn(k) < 0 || sgn(r) < 0) throw InvalidArgument("binom_mod_p: negative argument");
  if (r > k) return 0;
  const DigitVector kd = digits_base(k, p);
  const DigitVector rd = digits_base(r, p);
  Int result = 1;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    const Int ki = kd.digit(i);
    const Int& ri = rd.digits[i];
    if (ri > ki) return 0;
    if (ri == 0 || ri == ki) continue;
    Int m = ri;
    if (ki - ri < m) m = ki - ri;
    if (!fits_u64(m) || to_u64(m) > max_product_terms)
      throw InvalidArgument("binom_mod_p: digit binomial too expensive for modulus " + p.get_str());
    Int num = 1, den = 1;
    for (u64 j = 0, steps = to_u64(m); j < steps; ++j) {
      num = mod_floor(num * (ki - from_u64(j)), p);
      den = mod_floor(den * from_u64(j + 1), p);
    }
    result = mod_floor(result * num * mod_inv(den, p), p);
  }
  return result;
}

/// p^(j+1) for the least j >= 0 with r < p^(j+1). Any k congruent to r
/// modulo this value has C(k, r) ≡ 1 (mod p).
inline Int lemma1_modulus(const Int& r, const Int& p) {
  if (sgn(r) < 0) throw InvalidArgument("lemma1_modulus: negative r");
  if (p < 2) throw InvalidArgument("lemma1_modulus: modulus must be prime");
  Int bound = p;
  while (bound <= r) bound *= p;
  return bound;
}

}  // namespace covercert
