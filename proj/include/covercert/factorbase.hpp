#pragma once

// Primality, desk-scale factorization (trial division + Brent rho),
// multiplicative orders, primitive prime divisors of a^n - b^n, and the
// curated table of known small factors of Fermat numbers 2^(2^m) + 1.

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "covercert/modmath.hpp"

namespace covercert {

// ---------------------------------------------------------------- primality

struct PrimalityResult {
  bool prime = false;
  /// False when the verdict rests on probabilistic Miller-Rabin rounds.
  bool proven = true;
};

namespace factor_detail {

inline const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    constexpr u64 limit = 1'000'000;
    std::vector<bool> composite(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

inline bool mr_round_u64(u64 n, u64 a, u64 d, unsigned s) {
  u64 x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned i = 1; i < s; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

inline bool mr_round(const Int& n, const Int& a, const Int& d, unsigned long s) {
  const Int n1 = n - 1;
  Int x = mod_pow(a, d, n);
  if (x == 1 || x == n1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n1) return true;
  }
  return false;
}

}  // namespace factor_detail

/// Deterministic below 2^64 (fixed witness set); above that `rounds`
/// Miller-Rabin rounds with the first primes as bases, reported as probable.
inline PrimalityResult primality(const Int& n, unsigned rounds = 40) {
  if (n < 2) return {false, true};
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == from_u64(p)) return {true, true};
    if (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) return {false, true};
  }
  if (fits_u64(n)) {
    const u64 v = to_u64(n);
    u64 d = v - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
      d >>= 1;
      ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
      if (!factor_detail::mr_round_u64(v, a, d, s)) return {false, true};
    return {true, true};
  }
  Int d = n - 1;
  const unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  const auto& bases = factor_detail::small_primes();
  for (unsigned i = 0; i < rounds && i < bases.size(); ++i)
    if (!factor_detail::mr_round(n, from_u64(bases[i]), d, s)) return {false, true};
  return {true, false};
}

inline bool is_prime(const Int& n) { return primality(n).prime; }

// ------------------------------------------------------------ factorization

struct PrimePower {
  Int prime;
  unsigned exponent = 0;
};

struct FactorList {
  std::vector<PrimePower> factors;  // strictly increasing primes

  Int value() const {
    Int v = 1;
    for (const auto& f : factors) v *= pow_int(f.prime, f.exponent);
    return v;
  }
  std::vector<Int> primes() const {
    std::vector<Int> out;
    for (const auto& f : factors) out.push_back(f.prime);
    return out;
  }
};

struct FactorOptions {
  /// Total rho iterations allowed across the whole factorization.
  u64 rho_budget = 1'000'000'000;
};

class FactorBudgetExceeded : public BudgetExceeded {
 public:
  explicit FactorBudgetExceeded(const Int& cofactor)
      : BudgetExceeded("factorization budget exhausted; unfactored cofactor " + cofactor.get_str()),
        cofactor_(cofactor) {}
  const Int& cofactor() const { return cofactor_; }

 private:
  Int cofactor_;
};

namespace factor_detail {

inline u64 gcd_u64(u64 a, u64 b) {
  while (b != 0) {
    const u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Brent's cycle finding with x -> x^2 + c; returns n on failure.
inline u64 brent_u64(u64 n, u64 c, u64& budget) {
  auto f = [&](u64 x) { return (mul_mod(x, x, n) + c) % n; };
  u64 y = 2, x = 2, ys = 2, q = 1, g = 1;
  const u64 m = 128;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      const u64 steps = std::min(m, r - k);
      if (budget < steps) throw FactorBudgetExceeded(from_u64(n));
      budget -= steps;
      for (u64 i = 0; i < steps; ++i) {
        y = f(y);
        q = mul_mod(q, x > y ? x - y : y - x, n);
      }
      g = gcd_u64(q, n);
    }
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = gcd_u64(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

inline Int brent(const Int& n, unsigned long c, u64& budget) {
  if (fits_u64(n)) return from_u64(brent_u64(to_u64(n), c, budget));
  auto f = [&](const Int& x) { return Int((x * x + c) % n); };
  Int y = 2, x = 2, ys = 2, q = 1, g = 1;
  const u64 m = 128;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      const u64 steps = std::min(m, r - k);
      if (budget < steps) throw FactorBudgetExceeded(n);
      budget -= steps;
      for (u64 i = 0; i < steps; ++i) {
        y = f(y);
        q = q * abs(x - y) % n;
      }
      g = covercert::gcd(q, n);
    }
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = covercert::gcd(abs(x - ys), n);
    } while (g == 1);
  }
  return g;
}

inline void split_composite(const Int& n, u64& budget, std::map<Int, unsigned>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  Int d = n;
  for (unsigned long c = 1; d == n; ++c) d = brent(n, c, budget);
  split_composite(d, budget, out);
  split_composite(n / d, budget, out);
}

}  // namespace factor_detail

/// Complete factorization: trial division to 10^6, then Brent rho with the
/// deterministic increment schedule c = 1, 2, ...
inline FactorList factorize(const Int& n, const FactorOptions& options = {}) {
  if (n < 2) throw InvalidArgument("factorize: n must be at least 2");
  std::map<Int, unsigned> found;
  Int rest = n;
  for (u64 p : factor_detail::small_primes()) {
    if (mpz_cmp_ui(rest.get_mpz_t(), p * p) < 0) break;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++found[from_u64(p)];
    }
  }
  u64 budget = options.rho_budget;
  if (rest > 1) {
    const Int limit = from_u64(1'000'000);
    if (rest <= limit * limit)
      ++found[rest];  // no factor below 10^6 and below 10^12: prime
    else
      factor_detail::split_composite(rest, budget, found);
  }
  FactorList list;
  for (const auto& [p, e] : found) list.factors.push_back({p, e});
  return list;
}

// ------------------------------------------------------------------- orders

/// True iff the multiplicative order of a modulo p is exactly n.
inline bool has_order(const Int& a, const Int& p, const Int& n) {
  if (n < 1 || p < 2) return false;
  if (mod_pow(a, n, p) != 1 % p) return false;
  if (n == 1) return true;
  for (const Int& q : factorize(n).primes())
    if (mod_pow(a, n / q, p) == 1) return false;
  return true;
}

/// Least d >= 1 with a^d ≡ 1 (mod p), by stripping prime factors of p - 1.
inline Int mult_order(const Int& a, const Int& p) {
  if (p < 2) throw InvalidArgument("mult_order: modulus must be prime");
  if (gcd(a, p) != 1) throw NotCoprime(a.get_str() + " is not coprime to " + p.get_str());
  if (p == 2) return 1;
  Int d = p - 1;
  for (const PrimePower& f : factorize(p - 1).factors) {
    for (unsigned i = 0; i < f.exponent; ++i) {
      if (mod_pow(a, d / f.prime, p) != 1) break;
      d /= f.prime;
    }
  }
  return d;
}

// ------------------------------------------------------------ Fermat table

struct FermatFactorEntry {
  unsigned m = 0;
  Int q;
};

/// Known prime factors q of F_m = 2^(2^m) + 1. Every entry is re-verified
/// (primality, divisibility, q ≡ 1 mod 2^(m+2)) when the table is loaded, so
/// the data is a hint rather than a trusted source.
class FermatTable {
 public:
  static constexpr std::string_view kHeader = "covercert-fermat v1";

  static FermatTable parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw MalformedTable(0, "empty Fermat table");
    ++lineno;
    if (line != kHeader) throw MalformedTable(1, "expected header '" + std::string(kHeader) + "'");
    FermatTable table;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string m_text, q_text, extra;
      if (!(fields >> m_text >> q_text) || (fields >> extra))
        throw MalformedTable(lineno, "expected 'm q'");
      FermatFactorEntry entry;
      try {
        const Int m = parse_int(m_text);
        if (m > 40) throw MalformedTable(lineno, "index out of range");
        entry.m = static_cast<unsigned>(m.get_ui());
        entry.q = parse_int(q_text);
      } catch (const InvalidArgument& e) {
        throw MalformedTable(lineno, e.what());
      }
      if (!table.entries_.empty()) {
        const auto& last = table.entries_.back();
        if (last.m > entry.m || (last.m == entry.m && last.q >= entry.q))
          throw MalformedTable(lineno, "entries must be strictly sorted by (m, q)");
      }
      verify(entry);
      table.entries_.push_back(entry);
    }
    return table;
  }

  static const FermatTable& builtin() {
    static const FermatTable table = parse(kBuiltin);
    return table;
  }

  std::string serialize() const {
    std::string out(kHeader);
    out += '\n';
    for (const auto& e : entries_) out += std::to_string(e.m) + " " + e.q.get_str() + "\n";
    return out;
  }

  const std::vector<FermatFactorEntry>& entries() const { return entries_; }

  std::vector<Int> factors(unsigned m) const {
    std::vector<Int> out;
    for (const auto& e : entries_)
      if (e.m == m) out.push_back(e.q);
    return out;
  }

  static void verify(const FermatFactorEntry& e) {
    const std::string tag = "F_" + std::to_string(e.m) + " factor " + e.q.get_str();
    if (!is_prime(e.q)) throw CorruptTable(tag + " is not prime");
    Int two_m;
    mpz_ui_pow_ui(two_m.get_mpz_t(), 2, e.m);
    if (mod_pow(2, two_m, e.q) != e.q - 1) throw CorruptTable(tag + " does not divide the Fermat number");
    if (e.m >= 2) {
      Int step;
      mpz_ui_pow_ui(step.get_mpz_t(), 2, e.m + 2);
      if (mod_floor(e.q - 1, step) != 0) throw CorruptTable(tag + " is not 1 mod 2^(m+2)");
    }
  }

 private:
  static constexpr std::string_view kBuiltin =
      "covercert-fermat v1\n"
      "5 641\n"
      "5 6700417\n"
      "6 274177\n"
      "6 67280421310721\n"
      "7 59649589127497217\n"
      "7 5704689200685129054721\n"
      "8 1238926361552897\n"
      "9 2424833\n"
      "9 7455602825647884208337395736200454918783366342657\n"
      "10 45592577\n"
      "10 6487031809\n"
      "11 319489\n"
      "11 974849\n"
      "12 114689\n"
      "12 26017793\n"
      "12 63766529\n"
      "12 190274191361\n"
      "12 1256132134125569\n"
      "13 2710954639361\n"
      "14 116928085873074369829035993834596371340386703423373313\n"
      "15 1214251009\n"
      "16 825753601\n"
      "17 31065037602817\n"
      "18 13631489\n"
      "18 81274690703860512587777\n";

  std::vector<FermatFactorEntry> entries_;
};

/// tau with p | 2^(2^(tau-1)) + 1, i.e. log2 of the order of 2 mod p.
inline unsigned fermat_tau(const Int& p) {
  if (p < 3 || mpz_even_p(p.get_mpz_t())) throw NotFermatDivisor(p.get_str() + " is not an odd prime");
  // The order is 2^t iff t is least with 2^(2^t) ≡ 1; squaring avoids
  // factoring p - 1.
  Int x = 2;
  const std::size_t bits = mpz_sizeinbase(p.get_mpz_t(), 2);
  for (unsigned t = 0; t <= bits; ++t) {
    if (x == 1) {
      if (t < 2) break;
      return t;
    }
    x = mod_floor(x * x, p);
  }
  throw NotFermatDivisor("order of 2 modulo " + p.get_str() + " is not a power of 2 above 2");
}

/// A second prime q != p dividing the same Fermat number as p: the least
/// such entry of the table, re-verified at call time.
inline Int fermat_partner(const Int& p, const FermatTable& table = FermatTable::builtin()) {
  const unsigned tau = fermat_tau(p);
  const unsigned m = tau - 1;
  for (const Int& q : table.factors(m)) {
    if (q == p) continue;
    FermatTable::verify({m, q});
    return q;
  }
  throw TableMiss("no curated partner prime for " + p.get_str() + " dividing F_" + std::to_string(m));
}

// ------------------------------------------------------ primitive divisors

struct ZsigmondyException {
  friend bool operator==(ZsigmondyException, ZsigmondyException) { return true; }
};

struct PrimitivePrimeSet {
  std::vector<Int> primes;  // ascending
  /// True when the primes come from the curated Fermat table (the list may
  /// then be incomplete, but each entry is verified).
  bool from_table = false;
};

inline bool zsigmondy_exception(const Int& a, const Int& b, const Int& n) {
  if (a == 2 && b == 1 && n == 6) return true;
  const Int s = a + b;
  return n == 2 && mpz_popcount(s.get_mpz_t()) == 1;
}

/// Phi_n(a, b) = prod_{d | n} (a^d - b^d)^mu(n/d).
inline Int cyclotomic_value(const Int& a, const Int& b, unsigned long n) {
  if (n == 0) throw InvalidArgument("cyclotomic_value: n must be positive");
  const FactorList nf = n == 1 ? FactorList{} : factorize(from_u64(n));
  std::vector<Int> radical_primes = nf.primes();
  Int num = 1, den = 1;
  const std::size_t subsets = std::size_t{1} << radical_primes.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    unsigned long d = n;
    int parity = 0;
    for (std::size_t i = 0; i < radical_primes.size(); ++i)
      if (mask & (std::size_t{1} << i)) {
        d /= radical_primes[i].get_ui();
        parity ^= 1;
      }
    const Int term = pow_int(a, d) - pow_int(b, d);
    (parity == 0 ? num : den) *= term;
  }
  Int out;
  mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

/// Every prime p with p | a^n - b^n and p ∤ a^m - b^m for 0 < m < n.
inline PrimitivePrimeSet primitive_primes(const Int& a, const Int& b, const Int& n, const FactorOptions& options = {},
                                          const FermatTable& table = FermatTable::builtin()) {
  if (b < 1 || a <= b) throw InvalidArgument("primitive_primes: need a > b >= 1");
  if (gcd(a, b) != 1) throw NotCoprime("primitive_primes: gcd(a, b) must be 1");
  if (n < 1 || !n.fits_ulong_p()) throw InvalidArgument("primitive_primes: n out of range");
  const unsigned long nn = n.get_ui();
  PrimitivePrimeSet set;
  if (a == 2 && b == 1 && nn >= 64 && (nn & (nn - 1)) == 0) {
    const unsigned m = static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2)) - 2;
    std::vector<Int> qs = table.factors(m);
    if (!qs.empty()) {
      for (const Int& q : qs) FermatTable::verify({m, q});
      set.primes = std::move(qs);
      set.from_table = true;
      return set;
    }
  }
  const Int value = nn == 1 ? Int(a - b) : cyclotomic_value(a, b, nn);
  if (value < 2) return set;
  for (const Int& q : factorize(value, options).primes()) {
    if (mpz_divisible_p(b.get_mpz_t(), q.get_mpz_t()) != 0) continue;
    const Int ratio = mod_floor(a * mod_inv(b, q), q);
    if (has_order(ratio, q, n)) set.primes.push_back(q);
  }
  return set;
}

using PrimitivePrimeResult = std::variant<Int, ZsigmondyException>;

/// Least primitive prime divisor of a^n - b^n, or the Zsigmondy exception
/// marker for (2,1,6) and for n = 2 with a + b a power of 2.
inline PrimitivePrimeResult primitive_prime(const Int& a, const Int& b, const Int& n, const FactorOptions& options = {}) {
  if (n < 2) throw InvalidArgument("primitive_prime: n must be at least 2");
  if (zsigmondy_exception(a, b, n)) return ZsigmondyException{};
  const PrimitivePrimeSet set = primitive_primes(a, b, n, options);
  if (set.primes.empty())
    throw std::logic_error("no primitive prime for a non-exceptional case: " + a.get_str() + "," + b.get_str() +
                           "," + n.get_str());
  return set.primes.front();
}

}  // namespace covercert
