#pragma once

// Roots of univariate polynomials over F_p (p < 2^32): gcd with x^p - x to
// isolate the linear factors, then random equal-degree splitting. Small
// fields are scanned exhaustively.

#include <algorithm>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "covercert/modmath.hpp"

namespace covercert {

/// Polynomial over F_p with little-endian coefficients in [0, p).
class PolyModP {
 public:
  PolyModP(u64 p, std::vector<u64> coeffs) : p_(p), coeffs_(std::move(coeffs)) {
    if (p < 2 || p >= (u64{1} << 32)) throw InvalidArgument("PolyModP: modulus must be a prime below 2^32");
    for (u64& c : coeffs_) c %= p_;
    trim();
  }

  u64 modulus() const { return p_; }
  const std::vector<u64>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

  u64 eval(u64 x) const {
    u64 acc = 0;
    x %= p_;
    // p < 2^32, so acc * x + c stays below 2^64.
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc * x + *it) % p_;
    return acc;
  }

  PolyModP minus_constant(u64 t) const {
    std::vector<u64> c = coeffs_;
    if (c.empty()) c.push_back(0);
    c[0] = (c[0] + p_ - t % p_) % p_;
    return PolyModP(p_, std::move(c));
  }

  friend bool operator==(const PolyModP& a, const PolyModP& b) { return a.p_ == b.p_ && a.coeffs_ == b.coeffs_; }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  u64 p_;
  std::vector<u64> coeffs_;
};

enum class RootStrategy { automatic, algebraic, exhaustive };

struct RootOptions {
  u64 seed = 0;
  RootStrategy strategy = RootStrategy::automatic;
  /// Fields up to this size are scanned when the strategy is automatic.
  u64 scan_limit = 10'000;
};

namespace poly_detail {

using Coeffs = std::vector<u64>;

inline void trim(Coeffs& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

/// How many products (p-1)^2 fit on top of a reduced value in 64 bits.
inline u64 lazy_budget(u64 p) {
  const u64 sq = (p - 1) * (p - 1);
  return sq == 0 ? std::numeric_limits<u64>::max() : (std::numeric_limits<u64>::max() - p) / sq;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  Coeffs acc(a.size() + b.size() - 1, 0);
  const u64 budget = lazy_budget(p);
  u64 pending = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (pending == budget) {
      for (u64& v : acc) v %= p;
      pending = 0;
    }
    const u64 ai = a[i];
    if (ai != 0) {
      u64* out = acc.data() + i;
      for (std::size_t j = 0; j < b.size(); ++j) out[j] += ai * b[j];
      ++pending;
    }
  }
  for (u64& v : acc) v %= p;
  trim(acc);
  return acc;
}

/// Remainder of a modulo the monic polynomial f (degree >= 1).
inline Coeffs rem_monic(Coeffs a, const Coeffs& f, u64 p) {
  const std::size_t d = f.size() - 1;
  if (a.size() <= d) return a;
  Coeffs neg(d);
  for (std::size_t j = 0; j < d; ++j) neg[j] = (p - f[j]) % p;
  const u64 budget = lazy_budget(p);
  u64 pending = 0;
  for (std::size_t i = a.size(); i-- > d;) {
    if (pending == budget) {
      for (std::size_t t = 0; t <= i; ++t) a[t] %= p;
      pending = 0;
    }
    const u64 c = a[i] % p;
    a[i] = 0;
    if (c == 0) continue;
    u64* out = a.data() + (i - d);
    for (std::size_t j = 0; j < d; ++j) out[j] += c * neg[j];
    ++pending;
  }
  a.resize(d);
  for (u64& v : a) v %= p;
  trim(a);
  return a;
}

inline Coeffs make_monic(Coeffs a, u64 p) {
  if (a.empty()) return a;
  const u64 inv = pow_mod(a.back(), p - 2, p);
  for (u64& c : a) c = mul_mod(c, inv, p);
  return a;
}

/// Quotient and remainder by a monic divisor.
inline std::pair<Coeffs, Coeffs> divrem_monic(Coeffs a, const Coeffs& f, u64 p) {
  const std::size_t d = f.size() - 1;
  if (a.size() <= d) return {Coeffs{}, a};
  Coeffs q(a.size() - d, 0);
  for (std::size_t i = a.size(); i-- > d;) {
    const u64 c = a[i];
    q[i - d] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j <= d; ++j) a[i - d + j] = (a[i - d + j] + p - mul_mod(c, f[j], p)) % p;
  }
  a.resize(d);
  trim(a);
  trim(q);
  return {q, a};
}

inline Coeffs gcd(Coeffs a, Coeffs b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    b = make_monic(std::move(b), p);
    Coeffs r = b.size() == 1 ? Coeffs{} : rem_monic(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(std::move(a), p);
}

inline Coeffs mulmod(const Coeffs& a, const Coeffs& b, const Coeffs& f, u64 p) { return rem_monic(mul(a, b, p), f, p); }

inline Coeffs powmod(const Coeffs& base, u64 e, const Coeffs& f, u64 p) {
  Coeffs result = rem_monic(Coeffs{1}, f, p);
  Coeffs b = rem_monic(base, f, p);
  while (e != 0) {
    if (e & 1) result = mulmod(result, b, f, p);
    e >>= 1;
    if (e != 0) b = mulmod(b, b, f, p);
  }
  return result;
}

/// x^e mod f by left-to-right squaring; multiplying by x is a shift.
inline Coeffs x_power_mod(u64 e, const Coeffs& f, u64 p) {
  Coeffs result = rem_monic(Coeffs{1}, f, p);
  for (int bit = 63; bit >= 0; --bit) {
    result = mulmod(result, result, f, p);
    if ((e >> bit) & 1) {
      result.insert(result.begin(), 0);
      result = rem_monic(std::move(result), f, p);
    }
  }
  return result;
}

inline Coeffs sub(Coeffs a, const Coeffs& b, u64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

// g is monic and a product of distinct linear factors.
inline void split_linear(const Coeffs& g, u64 p, std::mt19937_64& rng, std::vector<u64>& roots) {
  const std::size_t d = g.size() - 1;
  if (d == 0) return;
  if (d == 1) {
    roots.push_back((p - g[0]) % p);
    return;
  }
  std::uniform_int_distribution<u64> pick(0, p - 1);
  for (;;) {
    const Coeffs shifted{pick(rng), 1};
    Coeffs w = powmod(shifted, (p - 1) / 2, g, p);
    w = sub(std::move(w), Coeffs{1}, p);
    Coeffs u = gcd(g, w, p);
    const std::size_t du = u.empty() ? 0 : u.size() - 1;
    if (du == 0 || du == d) continue;
    auto [quotient, remainder] = divrem_monic(g, u, p);
    split_linear(u, p, rng, roots);
    split_linear(make_monic(std::move(quotient), p), p, rng, roots);
    return;
  }
}

}  // namespace poly_detail

/// Every x in [0, p) with f(x) = 0, ascending, without repetition.
inline std::vector<u64> find_roots(const PolyModP& f, const RootOptions& options = {}) {
  if (f.is_zero()) throw ZeroPolynomial("find_roots: the zero polynomial vanishes everywhere");
  const u64 p = f.modulus();
  std::vector<u64> roots;
  if (f.degree() == 0) return roots;
  const bool scan = options.strategy == RootStrategy::exhaustive ||
                    (options.strategy == RootStrategy::automatic && p <= options.scan_limit) || p == 2;
  if (scan) {
    for (u64 x = 0; x < p; ++x)
      if (f.eval(x) == 0) roots.push_back(x);
    return roots;
  }
  using namespace poly_detail;
  const Coeffs monic = make_monic(f.coeffs(), p);
  Coeffs xp = x_power_mod(p, monic, p);
  Coeffs g = gcd(monic, sub(std::move(xp), Coeffs{0, 1}, p), p);
  std::mt19937_64 rng(options.seed);
  split_linear(g, p, rng, roots);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

/// C(x, r) as a degree-r polynomial over F_p.
inline PolyModP binom_poly(u64 r, u64 p) {
  if (r >= p) throw RNotLessThanP("binom_poly: r = " + std::to_string(r) + " must be below p = " + std::to_string(p));
  if (r == 0) return PolyModP(p, {1});
  std::vector<u64> c{1};
  u64 fact = 1;
  for (u64 j = 0; j < r; ++j) {
    // c *= (x - j)
    const u64 neg_j = (p - j % p) % p;
    c.push_back(0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = (c[i - 1] + mul_mod(c[i], neg_j, p)) % p;
    c[0] = mul_mod(c[0], neg_j, p);
    fact = mul_mod(fact, j + 1, p);
  }
  const u64 inv = pow_mod(fact, p - 2, p);
  for (u64& v : c) v = mul_mod(v, inv, p);
  return PolyModP(p, std::move(c));
}

/// All k in [0, p) with C(k, r) ≡ t (mod p), for 1 <= r < p.
inline std::vector<u64> solve_binom_congruence(u64 r, u64 t, u64 p, const RootOptions& options = {}) {
  if (r == 0) throw InvalidArgument("solve_binom_congruence: r must be positive");
  return find_roots(binom_poly(r, p).minus_constant(t), options);
}

}  // namespace covercert
