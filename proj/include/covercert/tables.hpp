#pragma once

// Digit tables modulo a small prime (nominally 641): the residues γ for which
// C(k, γ) ≡ -1 is solvable, the pair table for products of two digit
// binomials, the eleven-prime assignment for r < 641, and the census of
// integers whose base-p digits admit neither construction.

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "covercert/factorbase.hpp"
#include "covercert/lucas.hpp"
#include "covercert/parallel.hpp"
#include "covercert/polyfield.hpp"

namespace covercert {

inline constexpr u64 kBasePrime = 641;
/// Ordered pairs with both entries at most this value always have a
/// two-digit solution modulo 641.
inline constexpr u64 kPairLimit = 515;
/// Largest base prime the dense p × p digit tables are built for.
inline constexpr u64 kMaxTablePrime = 1U << 13;

struct TableOptions {
  unsigned jobs = 1;
  u64 seed = 0;
};

// ---------------------------------------------------------------------------
// Good residues.

struct GTable {
  u64 p = 0;
  /// Ascending.
  std::vector<u64> members;
  /// kappa[γ] for members, -1 elsewhere; indexed by residue.
  std::vector<std::int64_t> kappa_by_residue;

  bool contains(u64 gamma) const { return gamma < p && kappa_by_residue[gamma] >= 0; }

  u64 kappa(u64 gamma) const {
    if (!contains(gamma)) throw InvalidArgument("GTable::kappa: " + std::to_string(gamma) + " is not a member");
    return static_cast<u64>(kappa_by_residue[gamma]);
  }

  /// Residues in [0, p) outside the table, 0 included.
  std::vector<u64> bad() const {
    std::vector<u64> out;
    for (u64 r = 0; r < p; ++r)
      if (!contains(r)) out.push_back(r);
    return out;
  }
};

inline void check_table_prime(u64 p) {
  if (p < 3 || p > kMaxTablePrime || !is_prime(from_u64(p)))
    throw InvalidArgument("digit tables need an odd prime up to " + std::to_string(kMaxTablePrime) + ", got " +
                          std::to_string(p));
}

/// Throws CorruptTable if some κ fails C(κ, γ) ≡ -1 (mod p) under Lucas.
inline void verify_g_table(const GTable& g) {
  for (u64 gamma : g.members)
    if (binom_mod_p(from_u64(g.kappa(gamma)), from_u64(gamma), g.p) != g.p - 1)
      throw CorruptTable("GTable: kappa(" + std::to_string(gamma) + ") does not give -1");
}

inline GTable compute_G(u64 p, const TableOptions& options = {}) {
  check_table_prime(p);
  GTable g;
  g.p = p;
  g.kappa_by_residue.assign(p, -1);
  RootOptions roots;
  roots.seed = options.seed;
  parallel_for(p - 1, options.jobs, [&](std::size_t i) {
    const u64 gamma = i + 1;
    const std::vector<u64> ks = solve_binom_congruence(gamma, p - 1, p, roots);
    if (!ks.empty()) g.kappa_by_residue[gamma] = static_cast<std::int64_t>(ks.front());
  });
  for (u64 r = 1; r < p; ++r)
    if (g.kappa_by_residue[r] >= 0) g.members.push_back(r);
  verify_g_table(g);
  return g;
}

// ---------------------------------------------------------------------------
// Pairs.

/// Dense value table C(k, r) mod p for digits k, r < p, built from Pascal's
/// rule, with bitsets of the achievable values per r.
class PairSolver {
 public:
  explicit PairSolver(u64 p) : p_(p), words_((p + 63) / 64) {
    check_table_prime(p);
    values_.assign(p * p, 0);
    // Row k of Pascal's triangle, stored column-major by r.
    std::vector<std::uint32_t> row(p, 0), next(p, 0);
    row[0] = 1;
    for (u64 k = 0; k < p; ++k) {
      for (u64 r = 0; r < p; ++r) values_[r * p + k] = row[r];
      next[0] = 1;
      for (u64 r = 1; r < p; ++r) next[r] = static_cast<std::uint32_t>((row[r] + row[r - 1]) % p);
      row.swap(next);
    }
    neg_inv_.assign(p, 0);
    for (u64 v = 1; v < p; ++v) neg_inv_[v] = static_cast<std::uint32_t>((p - pow_mod(v, p - 2, p)) % p);
    first_k_.assign(p * p, kNone);
    achievable_.assign(p * words_, 0);
    targets_.assign(p * words_, 0);
    for (u64 r = 0; r < p; ++r) {
      for (u64 k = 0; k < p; ++k) {
        const u64 v = values_[r * p + k];
        if (first_k_[r * p + v] == kNone) first_k_[r * p + v] = static_cast<std::uint32_t>(k);
        achievable_[r * words_ + v / 64] |= u64{1} << (v % 64);
        if (v != 0) {
          const u64 w = neg_inv_[v];
          targets_[r * words_ + w / 64] |= u64{1} << (w % 64);
        }
      }
    }
  }

  u64 p() const { return p_; }

  u64 value(u64 r, u64 k) const { return values_[r * p_ + k]; }

  /// Least k < p with C(k, r) ≡ t, if any.
  std::optional<u64> least_single(u64 r, u64 t) const {
    const std::uint32_t k = first_k_[r * p_ + t];
    if (k == kNone) return std::nullopt;
    return k;
  }

  /// Whether C(k', r1)·C(k'', r2) ≡ -1 (mod p) has a solution in digits.
  bool solvable(u64 r1, u64 r2) const {
    const u64* a = &targets_[r1 * words_];
    const u64* b = &achievable_[r2 * words_];
    for (u64 w = 0; w < words_; ++w)
      if (a[w] & b[w]) return true;
    return false;
  }

  /// Lexicographically least (k', k'') solving the pair congruence.
  std::optional<std::pair<u64, u64>> least_solution(u64 r1, u64 r2) const {
    for (u64 k1 = 0; k1 < p_; ++k1) {
      const u64 v = values_[r1 * p_ + k1];
      if (v == 0) continue;
      const std::uint32_t k2 = first_k_[r2 * p_ + neg_inv_[v]];
      if (k2 != kNone) return std::pair<u64, u64>{k1, k2};
    }
    return std::nullopt;
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffU;
  u64 p_;
  u64 words_;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint32_t> neg_inv_;
  std::vector<std::uint32_t> first_k_;
  std::vector<u64> achievable_;
  std::vector<u64> targets_;
};

struct PairTable {
  u64 p = 0;
  u64 limit = 0;
  /// Residues outside the good table, ascending, 0 included.
  std::vector<u64> bad;
  /// Ordered pairs of bad residues with no solution, ascending.
  std::vector<std::pair<u64, u64>> badbad;
  /// Row-major over [1, limit]²; nullopt where no solution exists.
  std::vector<std::optional<std::pair<u64, u64>>> kappa2;

  bool blocked(u64 r1, u64 r2) const {
    return std::binary_search(badbad.begin(), badbad.end(), std::pair<u64, u64>{r1, r2});
  }

  const std::optional<std::pair<u64, u64>>& kappa2_at(u64 r1, u64 r2) const {
    if (r1 < 1 || r2 < 1 || r1 > limit || r2 > limit) throw InvalidArgument("PairTable::kappa2_at: outside the table");
    return kappa2[(r1 - 1) * limit + (r2 - 1)];
  }

  /// Unordered pairs {r1, r2} within [1, limit] that have no solution.
  std::vector<std::pair<u64, u64>> unsolved_within_limit() const {
    std::vector<std::pair<u64, u64>> out;
    for (const auto& [a, b] : badbad)
      if (a >= 1 && b >= 1 && a <= limit && b <= limit && a <= b) out.emplace_back(a, b);
    return out;
  }
};

/// Throws CorruptTable if some κ̃ entry fails its product congruence under
/// Lucas, or a blocked pair is not a pair of bad residues.
inline void verify_pair_table(const PairTable& t) {
  for (u64 r1 = 1; r1 <= t.limit; ++r1)
    for (u64 r2 = 1; r2 <= t.limit; ++r2) {
      const auto& entry = t.kappa2[(r1 - 1) * t.limit + (r2 - 1)];
      if (!entry) continue;
      const u64 v = mul_mod(digit_binom_mod(entry->first, r1, t.p), digit_binom_mod(entry->second, r2, t.p), t.p);
      if (v != t.p - 1)
        throw CorruptTable("PairTable: kappa2(" + std::to_string(r1) + "," + std::to_string(r2) + ") does not give -1");
    }
  for (const auto& [a, b] : t.badbad)
    if (!std::binary_search(t.bad.begin(), t.bad.end(), a) || !std::binary_search(t.bad.begin(), t.bad.end(), b))
      throw CorruptTable("PairTable: blocked pair outside bad x bad");
}

inline PairTable compute_pair_table(const GTable& g, u64 limit = kPairLimit, const TableOptions& options = {}) {
  if (limit >= g.p) throw InvalidArgument("compute_pair_table: limit must be below p");
  const PairSolver solver(g.p);
  PairTable t;
  t.p = g.p;
  t.limit = limit;
  t.bad = g.bad();
  std::vector<std::vector<std::pair<u64, u64>>> rows(t.bad.size());
  parallel_for(t.bad.size(), options.jobs, [&](std::size_t i) {
    for (u64 b : t.bad)
      if (!solver.solvable(t.bad[i], b)) rows[i].emplace_back(t.bad[i], b);
  });
  for (auto& row : rows) t.badbad.insert(t.badbad.end(), row.begin(), row.end());
  t.kappa2.resize(limit * limit);
  parallel_for(limit, options.jobs, [&](std::size_t i) {
    for (u64 r2 = 1; r2 <= limit; ++r2) t.kappa2[i * limit + (r2 - 1)] = solver.least_solution(i + 1, r2);
  });
  verify_pair_table(t);
  return t;
}

// ---------------------------------------------------------------------------
// Eleven primes covering every r < 641.

inline constexpr std::array<u64, 11> kTenPrimes{641,      114689,   274177,   319489,   974849,  2424833,
                                                6700417, 13631489, 26017793, 45592577, 63766529};

struct TenPrimesAssignment {
  u64 r = 0;
  u64 p = 0;
  u64 k = 0;
  friend bool operator==(const TenPrimesAssignment&, const TenPrimesAssignment&) = default;
};

struct TenPrimesWitness {
  /// Indexed by r - 1.
  std::vector<TenPrimesAssignment> assignments;

  const TenPrimesAssignment& at(u64 r) const {
    if (r < 1 || r > assignments.size()) throw InvalidArgument("TenPrimesWitness: r out of range");
    return assignments[r - 1];
  }
};

/// Each listed prime divides a Fermat number F_m with a nontrivial cofactor
/// that has a prime factor in the curated table. Throws CorruptTable if not.
inline void check_ten_primes_set(const FermatTable& table = FermatTable::builtin()) {
  for (u64 p : kTenPrimes) {
    const Int P = from_u64(p);
    const u64 tau = fermat_tau(P);
    const Int half = pow_int(2, tau - 1);
    if (mod_pow(2, half, P) != P - 1) throw CorruptTable(std::to_string(p) + " does not divide its Fermat number");
    Int fermat = 1;
    fermat <<= to_u64(half);
    fermat += 1;
    if (!mpz_divisible_p(fermat.get_mpz_t(), P.get_mpz_t()))
      throw CorruptTable(std::to_string(p) + " does not divide its Fermat number exactly");
    const Int cofactor = fermat / P;
    const Int partner = fermat_partner(P, table);
    if (cofactor <= 1 || partner == P || !mpz_divisible_p(cofactor.get_mpz_t(), partner.get_mpz_t()))
      throw CorruptTable(std::to_string(p) + " has no distinct partner in its Fermat cofactor");
  }
}

/// First prime of the list (ascending) for which C(k, r) ≡ -1 is solvable,
/// with the least such k.
inline std::optional<TenPrimesAssignment> assign_ten_primes(u64 r, const RootOptions& options = {}) {
  if (r < 1 || r >= kTenPrimes.front()) throw InvalidArgument("assign_ten_primes: r must lie in [1, 640]");
  for (u64 p : kTenPrimes) {
    const std::vector<u64> ks = solve_binom_congruence(r, p - 1, p, options);
    if (!ks.empty()) return TenPrimesAssignment{r, p, ks.front()};
  }
  return std::nullopt;
}

inline void verify_ten_primes_witness(const TenPrimesWitness& w) {
  for (u64 i = 0; i < w.assignments.size(); ++i) {
    const auto& a = w.assignments[i];
    if (a.r != i + 1 || std::find(kTenPrimes.begin(), kTenPrimes.end(), a.p) == kTenPrimes.end() || a.k >= a.p ||
        binom_mod_p(from_u64(a.k), from_u64(a.r), a.p) != a.p - 1)
      throw CorruptTable("TenPrimesWitness: assignment for r = " + std::to_string(i + 1) + " fails");
  }
}

/// `progress(done)` is called after each r, possibly from worker threads.
template <class Progress>
TenPrimesWitness verify_ten_primes(const TableOptions& options, Progress&& progress) {
  check_ten_primes_set();
  const u64 count = kTenPrimes.front() - 1;
  std::vector<std::optional<TenPrimesAssignment>> found(count);
  std::atomic<u64> done{0};
  RootOptions roots;
  roots.seed = options.seed;
  parallel_for(count, options.jobs, [&](std::size_t i) {
    found[i] = assign_ten_primes(i + 1, roots);
    progress(done.fetch_add(1) + 1);
  });
  TenPrimesWitness w;
  for (u64 i = 0; i < count; ++i) {
    if (!found[i]) throw Unsatisfiable("verify_ten_primes: r = " + std::to_string(i + 1) + " has no listed prime");
    w.assignments.push_back(*found[i]);
  }
  verify_ten_primes_witness(w);
  return w;
}

inline TenPrimesWitness verify_ten_primes(const TableOptions& options = {}) {
  return verify_ten_primes(options, [](u64) {});
}

// ---------------------------------------------------------------------------
// Digit census and density.

enum class DensityKind { sierpinski, riesel };

struct ExceptionCensus {
  u64 bound = 0;
  std::vector<u64> exceptions;
  u64 count() const { return exceptions.size(); }
};

/// An integer r qualifies when some base-p digit is good, or two digits at
/// distinct positions form a solvable pair. Zero digits never help: (0, b)
/// is blocked for every bad b.
class DigitCensus {
 public:
  DigitCensus(const GTable& g, const PairTable& pairs) : p_(g.p), good_(g.p, false), blocked_(g.p * g.p, false) {
    if (pairs.p != g.p) throw InvalidArgument("DigitCensus: tables for different primes");
    for (u64 m : g.members) good_[m] = true;
    for (const auto& [a, b] : pairs.badbad) blocked_[a * p_ + b] = true;
  }

  u64 p() const { return p_; }
  bool good(u64 d) const { return good_[d]; }
  bool blocked(u64 a, u64 b) const { return blocked_[a * p_ + b]; }

  bool satisfies(const Int& r) const {
    if (sgn(r) <= 0) return false;
    const std::vector<u64> d = detail::small_digits(r, p_);
    for (u64 v : d)
      if (good_[v]) return true;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        if (i != j && !blocked(d[i], d[j])) return true;
    return false;
  }

  ExceptionCensus count_exceptional(u64 bound) const {
    if (bound < 1 || bound > p_ * p_) throw InvalidArgument("count_exceptional: bound must lie in [1, p^2]");
    ExceptionCensus c;
    c.bound = bound;
    for (u64 r = 1; r <= bound; ++r)
      if (!satisfies(from_u64(r))) c.exceptions.push_back(r);
    return c;
  }

  /// Positive integers r <= x failing both conditions.
  Int failing_count(const Int& x) const {
    if (sgn(x) <= 0) return 0;
    return blocked_upto(x) - 1;
  }

  /// Count of r in [1, x] meeting either condition; a lower bound for the
  /// number of r <= x with infinitely many qualifying k. Both kinds use the
  /// same tables: 641 divides 2^32 + 1 as well as 2^64 - 1, so the Riesel
  /// construction also asks for C(k, r) ≡ -1 (mod 641).
  Int density_count(const Int& x, DensityKind = DensityKind::sierpinski) const {
    if (sgn(x) <= 0) return 0;
    return x - failing_count(x);
  }

 private:
  using DigitSet = std::vector<std::uint32_t>;

  bool admissible(const DigitSet& s, u64 d) const {
    if (d == 0) return true;
    if (good_[d]) return false;
    for (std::uint32_t u : s)
      if (!blocked(u, d) || !blocked(d, u)) return false;
    return true;
  }

  static DigitSet with(DigitSet s, u64 d) {
    if (d == 0) return s;
    const auto it = std::lower_bound(s.begin(), s.end(), d);
    if (it == s.end() || *it != d) s.insert(it, static_cast<std::uint32_t>(d));
    return s;
  }

  /// Integers in [0, x] failing both conditions (0 included).
  Int blocked_upto(const Int& x) const {
    std::vector<u64> digits = detail::small_digits(x, p_);
    std::reverse(digits.begin(), digits.end());
    Int total = 0;
    DigitSet s;
    for (std::size_t t = 0; t < digits.size(); ++t) {
      const u64 free = digits.size() - 1 - t;
      for (u64 d = 0; d < digits[t]; ++d)
        if (admissible(s, d)) total += free_count(with(s, d), free);
      if (!admissible(s, digits[t])) return total;
      s = with(std::move(s), digits[t]);
    }
    return total + 1;
  }

  /// Strings of `len` digits that keep the prefix digit set `s` failing.
  /// New nonzero digits form a clique N in the blocked graph, each joined
  /// to all of s; a digit without a self-loop appears exactly once, others
  /// at least once, and looped digits of s may recur freely.
  Int free_count(const DigitSet& s, u64 len) const {
    if (len == 0) return 1;
    {
      std::lock_guard lock(memo_mutex_);
      const auto it = memo_.find({s, len});
      if (it != memo_.end()) return it->second;
    }
    std::vector<std::uint32_t> candidates;
    for (u64 v = 1; v < p_; ++v)
      if (!std::binary_search(s.begin(), s.end(), v) && admissible(s, v))
        candidates.push_back(static_cast<std::uint32_t>(v));
    u64 looped = 0;
    for (std::uint32_t u : s) looped += blocked(u, u) ? 1 : 0;

    // tally[n1][n2]: cliques with n1 single-use and n2 repeatable digits.
    const u64 cap = std::min<u64>(len, candidates.size());
    std::vector<std::vector<Int>> tally(cap + 1, std::vector<Int>(cap + 1, 0));
    std::vector<std::uint32_t> stack;
    auto extend = [&](auto&& self, std::size_t from, u64 n1, u64 n2) -> void {
      tally[n1][n2] += 1;
      if (n1 + n2 == cap) return;
      for (std::size_t i = from; i < candidates.size(); ++i) {
        const std::uint32_t v = candidates[i];
        bool ok = true;
        for (std::uint32_t u : stack)
          if (!blocked(u, v) || !blocked(v, u)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        stack.push_back(v);
        if (blocked(v, v))
          self(self, i + 1, n1, n2 + 1);
        else
          self(self, i + 1, n1 + 1, n2);
        stack.pop_back();
      }
    };
    extend(extend, 0, 0, 0);

    Int result = 0;
    for (u64 n1 = 0; n1 <= cap; ++n1)
      for (u64 n2 = 0; n1 + n2 <= cap; ++n2) {
        if (tally[n1][n2] == 0) continue;
        Int placed = 1;
        for (u64 i = 0; i < n1; ++i) placed *= from_u64(len - i);
        // Fill len - n1 slots from {0} ∪ looped(s) ∪ N2, using all of N2.
        const u64 rest = len - n1;
        Int onto = 0;
        Int choose = 1;
        for (u64 i = 0; i <= n2; ++i) {
          Int term = choose * pow_int(from_u64(1 + looped + n2 - i), rest);
          onto += (i % 2 == 0) ? term : Int(-term);
          choose = choose * from_u64(n2 - i) / from_u64(i + 1);
        }
        result += tally[n1][n2] * placed * onto;
      }
    std::lock_guard lock(memo_mutex_);
    memo_.emplace(std::pair{s, len}, result);
    return result;
  }

  u64 p_;
  std::vector<bool> good_;
  std::vector<bool> blocked_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::pair<DigitSet, u64>, Int> memo_;
};

/// Upper bound ((p - |G|)^(j+1) - 1) / (p^(j+1) - 1) on the failing fraction
/// of [1, p^(j+1) - 1].
inline mpq_class density_bound(u64 j, u64 p = kBasePrime, u64 good_count = 395) {
  if (good_count >= p) throw InvalidArgument("density_bound: good_count must be below p");
  const Int num = pow_int(from_u64(p - good_count), j + 1) - 1;
  const Int den = pow_int(from_u64(p), j + 1) - 1;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace covercert
