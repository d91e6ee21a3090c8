#pragma once

// Witness construction: a congruence ledger for k (and, for the infinite-r
// family, r itself), solved by CRT and lifted until C(k, r) exceeds every
// covering prime.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covercert/coverings.hpp"
#include "covercert/factorbase.hpp"
#include "covercert/lucas.hpp"
#include "covercert/tables.hpp"

namespace covercert {

enum class WitnessKind { sierpinski, riesel, both };

inline std::string to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::sierpinski: return "sierpinski";
    case WitnessKind::riesel: return "riesel";
    case WitnessKind::both: return "both";
  }
  return "?";
}

inline WitnessKind parse_kind(std::string_view text) {
  if (text == "sierpinski") return WitnessKind::sierpinski;
  if (text == "riesel") return WitnessKind::riesel;
  if (text == "both") return WitnessKind::both;
  throw InvalidArgument("unknown kind '" + std::string(text) + "'");
}

struct LedgerEntry {
  Congruence congruence;
  std::string tag;
};

struct Witness {
  WitnessKind kind = WitnessKind::sierpinski;
  Int a = 2;
  Int r;
  Int k;
  std::vector<LedgerEntry> ledger;
  PrimitiveCovering covering;
  /// Required number of distinct class primes per n within each sign group.
  unsigned m = 1;
  /// Per covering class: +1 divides C(k,r)·a^n + 1, -1 divides C(k,r)·a^n - 1,
  /// 0 unused.
  std::vector<int> signs;
  /// The residue C(k, r) realizes modulo every ledger prime (infinite-r
  /// family only).
  std::optional<Int> R;
  /// Level 2^tau of the covering (0 when not a binary covering).
  unsigned tau = 0;
};

/// k satisfies every ledger congruence, checked by direct reduction.
inline bool verify_ledger(const Witness& w) {
  for (const auto& e : w.ledger)
    if (mod_floor(w.k - e.congruence.residue, e.congruence.modulus) != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Digit shifts.

/// k ≡ r + (target - r_{i0})·p^{i0} (mod p^{j+1}), j minimal with r < p^{j+1}:
/// moves digit i0 of r to `target` and keeps the others.
inline Congruence shift_congruence_single(const Int& r, const Int& p, std::size_t i0, const Int& target) {
  if (target < 0 || target >= p) throw InvalidArgument("shift_congruence_single: target digit out of range");
  const DigitVector d = digits_base(r, p);
  const std::size_t len = std::max<std::size_t>(d.size(), 1);
  if (i0 >= len) throw InvalidArgument("shift_congruence_single: digit index beyond r");
  const Int modulus = pow_int(p, len);
  return Congruence(r + (target - d.digit(i0)) * pow_int(p, i0), modulus);
}

inline Congruence shift_congruence_pair(const Int& r, const Int& p, std::size_t i1, std::size_t i2,
                                        const std::pair<Int, Int>& targets) {
  if (i1 == i2) throw IndicesEqual("shift_congruence_pair: indices must differ");
  if (targets.first < 0 || targets.first >= p || targets.second < 0 || targets.second >= p)
    throw InvalidArgument("shift_congruence_pair: target digit out of range");
  const DigitVector d = digits_base(r, p);
  const std::size_t len = std::max<std::size_t>(d.size(), 1);
  if (i1 >= len || i2 >= len) throw InvalidArgument("shift_congruence_pair: digit index beyond r");
  const Int shift = (targets.first - d.digit(i1)) * pow_int(p, i1) + (targets.second - d.digit(i2)) * pow_int(p, i2);
  return Congruence(r + shift, pow_int(p, len));
}

/// Least element of the solution class that exceeds r with C(k, r) > bound.
inline Int lift_witness(const Congruence& solution, const Int& r, const Int& bound) {
  Int k = solution.residue;
  if (k <= r) k += ((r - k) / solution.modulus + 1) * solution.modulus;
  while (!binom_exceeds(k, r, bound)) k += solution.modulus;
  return k;
}

namespace witness_detail {

inline Congruence combine(const std::vector<LedgerEntry>& ledger) {
  std::vector<Congruence> system;
  for (const auto& e : ledger) system.push_back(e.congruence);
  return crt(system);
}

inline Int max_prime(const std::vector<Int>& primes) {
  Int best = 0;
  for (const Int& q : primes)
    if (q > best) best = q;
  return best;
}

/// Magnitude bound: C(k,r)·a^n - 1 > p needs C(k,r) > p + 1 at n = 0.
inline Int magnitude_bound(const std::vector<Int>& primes, WitnessKind kind) {
  const Int top = max_prime(primes);
  return kind == WitnessKind::sierpinski ? top : Int(top + 1);
}

inline void finish(Witness& w) {
  const Congruence solution = combine(w.ledger);
  w.k = lift_witness(solution, w.r, magnitude_bound(w.covering.primes, w.kind));
  if (!verify_ledger(w)) throw std::logic_error("witness violates its own ledger");
}

inline std::vector<int> uniform_signs(std::size_t n, WitnessKind kind) {
  return std::vector<int>(n, kind == WitnessKind::riesel ? -1 : 1);
}

}  // namespace witness_detail

// ---------------------------------------------------------------------------
// Base 2, modulo 641.

/// The good-digit table together with the dense pair solver built from it.
struct DigitTables {
  GTable g;
  PairSolver pairs;

  explicit DigitTables(GTable table) : g(std::move(table)), pairs(g.p) {}
};

struct DigitChoice {
  bool single = true;
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  u64 t1 = 0;
  u64 t2 = 0;
};

/// Least index with a good digit; failing that, the lexicographically least
/// pair of distinct indices i1 < i2 whose digit pair has a solution.
inline std::optional<DigitChoice> choose_digits(const Int& r, const DigitTables& t) {
  const std::vector<u64> d = detail::small_digits(r, t.g.p);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (t.g.contains(d[i])) return DigitChoice{true, i, i, t.g.kappa(d[i]), 0};
  for (std::size_t i1 = 0; i1 < d.size(); ++i1)
    for (std::size_t i2 = i1 + 1; i2 < d.size(); ++i2)
      if (const auto sol = t.pairs.least_solution(d[i1], d[i2]))
        return DigitChoice{false, i1, i2, sol->first, sol->second};
  return std::nullopt;
}

/// Covering {0 mod 2^tau} ∪ {2^(l-1) mod 2^l : 1 <= l <= tau} with p0 on the
/// first class and primes[l-1] on the others.
inline PrimitiveCovering binary_primitive_covering(const Int& a, unsigned tau, const Int& p0,
                                                   const std::vector<Int>& level_primes) {
  PrimitiveCovering pc;
  pc.a = a;
  pc.b = 1;
  pc.covering = standard_binary_covering(tau);
  pc.primes.push_back(p0);
  pc.primes.insert(pc.primes.end(), level_primes.begin(), level_primes.end());
  pc.multiplicity = 1;
  return pc;
}

inline constexpr std::array<u64, 6> kFermatLevelPrimes{3, 5, 17, 257, 65537, 6700417};

/// C(k, r)·2^n + 1 composite for all n, for r whose base-641 digits contain a
/// good digit or a solvable pair.
inline Witness witness_sierpinski(const Int& r, const DigitTables& t) {
  if (r < 1) throw InvalidArgument("witness_sierpinski: r must be positive");
  if (t.g.p != kBasePrime) throw InvalidArgument("witness_sierpinski: tables must be built for 641");
  const auto choice = choose_digits(r, t);
  if (!choice) throw ConditionUnsatisfied("r = " + r.get_str() + " has no good digit and no solvable digit pair");
  const Int p = from_u64(kBasePrime);
  Witness w;
  w.kind = WitnessKind::sierpinski;
  w.a = 2;
  w.r = r;
  w.tau = 6;
  if (choice->single)
    w.ledger.push_back({shift_congruence_single(r, p, choice->i1, from_u64(choice->t1)),
                        "digit-shift@" + std::to_string(choice->i1)});
  else
    w.ledger.push_back({shift_congruence_pair(r, p, choice->i1, choice->i2, {from_u64(choice->t1), from_u64(choice->t2)}),
                        "pair-shift@" + std::to_string(choice->i1) + "," + std::to_string(choice->i2)});
  std::vector<Int> level;
  for (u64 q : kFermatLevelPrimes) {
    level.push_back(from_u64(q));
    w.ledger.push_back({Congruence(r, lemma1_modulus(r, from_u64(q))), "digits-agree"});
  }
  w.ledger.push_back({Congruence(r, lemma1_modulus(r, 2)), "parity"});
  w.covering = binary_primitive_covering(2, 6, p, level);
  w.signs = witness_detail::uniform_signs(w.covering.primes.size(), w.kind);
  witness_detail::finish(w);
  return w;
}

/// r in [1, 640] through the eleven-prime assignment: p0 carries the class
/// 0 mod 2^tau, where 2^tau is the order of 2 modulo p0.
inline Witness witness_small_r(const Int& r, const RootOptions& options = {}) {
  if (r < 1 || r >= from_u64(kBasePrime)) throw InvalidArgument("witness_small_r: r must lie in [1, 640]");
  const auto found = assign_ten_primes(to_u64(r), options);
  if (!found) throw Unsatisfiable("r = " + r.get_str() + " has no listed prime");
  const Int p0 = from_u64(found->p);
  const unsigned tau = fermat_tau(p0);
  std::vector<Int> level;
  for (unsigned l = 1; l < tau; ++l) {
    const auto q = primitive_prime(2, 1, pow_int(2, l));
    level.push_back(std::get<Int>(q));
  }
  level.push_back(fermat_partner(p0));
  Witness w;
  w.kind = WitnessKind::sierpinski;
  w.a = 2;
  w.r = r;
  w.tau = tau;
  w.ledger.push_back({Congruence(from_u64(found->k), p0), "ten-primes"});
  for (const Int& q : level) w.ledger.push_back({Congruence(r, lemma1_modulus(r, q)), "digits-agree"});
  w.ledger.push_back({Congruence(r, lemma1_modulus(r, 2)), "parity"});
  w.covering = binary_primitive_covering(2, tau, p0, level);
  w.signs = witness_detail::uniform_signs(w.covering.primes.size(), w.kind);
  witness_detail::finish(w);
  return w;
}

// ---------------------------------------------------------------------------
// General base a.

inline constexpr unsigned kDefaultTauBudget = 8;

/// Prime factors of a - 1 and the least prime factor of a; every ledger for
/// base a carries C(k,r) ≡ 0 modulo the former and ≡ 1 modulo the latter.
struct BaseSidePrimes {
  std::vector<Int> below;  // primes of a - 1
  Int of_a;
};

inline BaseSidePrimes base_side_primes(const Int& a, const FactorOptions& options = {}) {
  BaseSidePrimes s;
  if (a > 2) s.below = factorize(a - 1, options).primes();
  s.of_a = factorize(a, options).primes().front();
  return s;
}

/// Any r with some odd digit in base p0 (in particular odd r) and base a with
/// a + 1 not a power of 2.
inline Witness witness_oddr(const Int& a, const Int& r, WitnessKind kind, unsigned tau_budget = kDefaultTauBudget,
                            const FactorOptions& options = {}) {
  if (a < 2) throw InvalidArgument("witness_oddr: a must be at least 2");
  if (r < 1 || mpz_even_p(r.get_mpz_t())) throw InvalidArgument("witness_oddr: r must be odd and positive");
  if (kind == WitnessKind::both) throw InvalidArgument("witness_oddr: kind must be sierpinski or riesel");
  const Int a1 = a + 1;
  if (mpz_popcount(a1.get_mpz_t()) == 1)
    throw HypothesisFailed("a + 1 = " + a1.get_str() + " is a power of 2");

  unsigned tau = 0;
  std::vector<Int> top;
  for (unsigned l = 1; l <= tau_budget && tau == 0; ++l) {
    top = primitive_primes(a, 1, pow_int(2, l), options).primes;
    if (top.size() >= 2) tau = l;
  }
  if (tau == 0)
    throw HypothesisFailed("no level 2^tau with tau <= " + std::to_string(tau_budget) +
                           " has two primitive prime divisors of a^(2^tau) - 1");
  std::vector<Int> level;
  for (unsigned l = 1; l < tau; ++l) {
    const auto set = primitive_primes(a, 1, pow_int(2, l), options).primes;
    if (set.empty()) throw HypothesisFailed("a^(2^" + std::to_string(l) + ") - 1 has no primitive prime");
    level.push_back(set.front());
  }
  const Int p0 = top[0];
  level.push_back(top[1]);

  const BaseSidePrimes side = base_side_primes(a, options);
  Witness w;
  w.kind = kind;
  w.a = a;
  w.r = r;
  w.tau = tau;
  for (const Int& q : side.below) w.ledger.push_back({Congruence(0, lemma1_modulus(r, q)), "vanish"});
  w.ledger.push_back({Congruence(r, lemma1_modulus(r, side.of_a)), "base-prime"});

  auto to_minus_one = [&](const Int& q) {
    const DigitVector d = digits_base(r, q);
    std::size_t i0 = 0;
    while (mpz_even_p(d.digit(i0).get_mpz_t())) ++i0;
    return LedgerEntry{shift_congruence_single(r, q, i0, q - 1), "digit-shift@" + std::to_string(i0)};
  };
  auto to_one = [&](const Int& q) { return LedgerEntry{Congruence(r, lemma1_modulus(r, q)), "digits-agree"}; };
  const bool sierpinski = kind == WitnessKind::sierpinski;
  w.ledger.push_back(sierpinski ? to_minus_one(p0) : to_one(p0));
  for (const Int& q : level) w.ledger.push_back(sierpinski ? to_one(q) : to_minus_one(q));

  w.covering = binary_primitive_covering(a, tau, p0, level);
  w.signs = witness_detail::uniform_signs(w.covering.primes.size(), kind);
  witness_detail::finish(w);
  return w;
}

/// Infinite family of r from an (a,1)-primitive m-covering: R fixes the
/// residue of C(k,r) modulo every prime, r ≡ 1 past the digits of R, and k
/// copies R into the low digits of r.
inline Witness witness_infr(const PrimitiveCovering& pc, WitnessKind kind, const FactorOptions& options = {}) {
  if (pc.b != 1) throw InvalidArgument("witness_infr: covering must be (a,1)-primitive");
  const PrimitiveCoveringCheck check = check_primitive_covering(pc);
  if (!check.ok) throw InvalidArgument("witness_infr: " + check.reason);
  const std::size_t n = pc.covering.classes.size();
  const unsigned m = pc.multiplicity;
  std::vector<int> signs;
  unsigned per_group = m;
  if (kind == WitnessKind::both) {
    if (!pc.partition) throw PartitionMissing("witness_infr: kind both needs a disjoint covering with a partition");
    if (m < 2) throw InvalidArgument("witness_infr: kind both needs m >= 2");
    signs.assign(n, 0);
    const std::size_t half = m / 2;
    for (std::size_t part = 0; part < pc.partition->size(); ++part) {
      const int s = part < half ? 1 : (part >= m - half ? -1 : 0);
      for (std::size_t idx : (*pc.partition)[part]) signs[idx] = s;
    }
    per_group = static_cast<unsigned>(half);
  } else {
    signs = witness_detail::uniform_signs(n, kind);
  }

  const Int& a = pc.a;
  const BaseSidePrimes side = base_side_primes(a, options);
  for (const Int& q : pc.primes)
    if (mpz_divisible_p(a.get_mpz_t(), q.get_mpz_t()) || (a > 2 && mpz_divisible_p(Int(a - 1).get_mpz_t(), q.get_mpz_t())))
      throw HypothesisFailed("covering prime " + q.get_str() + " divides a(a - 1)");

  // C(k,r)·a^n + 1 ≡ 0 on class q (mod m_l) needs R ≡ -a^(-q); the Riesel
  // sign needs R ≡ +a^(-q).
  std::vector<Congruence> system;
  std::vector<Int> primes;
  for (std::size_t i = 0; i < n; ++i) {
    if (signs[i] == 0) continue;
    const Int& q = pc.primes[i];
    const Int inv = mod_inv(mod_pow(a, from_u64(pc.covering.classes[i].residue), q), q);
    system.emplace_back(signs[i] > 0 ? Int(q - inv) : inv, q);
    primes.push_back(q);
  }
  for (const Int& q : side.below) {
    system.emplace_back(0, q);
    primes.push_back(q);
  }
  system.emplace_back(1, side.of_a);
  primes.push_back(side.of_a);
  const Int R = crt(system).residue;

  auto width = [&](const Int& value) {
    // Least J with value < q^(J+1) for every prime q.
    unsigned long j = 0;
    for (const Int& q : primes) {
      unsigned long jq = 0;
      Int bound = q;
      while (bound <= value) {
        bound *= q;
        ++jq;
      }
      j = std::max(j, jq);
    }
    return j;
  };
  auto modulus = [&](unsigned long j) {
    Int mod = 1;
    for (const Int& q : primes) mod *= pow_int(q, j + 1);
    return mod;
  };
  const unsigned long j1 = width(R);
  const Int m1 = modulus(j1);
  const Int r = 1 + ((R - 1) / m1 + 1) * m1;
  const unsigned long j2 = width(r);

  Witness w;
  w.kind = kind;
  w.a = a;
  w.r = r;
  w.R = R;
  w.m = per_group;
  w.covering = pc;
  w.signs = std::move(signs);
  for (const Int& q : primes) w.ledger.push_back({Congruence(r + R - 1, pow_int(q, j2 + 1)), "R-digits"});
  witness_detail::finish(w);
  return w;
}

}  // namespace covercert
