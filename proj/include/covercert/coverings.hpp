#pragma once

// Covering systems on the exponent n: construction of the binary covering
// {0 mod 2^tau} ∪ {2^(l-1) mod 2^l}, exhaustive multiplicity checks over one
// period, and (a,b)-primitive coverings whose classes carry distinct
// primitive prime divisors of a^m - b^m.

#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "covercert/factorbase.hpp"

namespace covercert {

/// n ≡ residue (mod modulus), residue in [0, modulus).
struct ResidueClass {
  u64 residue = 0;
  u64 modulus = 1;

  bool contains(u64 n) const { return n % modulus == residue; }
  friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
};

struct CoveringSystem {
  std::vector<ResidueClass> classes;

  friend bool operator==(const CoveringSystem&, const CoveringSystem&) = default;
};

inline constexpr u64 kDefaultPeriodLimit = 100'000'000;

inline CoveringSystem standard_binary_covering(unsigned tau) {
  if (tau < 1 || tau > 62) throw InvalidArgument("standard_binary_covering: tau must lie in [1, 62]");
  CoveringSystem c;
  c.classes.push_back({0, u64{1} << tau});
  for (unsigned l = 1; l <= tau; ++l) c.classes.push_back({u64{1} << (l - 1), u64{1} << l});
  return c;
}

/// lcm of the moduli; PeriodTooLarge above `limit`.
inline u64 covering_period(const CoveringSystem& c, u64 limit = kDefaultPeriodLimit) {
  u64 period = 1;
  for (const auto& cls : c.classes) {
    if (cls.modulus == 0) throw InvalidArgument("covering modulus must be positive");
    const u64 g = std::gcd(period, cls.modulus);
    const u128 next = static_cast<u128>(period / g) * cls.modulus;
    if (next > limit) throw PeriodTooLarge("covering period exceeds " + std::to_string(limit));
    period = static_cast<u64>(next);
  }
  return period;
}

struct CoverageReport {
  bool covered = false;  // min_multiplicity >= requested m
  unsigned min_multiplicity = 0;
  unsigned max_multiplicity = 0;
  u64 period = 1;
  /// Least n in [0, period) attaining the minimum.
  u64 weakest_n = 0;
};

/// Counts, for every n in one period, how many classes contain n.
inline CoverageReport verify_covering(const CoveringSystem& c, unsigned m, u64 period_limit = kDefaultPeriodLimit) {
  if (c.classes.empty()) throw InvalidArgument("verify_covering: empty covering");
  if (c.classes.size() > 65535) throw InvalidArgument("verify_covering: too many classes");
  CoverageReport report;
  report.period = covering_period(c, period_limit);
  report.min_multiplicity = ~0U;
  const u64 chunk = std::min<u64>(report.period, u64{1} << 20);
  std::vector<std::uint16_t> count(chunk);
  for (u64 start = 0; start < report.period; start += chunk) {
    const u64 len = std::min(chunk, report.period - start);
    std::fill(count.begin(), count.begin() + static_cast<std::ptrdiff_t>(len), 0);
    for (const auto& cls : c.classes) {
      const u64 r = cls.residue % cls.modulus;
      const u64 offset = (r + cls.modulus - start % cls.modulus) % cls.modulus;
      for (u64 i = offset; i < len; i += cls.modulus) ++count[i];
    }
    for (u64 i = 0; i < len; ++i) {
      if (count[i] < report.min_multiplicity) {
        report.min_multiplicity = count[i];
        report.weakest_n = start + i;
      }
      report.max_multiplicity = std::max<unsigned>(report.max_multiplicity, count[i]);
    }
  }
  report.covered = report.min_multiplicity >= m;
  return report;
}

/// A covering whose classes carry pairwise distinct primes, prime l being a
/// primitive divisor of a^(m_l) - b^(m_l).
struct PrimitiveCovering {
  Int a = 2;
  Int b = 1;
  CoveringSystem covering;
  std::vector<Int> primes;  // aligned with covering.classes
  unsigned multiplicity = 1;
  /// Index sets of the parts of a disjoint covering.
  std::optional<std::vector<std::vector<std::size_t>>> partition;
};

/// Assigns distinct primitive primes to the classes, preferring the least
/// prime and backtracking on collisions.
inline PrimitiveCovering attach_primitive_primes(const CoveringSystem& c, const Int& a, const Int& b,
                                                 const FactorOptions& options = {}) {
  if (b < 1 || a <= b) throw InvalidArgument("attach_primitive_primes: need a > b >= 1");
  if (gcd(a, b) != 1) throw NotCoprime("attach_primitive_primes: gcd(a, b) must be 1");
  const CoverageReport coverage = verify_covering(c, 1);
  if (!coverage.covered)
    throw InvalidArgument("attach_primitive_primes: n = " + std::to_string(coverage.weakest_n) + " is not covered");
  std::map<u64, std::vector<Int>> candidates;
  for (const auto& cls : c.classes) {
    if (candidates.count(cls.modulus) != 0) continue;
    auto& list = candidates[cls.modulus];
    list = primitive_primes(a, b, from_u64(cls.modulus), options).primes;
  }
  std::vector<Int> chosen(c.classes.size());
  std::set<Int> used;
  std::function<bool(std::size_t)> assign = [&](std::size_t i) {
    if (i == c.classes.size()) return true;
    for (const Int& q : candidates[c.classes[i].modulus]) {
      if (used.count(q) != 0) continue;
      used.insert(q);
      chosen[i] = q;
      if (assign(i + 1)) return true;
      used.erase(q);
    }
    return false;
  };
  if (!assign(0))
    throw NoAssignment("no distinct primitive primes of a^m - b^m for every class (a=" + a.get_str() +
                       ", b=" + b.get_str() + ")");
  PrimitiveCovering pc;
  pc.a = a;
  pc.b = b;
  pc.covering = c;
  pc.primes = std::move(chosen);
  pc.multiplicity = coverage.min_multiplicity;
  return pc;
}

/// Each part is itself a 1-covering and the parts partition the class indices.
inline bool verify_partition(const PrimitiveCovering& pc) {
  if (!pc.partition) throw PartitionMissing("verify_partition: covering carries no partition");
  std::vector<int> seen(pc.covering.classes.size(), 0);
  for (const auto& part : *pc.partition) {
    if (part.empty()) return false;
    CoveringSystem sub;
    for (std::size_t idx : part) {
      if (idx >= seen.size() || seen[idx]++ != 0) return false;
      sub.classes.push_back(pc.covering.classes[idx]);
    }
    if (!verify_covering(sub, 1).covered) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

struct PrimitiveCoveringCheck {
  bool ok = false;
  std::string reason;  // empty when ok
  CoverageReport coverage;
};

/// Full invariant check of an (a,b)-primitive (disjoint) m-covering.
inline PrimitiveCoveringCheck check_primitive_covering(const PrimitiveCovering& pc) {
  PrimitiveCoveringCheck check;
  auto fail = [&](std::string why) {
    check.reason = std::move(why);
    return check;
  };
  if (pc.covering.classes.empty()) return fail("empty covering");
  if (pc.primes.size() != pc.covering.classes.size()) return fail("prime list does not match classes");
  if (pc.b < 1 || pc.a <= pc.b || gcd(pc.a, pc.b) != 1) return fail("need coprime a > b >= 1");
  check.coverage = verify_covering(pc.covering, pc.multiplicity);
  if (!check.coverage.covered)
    return fail("n = " + std::to_string(check.coverage.weakest_n) + " lies in only " +
                std::to_string(check.coverage.min_multiplicity) + " classes");
  std::set<Int> distinct(pc.primes.begin(), pc.primes.end());
  if (distinct.size() != pc.primes.size()) return fail("primes are not pairwise distinct");
  for (std::size_t i = 0; i < pc.primes.size(); ++i) {
    const Int& q = pc.primes[i];
    if (!is_prime(q)) return fail(q.get_str() + " is not prime");
    if (mpz_divisible_p(pc.b.get_mpz_t(), q.get_mpz_t()) != 0) return fail(q.get_str() + " divides b");
    const Int ratio = mod_floor(pc.a * mod_inv(pc.b, q), q);
    if (!has_order(ratio, q, from_u64(pc.covering.classes[i].modulus)))
      return fail(q.get_str() + " is not a primitive divisor for modulus " +
                  std::to_string(pc.covering.classes[i].modulus));
  }
  if (pc.partition) {
    if (pc.partition->size() != pc.multiplicity) return fail("partition must have exactly m parts");
    if (!verify_partition(pc)) return fail("partition parts are not disjoint 1-coverings");
  }
  check.ok = true;
  return check;
}

// ------------------------------------------------------------ covering file

struct CoveringFile {
  Int a = 2;
  Int b = 1;
  unsigned m = 1;
  CoveringSystem covering;
  std::optional<std::vector<Int>> primes;
  std::vector<std::vector<std::size_t>> groups;  // blank-line separated

  PrimitiveCovering to_primitive() const {
    if (!primes) throw InvalidArgument("covering file carries no primes");
    PrimitiveCovering pc;
    pc.a = a;
    pc.b = b;
    pc.covering = covering;
    pc.primes = *primes;
    pc.multiplicity = m;
    if (groups.size() > 1) pc.partition = groups;
    return pc;
  }
};

inline CoveringFile parse_covering(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw MalformedCovering(0, "empty input");
  CoveringFile file;
  {
    std::istringstream head(line);
    std::string magic, version, fa, fb, fm, extra;
    if (!(head >> magic >> version >> fa >> fb >> fm) || (head >> extra) || magic != "covercert-covering" ||
        version != "v1" || fa.rfind("a=", 0) != 0 || fb.rfind("b=", 0) != 0 || fm.rfind("m=", 0) != 0)
      throw MalformedCovering(1, "expected 'covercert-covering v1 a=<a> b=<b> m=<m>'");
    try {
      file.a = parse_int(fa.substr(2));
      file.b = parse_int(fb.substr(2));
      const Int m = parse_int(fm.substr(2));
      if (m < 1 || m > 1000) throw MalformedCovering(1, "multiplicity out of range");
      file.m = static_cast<unsigned>(m.get_ui());
    } catch (const InvalidArgument& e) {
      throw MalformedCovering(1, e.what());
    }
  }
  std::vector<Int> primes;
  int with_prime = -1;
  bool new_group = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      new_group = true;
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    if (parts.size() < 2 || parts.size() > 3) throw MalformedCovering(lineno, "expected 'residue modulus [prime]'");
    const int has_prime = parts.size() == 3 ? 1 : 0;
    if (with_prime != -1 && with_prime != has_prime)
      throw MalformedCovering(lineno, "either every class carries a prime or none does");
    with_prime = has_prime;
    ResidueClass cls;
    try {
      const Int residue = parse_int(parts[0]);
      const Int modulus = parse_int(parts[1]);
      if (modulus < 1 || !fits_u64(modulus)) throw MalformedCovering(lineno, "modulus out of range");
      if (residue >= modulus) throw MalformedCovering(lineno, "residue must be below the modulus");
      cls = {to_u64(residue), to_u64(modulus)};
      if (has_prime) primes.push_back(parse_int(parts[2]));
    } catch (const InvalidArgument& e) {
      throw MalformedCovering(lineno, e.what());
    }
    if (new_group) {
      file.groups.emplace_back();
      new_group = false;
    }
    file.groups.back().push_back(file.covering.classes.size());
    file.covering.classes.push_back(cls);
  }
  if (file.covering.classes.empty()) throw MalformedCovering(lineno, "no congruences");
  if (with_prime == 1) file.primes = std::move(primes);
  return file;
}

inline std::string serialize_covering(const CoveringFile& file) {
  std::string out = "covercert-covering v1 a=" + file.a.get_str() + " b=" + file.b.get_str() +
                    " m=" + std::to_string(file.m) + "\n";
  auto emit = [&](std::size_t i) {
    const auto& cls = file.covering.classes[i];
    out += std::to_string(cls.residue) + " " + std::to_string(cls.modulus);
    if (file.primes) out += " " + (*file.primes)[i].get_str();
    out += "\n";
  };
  if (file.groups.size() > 1) {
    for (std::size_t g = 0; g < file.groups.size(); ++g) {
      if (g != 0) out += "\n";
      for (std::size_t i : file.groups[g]) emit(i);
    }
  } else {
    for (std::size_t i = 0; i < file.covering.classes.size(); ++i) emit(i);
  }
  return out;
}

inline CoveringFile to_covering_file(const PrimitiveCovering& pc) {
  CoveringFile file;
  file.a = pc.a;
  file.b = pc.b;
  file.m = pc.multiplicity;
  file.covering = pc.covering;
  file.primes = pc.primes;
  if (pc.partition) file.groups = *pc.partition;
  return file;
}

}  // namespace covercert
