#pragma once

// Certificates: a finite record (class, prime, sign per exponent class, plus
// the side conditions) whose acceptance implies C(k,r)·a^n ± 1 is composite
// for every n >= 0. Verification uses only exact arithmetic, Lucas residues
// and primality tests.

#include <algorithm>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "covercert/factorbase.hpp"
#include "covercert/lucas.hpp"
#include "covercert/modmath.hpp"
#include "covercert/witness.hpp"

namespace covercert {

inline constexpr std::string_view kCertificateHeader = "covercert-cert v1";
/// Verification scans every n of one period; longer periods are refused.
inline constexpr u64 kMaxCertificatePeriod = u64{1} << 19;

struct CertificateClass {
  u64 residue = 0;
  u64 modulus = 1;
  Int prime;
  int sign = 1;  // +1: prime | B·a^n + 1, -1: prime | B·a^n - 1

  friend bool operator==(const CertificateClass&, const CertificateClass&) = default;
};

struct CertificateAux {
  Int residue;
  Int modulus;
  std::string tag;

  friend bool operator==(const CertificateAux&, const CertificateAux&) = default;
};

struct Certificate {
  WitnessKind kind = WitnessKind::sierpinski;
  Int a = 2;
  Int r;
  Int k;
  unsigned m = 1;
  u64 period = 1;
  std::vector<CertificateClass> classes;
  std::vector<CertificateAux> aux;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

namespace cert_detail {

inline auto class_key(const CertificateClass& c) { return std::tuple(c.modulus, c.residue, -c.sign, c.prime); }

inline void canonicalize(Certificate& c) {
  std::sort(c.classes.begin(), c.classes.end(),
            [](const auto& x, const auto& y) { return class_key(x) < class_key(y); });
  std::sort(c.aux.begin(), c.aux.end(), [](const auto& x, const auto& y) {
    return std::tie(x.modulus, x.residue, x.tag) < std::tie(y.modulus, y.residue, y.tag);
  });
}

inline u64 lcm_of_moduli(const std::vector<CertificateClass>& classes) {
  u64 period = 1;
  for (const auto& c : classes) {
    if (c.modulus == 0) return 0;
    const u128 next = static_cast<u128>(period / std::gcd(period, c.modulus)) * c.modulus;
    if (next > kMaxCertificatePeriod) return 0;
    period = static_cast<u64>(next);
  }
  return period;
}

}  // namespace cert_detail

inline Certificate build_certificate(const Witness& w) {
  Certificate c;
  c.kind = w.kind;
  c.a = w.a;
  c.r = w.r;
  c.k = w.k;
  c.m = w.m;
  for (std::size_t i = 0; i < w.covering.covering.classes.size(); ++i) {
    if (w.signs[i] == 0) continue;
    const auto& cls = w.covering.covering.classes[i];
    c.classes.push_back({cls.residue, cls.modulus, w.covering.primes[i], w.signs[i]});
  }
  for (const auto& e : w.ledger) c.aux.push_back({e.congruence.residue, e.congruence.modulus, e.tag});
  c.period = cert_detail::lcm_of_moduli(c.classes);
  cert_detail::canonicalize(c);
  return c;
}

// ---------------------------------------------------------------------------
// Text form.
//
//   covercert-cert v1
//   kind <sierpinski|riesel|both>
//   a <int>
//   r <int>
//   k <int>
//   m <int>
//   period <int>
//   class <residue> <modulus> <prime> <+|->     (sorted by modulus, residue, sign, prime)
//   aux <residue> <modulus> <tag>               (sorted by modulus, residue, tag)
//   end

inline std::string serialize(const Certificate& c) {
  std::ostringstream out;
  out << kCertificateHeader << '\n'
      << "kind " << to_string(c.kind) << '\n'
      << "a " << c.a.get_str() << '\n'
      << "r " << c.r.get_str() << '\n'
      << "k " << c.k.get_str() << '\n'
      << "m " << c.m << '\n'
      << "period " << c.period << '\n';
  for (const auto& cls : c.classes)
    out << "class " << cls.residue << ' ' << cls.modulus << ' ' << cls.prime.get_str() << ' '
        << (cls.sign > 0 ? '+' : '-') << '\n';
  for (const auto& x : c.aux) out << "aux " << x.residue.get_str() << ' ' << x.modulus.get_str() << ' ' << x.tag << '\n';
  out << "end\n";
  return out.str();
}

struct ParseOptions {
  /// Accept classes and aux lines in any order, and a missing or stale
  /// period, then canonicalize. Used to assemble certificates by hand.
  bool lenient = false;
};

inline Certificate parse_certificate(std::string_view text, const ParseOptions& options = {}) {
  std::vector<std::string> lines;
  {
    std::string current;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(std::move(current));
        current.clear();
      } else {
        current += ch;
      }
    }
    if (!current.empty()) lines.push_back(std::move(current));
  }
  std::size_t at = 0;
  auto fail = [&](const std::string& why) -> Certificate {
    throw MalformedCertificate(at == 0 ? 0 : at, why);
  };
  auto next_fields = [&](std::string_view key, std::size_t count) {
    if (at >= lines.size()) fail("input ends before '" + std::string(key) + "'");
    const std::string& line = lines[at++];
    std::istringstream in(line);
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    if (fields.empty() || fields[0] != key) fail("expected '" + std::string(key) + "'");
    if (fields.size() != count + 1) fail("'" + std::string(key) + "' takes " + std::to_string(count) + " fields");
    std::string rebuilt = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) rebuilt += " " + fields[i];
    if (rebuilt != line) fail("fields must be separated by single spaces");
    return fields;
  };
  auto number = [&](const std::string& f) {
    try {
      return parse_int(f);
    } catch (const Error& e) {
      fail(e.what());
    }
    return Int(0);
  };
  auto small = [&](const std::string& f) {
    const Int v = number(f);
    if (!fits_u64(v)) fail("value out of range");
    return to_u64(v);
  };

  if (lines.empty()) fail("empty certificate");
  at = 1;
  if (lines[0] != kCertificateHeader) {
    if (lines[0].rfind("covercert-cert ", 0) == 0) fail("unsupported certificate version '" + lines[0] + "'");
    fail("expected header '" + std::string(kCertificateHeader) + "'");
  }
  Certificate c;
  try {
    c.kind = parse_kind(next_fields("kind", 1)[1]);
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }
  c.a = number(next_fields("a", 1)[1]);
  c.r = number(next_fields("r", 1)[1]);
  c.k = number(next_fields("k", 1)[1]);
  const u64 m = small(next_fields("m", 1)[1]);
  if (m < 1 || m > 1000) fail("m out of range");
  c.m = static_cast<unsigned>(m);
  bool have_period = false;
  if (at < lines.size() && lines[at].rfind("period ", 0) == 0) {
    c.period = small(next_fields("period", 1)[1]);
    have_period = true;
  } else if (!options.lenient) {
    ++at;
    fail("expected 'period'");
  }
  for (;;) {
    if (at >= lines.size()) {
      ++at;
      fail("input ends before 'end'");
    }
    const std::string& line = lines[at];
    if (line == "end") {
      ++at;
      break;
    }
    if (line.rfind("class ", 0) == 0) {
      const auto f = next_fields("class", 4);
      CertificateClass cls;
      cls.residue = small(f[1]);
      cls.modulus = small(f[2]);
      cls.prime = number(f[3]);
      if (f[4] != "+" && f[4] != "-") fail("sign must be '+' or '-'");
      cls.sign = f[4] == "+" ? 1 : -1;
      if (!options.lenient && !c.aux.empty()) fail("class lines must precede aux lines");
      if (!options.lenient && !c.classes.empty() &&
          !(cert_detail::class_key(c.classes.back()) < cert_detail::class_key(cls)))
        fail("class lines must be strictly sorted");
      c.classes.push_back(std::move(cls));
    } else if (line.rfind("aux ", 0) == 0) {
      const auto f = next_fields("aux", 3);
      CertificateAux x{number(f[1]), number(f[2]), f[3]};
      if (!options.lenient && !c.aux.empty() &&
          !(std::tie(c.aux.back().modulus, c.aux.back().residue, c.aux.back().tag) <
            std::tie(x.modulus, x.residue, x.tag)))
        fail("aux lines must be strictly sorted");
      c.aux.push_back(std::move(x));
    } else {
      ++at;
      fail("unexpected line");
    }
  }
  if (at != lines.size()) {
    ++at;
    fail("trailing content after 'end'");
  }
  if (options.lenient) {
    cert_detail::canonicalize(c);
    if (!have_period) c.period = cert_detail::lcm_of_moduli(c.classes);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Verification.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  /// B = C(k, r) was materialized; otherwise residues come from Lucas and
  /// magnitude from C(k, r) >= k.
  bool exact = false;
  /// Some class prime exceeds 2^64 and passed only probabilistic testing.
  bool probable_primes = false;

  bool verified() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }

  const CheckResult* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::string render() const {
    std::ostringstream out;
    for (const auto& c : checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name;
      if (!c.detail.empty()) out << ": " << c.detail;
      out << '\n';
    }
    out << "mode: " << (exact ? "exact" : "residue") << (probable_primes ? ", probable primes" : "") << '\n';
    out << "verdict: " << (verified() ? "verified" : "refuted") << '\n';
    return out.str();
  }
};

struct VerifyOptions {
  /// Materialize C(k, r) when min(r, k - r)·bits(k) stays below this.
  u64 exact_bit_limit = u64{1} << 23;
  unsigned primality_rounds = 64;
};

inline VerificationReport verify_certificate(const Certificate& c, const VerifyOptions& options = {}) {
  VerificationReport report;
  auto add = [&](std::string name, bool pass, std::string detail = {}) {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
    return pass;
  };

  // Structure: anything failing here makes the arithmetic checks meaningless.
  {
    std::string why;
    bool has_plus = false, has_minus = false;
    for (const auto& cls : c.classes) (cls.sign > 0 ? has_plus : has_minus) = true;
    if (c.a < 2) why = "a must be at least 2";
    else if (c.r < 1) why = "r must be positive";
    else if (c.k <= c.r) why = "k must exceed r";
    else if (c.classes.empty()) why = "no classes";
    else if (std::any_of(c.classes.begin(), c.classes.end(),
                         [](const auto& x) { return x.modulus == 0 || x.residue >= x.modulus || x.prime < 2; }))
      why = "class with modulus 0, residue out of range, or prime below 2";
    else if (c.kind == WitnessKind::sierpinski && has_minus) why = "sierpinski certificate with a '-' class";
    else if (c.kind == WitnessKind::riesel && has_plus) why = "riesel certificate with a '+' class";
    else if (c.kind == WitnessKind::both && !(has_plus && has_minus)) why = "both certificate needs '+' and '-' classes";
    else if (cert_detail::lcm_of_moduli(c.classes) == 0) why = "period exceeds 2^19";
    else if (cert_detail::lcm_of_moduli(c.classes) != c.period) why = "period is not the lcm of the class moduli";
    if (!add("structure", why.empty(), why)) return report;
  }

  // Primality of class primes.
  {
    std::string why;
    for (const auto& cls : c.classes) {
      const PrimalityResult pr = primality(cls.prime, options.primality_rounds);
      if (!pr.prime) {
        why = cls.prime.get_str() + " is composite";
        break;
      }
      if (!pr.proven) report.probable_primes = true;
    }
    add("primality", why.empty(), why);
  }

  // Coverage: each n of the period lies in m classes of each sign group with
  // pairwise distinct primes.
  {
    std::string why;
    for (int sign : {1, -1}) {
      std::vector<const CertificateClass*> group;
      for (const auto& cls : c.classes)
        if (cls.sign == sign) group.push_back(&cls);
      if (group.empty()) continue;
      std::vector<const Int*> hit;
      for (u64 n = 0; n < c.period && why.empty(); ++n) {
        hit.clear();
        for (const auto* cls : group)
          if (n % cls->modulus == cls->residue &&
              std::none_of(hit.begin(), hit.end(), [&](const Int* q) { return *q == cls->prime; }))
            hit.push_back(&cls->prime);
        if (hit.size() < c.m)
          why = "n = " + std::to_string(n) + " has " + std::to_string(hit.size()) + " distinct '" +
                (sign > 0 ? "+" : "-") + "' primes, need " + std::to_string(c.m);
      }
    }
    add("coverage", why.empty(), why);
  }

  // a^modulus ≡ 1 (mod prime): divisibility at the representative then holds
  // on the whole class.
  {
    std::string why;
    for (std::size_t i = 0; i < c.classes.size() && why.empty(); ++i) {
      const auto& cls = c.classes[i];
      if (mod_pow(mod_floor(c.a, cls.prime), from_u64(cls.modulus), cls.prime) != mod_floor(Int(1), cls.prime))
        why = "class " + std::to_string(i) + ": a^" + std::to_string(cls.modulus) + " is not 1 modulo " +
              cls.prime.get_str();
    }
    add("class-period", why.empty(), why);
  }

  // B = C(k, r), exactly when affordable.
  const Int s = std::min(c.r, Int(c.k - c.r));
  const u64 k_bits = mpz_sizeinbase(c.k.get_mpz_t(), 2);
  report.exact = fits_u64(s) && to_u64(s) <= options.exact_bit_limit / std::max<u64>(k_bits, 1);
  Int B;
  if (report.exact) B = binom_exact(c.k, c.r);
  auto residue_of_B = [&](const Int& q) { return report.exact ? mod_floor(B, q) : binom_mod_p(c.k, c.r, q); };

  std::vector<Int> b_mod(c.classes.size());
  for (std::size_t i = 0; i < c.classes.size(); ++i) b_mod[i] = residue_of_B(c.classes[i].prime);

  if (report.exact) {
    std::string why;
    for (std::size_t i = 0; i < c.classes.size() && why.empty(); ++i)
      if (binom_mod_p(c.k, c.r, c.classes[i].prime) != b_mod[i])
        why = "Lucas residue disagrees with C(k,r) modulo " + c.classes[i].prime.get_str();
    add("lucas", why.empty(), why);
  }

  // Divisibility at each class representative.
  {
    std::string why;
    for (std::size_t i = 0; i < c.classes.size() && why.empty(); ++i) {
      const auto& cls = c.classes[i];
      const Int v = mod_floor(b_mod[i] * mod_pow(mod_floor(c.a, cls.prime), from_u64(cls.residue), cls.prime) +
                                  cls.sign,
                              cls.prime);
      if (v != 0)
        why = "class " + std::to_string(i) + " (" + std::to_string(cls.residue) + " mod " +
              std::to_string(cls.modulus) + "): " + cls.prime.get_str() + " does not divide B·a^" +
              std::to_string(cls.residue) + (cls.sign > 0 ? " + 1" : " - 1");
    }
    add("divisibility", why.empty(), why);
  }

  // Every n of the period, directly.
  {
    std::string why;
    for (std::size_t i = 0; i < c.classes.size() && why.empty(); ++i) {
      const auto& cls = c.classes[i];
      const Int& q = cls.prime;
      const Int a_mod = mod_floor(c.a, q);
      Int power = mod_floor(Int(1), q);  // a^n mod q
      for (u64 n = 0; n < c.period; ++n) {
        if (n % cls.modulus == cls.residue && mod_floor(b_mod[i] * power + cls.sign, q) != 0) {
          why = "n = " + std::to_string(n) + " escapes class " + std::to_string(i) + " prime " + q.get_str();
          break;
        }
        power = mod_floor(power * a_mod, q);
      }
    }
    add("full-period", why.empty(), why);
  }

  // Magnitude: B·a^n ± 1 > prime for all n >= 0.
  {
    std::string why;
    for (const auto& cls : c.classes) {
      const Int need = cls.sign > 0 ? Int(cls.prime) : Int(cls.prime + 1);  // B > need
      const bool ok = report.exact ? B > need : binom_exceeds(c.k, c.r, need);
      if (!ok) {
        why = "C(k,r) does not exceed " + need.get_str();
        break;
      }
    }
    add("magnitude", why.empty(), why);
  }

  // gcd(B ± 1, a - 1) = 1.
  {
    std::string why;
    const Int a1 = c.a - 1;
    const bool plus = c.kind != WitnessKind::riesel;
    const bool minus = c.kind != WitnessKind::sierpinski;
    if (report.exact) {
      if (plus && gcd(B + 1, a1) != 1) why = "gcd(B + 1, a - 1) > 1";
      if (minus && gcd(B - 1, a1) != 1) why = "gcd(B - 1, a - 1) > 1";
    } else if (a1 > 1) {
      for (const Int& q : factorize(a1).primes()) {
        const Int b = binom_mod_p(c.k, c.r, q);
        if (plus && mod_floor(b + 1, q) == 0) why = q.get_str() + " divides B + 1 and a - 1";
        if (minus && mod_floor(b - 1, q) == 0) why = q.get_str() + " divides B - 1 and a - 1";
      }
    }
    add("gcd", why.empty(), why);
  }

  // B is not a power of a.
  {
    bool ok = false;
    if (report.exact) {
      ok = !is_power_of(B, c.a);
    } else {
      // B > 1 by magnitude; a prime of a missing from B settles it.
      for (const Int& q : factorize(c.a).primes())
        if (binom_mod_p(c.k, c.r, q) != 0) ok = true;
    }
    add("not-power", ok, ok ? "" : "C(k,r) may be a power of a");
  }

  if (c.a == 2) {
    const bool odd = report.exact ? mpz_odd_p(B.get_mpz_t()) != 0 : binom_mod_p(c.k, c.r, u64{2}) == 1;
    add("odd", odd, odd ? "" : "C(k,r) is even");
  }

  {
    std::string why;
    for (const auto& x : c.aux) {
      if (x.modulus < 1) {
        why = "aux modulus must be positive";
        break;
      }
      if (mod_floor(c.k - x.residue, x.modulus) != 0) {
        why = "k violates " + x.tag + ": " + x.residue.get_str() + " mod " + x.modulus.get_str();
        break;
      }
    }
    add("ledger", why.empty(), why);
  }
  return report;
}

}  // namespace covercert
