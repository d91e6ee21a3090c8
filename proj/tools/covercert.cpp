// covercert: digit tables modulo 641, witness construction for binomial
// Sierpiński/Riesel numbers, and certificate verification.
//
// Exit codes: 0 success / verified, 1 refuted or computational failure,
// 2 malformed input, 64 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "covercert/covercert.hpp"

namespace {

using namespace covercert;

constexpr int kExitRefuted = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitUsage = 64;

struct Config {
  std::string out;
  u64 seed = 0;
  unsigned jobs = 1;
  std::string cache_dir;
  bool recompute = false;
  bool no_cache = false;
  bool verbose = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + cfg.out);
  out << text;
}

Int parse_arg(const std::string& text, const char* what) {
  try {
    return parse_int(text);
  } catch (const InvalidArgument&) {
    throw UsageError(std::string(what) + " must be a nonnegative decimal integer, got '" + text + "'");
  }
}

std::optional<TableCache> make_cache(const Config& cfg) {
  if (cfg.no_cache) return std::nullopt;
  return TableCache(cfg.cache_dir.empty() ? TableCache::default_directory() : std::filesystem::path(cfg.cache_dir),
                    cfg.recompute);
}

TableOptions table_options(const Config& cfg) { return TableOptions{cfg.jobs, cfg.seed}; }

GTable load_g(const Config& cfg) {
  const auto cache = make_cache(cfg);
  return cached_G(cache ? &*cache : nullptr, kBasePrime, table_options(cfg));
}

std::string decimal(const mpq_class& q, int places) {
  mpf_class f(q, 256);
  std::ostringstream out;
  out << std::fixed << std::setprecision(places) << f;
  return out.str();
}

// ---------------------------------------------------------------- subcommands

int run_tables_g(const Config& cfg) {
  const GTable g = load_g(cfg);
  u64 odd = 0;
  for (u64 m : g.members) odd += m % 2;
  std::ostringstream out;
  out << "members " << g.members.size() << "\n"
      << "odd-members " << odd << "/" << (g.p - 1) / 2 << "\n";
  const std::string table = serialize_table(to_table_file(g));
  if (cfg.out.empty()) {
    std::cout << out.str() << table;
  } else {
    emit(cfg, table);
    std::cout << out.str();
  }
  return 0;
}

int run_tables_pairs(const Config& cfg) {
  const auto cache = make_cache(cfg);
  const TableCache* c = cache ? &*cache : nullptr;
  const GTable g = cached_G(c, kBasePrime, table_options(cfg));
  const PairTable pt = cached_pairs(c, g, kPairLimit, table_options(cfg));
  const DigitCensus census(g, pt);
  const Int below_square = from_u64(g.p * g.p - 1);
  const auto unsolved = pt.unsolved_within_limit();
  std::ostringstream out;
  out << "bad " << pt.bad.size() << "\n"
      << "badbad " << pt.badbad.size() << "\n"
      << "failing-integers " << census.failing_count(below_square).get_str() << " of " << below_square.get_str()
      << "\n"
      << "unsolved-pairs-within " << pt.limit << " " << unsolved.size() << "\n";
  if (cfg.out.empty()) {
    std::cout << out.str();
  } else {
    emit(cfg, serialize_table(badbad_table_file(pt)));
    std::cout << out.str();
  }
  return 0;
}

int run_tables_tenprimes(const Config& cfg) {
  const auto cache = make_cache(cfg);
  auto progress = [&](u64 done) {
    if (done % 64 == 0 || done == kBasePrime - 1) std::cerr << "tenprimes: " << done << "/" << kBasePrime - 1 << "\n";
  };
  const TenPrimesWitness w = cached_ten_primes(cache ? &*cache : nullptr, table_options(cfg), progress);
  std::map<u64, u64> per_prime;
  u64 checked = 0;
  for (const auto& a : w.assignments) {
    ++per_prime[a.p];
    if (binom_mod_p(from_u64(a.k), from_u64(a.r), a.p) == a.p - 1) ++checked;
  }
  std::ostringstream out;
  out << "assigned " << w.assignments.size() << "/" << kBasePrime - 1 << "\n"
      << "lucas-verified " << checked << "\n";
  for (const auto& [p, n] : per_prime) out << "prime " << p << " " << n << "\n";
  const std::string table = serialize_table(to_table_file(w));
  if (cfg.out.empty()) {
    std::cout << out.str() << table;
  } else {
    emit(cfg, table);
    std::cout << out.str();
  }
  return checked == w.assignments.size() ? 0 : kExitRefuted;
}

int run_tables_exceptions(const Config& cfg, const std::string& bound_text) {
  const Int bound = parse_arg(bound_text, "--bound");
  if (bound < 1 || bound > from_u64(kBasePrime * kBasePrime)) throw UsageError("--bound must lie in [1, 641^2]");
  const auto cache = make_cache(cfg);
  const TableCache* c = cache ? &*cache : nullptr;
  const GTable g = cached_G(c, kBasePrime, table_options(cfg));
  const PairTable pt = cached_pairs(c, g, kPairLimit, table_options(cfg));
  const ExceptionCensus census = DigitCensus(g, pt).count_exceptional(to_u64(bound));
  std::ostringstream out;
  out << "bound " << census.bound << "\n"
      << "exceptions " << census.count() << "\n"
      << "list";
  for (u64 r : census.exceptions) out << ' ' << r;
  out << "\n";
  emit(cfg, out.str());
  return 0;
}

int run_density(const Config& cfg, const std::string& x_text, const std::string& j_text, const std::string& kind_text) {
  if (x_text.empty() == j_text.empty()) throw UsageError("give exactly one of --x and --bound");
  std::ostringstream out;
  if (!j_text.empty()) {
    const Int j = parse_arg(j_text, "--bound");
    if (j > 100000) throw UsageError("--bound is limited to 100000");
    const mpq_class q = density_bound(to_u64(j));
    out << "j " << j.get_str() << "\n"
        << "failing-fraction-bound " << q.get_str() << "\n"
        << "decimal " << decimal(q, 12) << "\n";
  } else {
    const Int x = parse_arg(x_text, "--x");
    if (x < 1) throw UsageError("--x must be positive");
    const DensityKind kind = kind_text == "riesel" ? DensityKind::riesel : DensityKind::sierpinski;
    if (kind_text != "riesel" && kind_text != "sierpinski") throw UsageError("--kind must be sierpinski or riesel");
    const auto cache = make_cache(cfg);
    const TableCache* c = cache ? &*cache : nullptr;
    const GTable g = cached_G(c, kBasePrime, table_options(cfg));
    const PairTable pt = cached_pairs(c, g, kPairLimit, table_options(cfg));
    const DigitCensus census(g, pt);
    const Int count = census.density_count(x, kind);
    mpq_class fraction(count, x);
    fraction.canonicalize();
    out << "x " << x.get_str() << "\n"
        << "kind " << kind_text << "\n"
        << "satisfying " << count.get_str() << "\n"
        << "failing " << Int(x - count).get_str() << "\n"
        << "fraction " << fraction.get_str() << "\n"
        << "decimal " << decimal(fraction, 12) << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

struct WitnessArgs {
  std::string r;
  std::string a = "2";
  std::string kind = "sierpinski";
  std::string covering;
  unsigned tau_budget = kDefaultTauBudget;
};

Witness make_witness(const Config& cfg, const WitnessArgs& args) {
  const WitnessKind kind = parse_kind(args.kind);
  if (!args.covering.empty()) {
    const CoveringFile file = parse_covering(read_file(args.covering));
    PrimitiveCovering pc = file.primes ? file.to_primitive() : attach_primitive_primes(file.covering, file.a, file.b);
    if (!file.primes) {
      pc.multiplicity = file.m;
      if (file.groups.size() > 1) pc.partition = file.groups;
    }
    return witness_infr(pc, kind);
  }
  if (args.r.empty()) throw UsageError("witness needs --r (or --covering for the infinite-r family)");
  const Int r = parse_arg(args.r, "--r");
  const Int a = parse_arg(args.a, "--a");
  if (r < 1) throw UsageError("--r must be positive");
  if (kind == WitnessKind::both) throw UsageError("--kind both needs --covering with a partitioned covering");
  if (a == 2 && kind == WitnessKind::sierpinski) {
    const DigitTables tables(load_g(cfg));
    if (choose_digits(r, tables)) return witness_sierpinski(r, tables);
    if (r < from_u64(kBasePrime)) return witness_small_r(r, RootOptions{cfg.seed});
    if (mpz_odd_p(r.get_mpz_t())) return witness_oddr(a, r, kind, args.tau_budget);
    throw ConditionUnsatisfied("r = " + r.get_str() + " has no good digit and no solvable digit pair base 641");
  }
  if (mpz_even_p(r.get_mpz_t()))
    throw ConditionUnsatisfied("for this base and kind only odd r are covered; r = " + r.get_str() + " is even");
  return witness_oddr(a, r, kind, args.tau_budget);
}

int run_witness(const Config& cfg, const WitnessArgs& args) {
  const Witness w = make_witness(cfg, args);
  if (cfg.verbose) {
    std::cerr << "witness: tau " << w.tau << ", " << w.ledger.size() << " ledger congruences";
    if (w.R) std::cerr << ", R = " << w.R->get_str();
    std::cerr << "\n";
  }
  emit(cfg, serialize(build_certificate(w)));
  return 0;
}

int run_verify(const Config& cfg, const std::string& path, bool lenient) {
  Certificate c;
  try {
    c = parse_certificate(read_file(path), ParseOptions{lenient});
  } catch (const MalformedCertificate& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitMalformed;
  }
  const VerificationReport report = verify_certificate(c);
  if (lenient) {
    std::cerr << report.render();
    if (report.verified()) emit(cfg, serialize(c));
  } else {
    emit(cfg, report.render());
  }
  return report.verified() ? 0 : kExitRefuted;
}

int run_covering_verify(const Config& cfg, const std::string& path, unsigned m, const std::string& a_text,
                        const std::string& b_text) {
  CoveringFile file = parse_covering(read_file(path));
  if (!a_text.empty()) file.a = parse_arg(a_text, "--a");
  if (!b_text.empty()) file.b = parse_arg(b_text, "--b");
  std::ostringstream out;
  const CoverageReport coverage = verify_covering(file.covering, m);
  out << "period " << coverage.period << "\n"
      << "multiplicity " << coverage.min_multiplicity << " (max " << coverage.max_multiplicity << ")\n"
      << "covered " << (coverage.covered ? "yes" : "no") << " for m = " << m << "\n";
  bool ok = coverage.covered;
  if (!coverage.covered) out << "weakest-n " << coverage.weakest_n << "\n";
  const bool primitive_requested = file.primes.has_value() || !a_text.empty();
  if (ok && primitive_requested) {
    PrimitiveCovering pc;
    if (file.primes) {
      pc = file.to_primitive();
      pc.multiplicity = m;
    } else {
      try {
        pc = attach_primitive_primes(file.covering, file.a, file.b);
      } catch (const NoAssignment& e) {
        out << "primitive no: " << e.name() << ": " << e.what() << "\n";
        emit(cfg, out.str());
        return kExitRefuted;
      }
      pc.multiplicity = m;
      if (file.groups.size() > 1) pc.partition = file.groups;
    }
    const PrimitiveCoveringCheck check = check_primitive_covering(pc);
    out << "primitive " << (check.ok ? "yes" : "no: " + check.reason) << "\n";
    out << "primes";
    for (const Int& q : pc.primes) out << ' ' << q.get_str();
    out << "\n";
    if (pc.partition) out << "disjoint-parts " << pc.partition->size() << "\n";
    ok = check.ok;
  }
  emit(cfg, out.str());
  return ok ? 0 : kExitRefuted;
}

int run_zsigmondy(const Config& cfg, const std::string& a_text, const std::string& b_text, const std::string& n_text) {
  const Int a = parse_arg(a_text, "--a");
  const Int b = parse_arg(b_text, "--b");
  const Int n = parse_arg(n_text, "--n");
  if (b < 1 || a <= b) throw UsageError("need a > b >= 1");
  if (n < 2) throw UsageError("--n must be at least 2");
  std::ostringstream out;
  const PrimitivePrimeResult result = primitive_prime(a, b, n);
  if (std::holds_alternative<ZsigmondyException>(result)) {
    out << "exception (a,b,n) = (" << a.get_str() << "," << b.get_str() << "," << n.get_str()
        << "): no primitive prime divisor\n";
  } else {
    const Int& q = std::get<Int>(result);
    const Int ratio = mod_floor(a * mod_inv(b, q), q);
    out << "primitive-prime " << q.get_str() << "\n"
        << "order " << mult_order(ratio, q).get_str() << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "covercert: binomial coefficients C(k,r) that are Sierpinski or Riesel numbers, built from covering "
      "systems and Lucas' theorem, with independently checkable certificates."};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--out", cfg.out, "Write the primary output to this file instead of stdout");
  app.add_option("--seed", cfg.seed, "Seed for randomized root splitting (results do not depend on it)");
  app.add_option("--jobs", cfg.jobs, "Worker threads for table searches")->check(CLI::Range(1U, 256U));
  app.add_option("--cache", cfg.cache_dir, "Table cache directory (default: $COVERCERT_CACHE or ./.covercert-cache)");
  app.add_flag("--recompute", cfg.recompute, "Ignore cached tables and rebuild them");
  app.add_flag("--no-cache", cfg.no_cache, "Neither read nor write cached tables");
  app.add_flag("-v,--verbose", cfg.verbose, "Extra diagnostics on stderr");

  std::function<int()> action;

  auto* tables = app.add_subcommand("tables", "Digit tables modulo 641");
  tables->require_subcommand(1);
  tables->add_subcommand("g", "Good-digit lemma: digits g in [1,640] with C(k,g) = -1 (mod 641) solvable, and least k")
      ->callback([&] { action = [&] { return run_tables_g(cfg); }; });
  tables
      ->add_subcommand("pairs",
                       "Digit-pair lemma: ordered pairs of bad digits with no k', k'' making "
                       "C(k',r')C(k'',r'') = -1 (mod 641); every pair within [1,515] is solvable")
      ->callback([&] { action = [&] { return run_tables_pairs(cfg); }; });
  tables
      ->add_subcommand("tenprimes",
                       "Ten-primes lemma: every r in [1,640] has C(k,r) = -1 modulo one of eleven Fermat-number "
                       "divisors")
      ->callback([&] { action = [&] { return run_tables_tenprimes(cfg); }; });
  std::string bound_text;
  auto* exceptions = tables->add_subcommand(
      "exceptions", "Census of r whose base-641 digits admit neither a good digit nor a solvable digit pair");
  exceptions->add_option("--bound", bound_text, "Count r in [1, bound], bound <= 641^2")->required();
  exceptions->callback([&] { action = [&] { return run_tables_exceptions(cfg, bound_text); }; });

  std::string x_text, j_text, density_kind = "sierpinski";
  auto* density = app.add_subcommand(
      "density", "Exact digit-DP count of r <= x having a base-641 witness, or the closed-form bound on the failing fraction");
  density->add_option("--x", x_text, "Count r in [1, x]");
  density->add_option("--bound", j_text, "Failing-fraction bound for [1, 641^(j+1) - 1]");
  density->add_option("--kind", density_kind, "sierpinski or riesel");
  density->callback([&] { action = [&] { return run_density(cfg, x_text, j_text, density_kind); }; });

  WitnessArgs wargs;
  auto* witness = app.add_subcommand(
      "witness",
      "Construct k (and for --covering also r) with C(k,r)a^n +/- 1 composite for all n: base-641 digit "
      "construction, ten-primes construction for r < 641, odd-r construction for base a, or the infinite-r "
      "family from a primitive covering. Prints a certificate.");
  witness->add_option("--r", wargs.r, "The fixed r");
  witness->add_option("--a", wargs.a, "Base a >= 2 (default 2)");
  witness->add_option("--kind", wargs.kind, "sierpinski, riesel or both");
  witness->add_option("--covering", wargs.covering, "Covering file: build the infinite-r family witness");
  witness->add_option("--tau-budget", wargs.tau_budget, "Largest level 2^tau searched for base a");
  witness->callback([&] { action = [&] { return run_witness(cfg, wargs); }; });

  std::string in_path;
  auto* certify = app.add_subcommand(
      "certify", "Canonicalize a hand-assembled certificate (any line order, period optional) and verify it");
  certify->add_option("--in", in_path, "Certificate file")->required();
  certify->callback([&] { action = [&] { return run_verify(cfg, in_path, true); }; });

  auto* verify = app.add_subcommand(
      "verify", "Verify a canonical certificate from scratch: coverage, divisibility over a full period, "
                "magnitude, gcd and power-of-a side conditions. Exit 0 verified, 1 refuted, 2 malformed");
  verify->add_option("--in", in_path, "Certificate file")->required();
  verify->callback([&] { action = [&] { return run_verify(cfg, in_path, false); }; });

  auto* covering = app.add_subcommand("covering", "Covering systems of congruences");
  covering->require_subcommand(1);
  unsigned cover_m = 1;
  std::string cover_a, cover_b;
  auto* cover_verify = covering->add_subcommand(
      "verify", "Check that the classes m-cover the integers and, with primes or --a, that they form an "
                "(a,b)-primitive covering");
  cover_verify->add_option("--in", in_path, "Covering file")->required();
  cover_verify->add_option("--m", cover_m, "Required multiplicity")->required()->check(CLI::Range(1U, 1000U));
  cover_verify->add_option("--a", cover_a, "Base a (overrides the file)");
  cover_verify->add_option("--b", cover_b, "Base b (overrides the file)");
  cover_verify->callback([&] { action = [&] { return run_covering_verify(cfg, in_path, cover_m, cover_a, cover_b); }; });

  std::string za, zb, zn;
  auto* zsig = app.add_subcommand(
      "zsigmondy", "Zsigmondy's theorem: least primitive prime divisor of a^n - b^n, or the exception marker");
  zsig->add_option("--a", za, "a")->required();
  zsig->add_option("--b", zb, "b")->required();
  zsig->add_option("--n", zn, "n")->required();
  zsig->callback([&] { action = [&] { return run_zsigmondy(cfg, za, zb, zn); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitMalformed;
  } catch (const covercert::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitRefuted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRefuted;
  }
}
