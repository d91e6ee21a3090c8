// Acceptance run: one PASS/FAIL line per criterion AC1..AC10. Runtime
// limits are fixed below; the tool binary is driven through a shell for the
// user-facing reports, the library directly for the deeper checks.
//
//   acceptance [--cli PATH]

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include "covercert/covercert.hpp"

#ifndef COVERCERT_CLI_PATH
#define COVERCERT_CLI_PATH "covercert"
#endif

using namespace covercert;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Runtime limits, seconds.
constexpr double kLimitAC1 = 5;
constexpr double kLimitAC2 = 5 * 60;
constexpr double kLimitAC3 = 15 * 60;
constexpr double kLimitAC4 = 1;
constexpr double kLimitAC5 = 5 * 60;  // no stated limit; generous guard
constexpr double kLimitAC6PerR = 60;
constexpr double kLimitAC7 = 5 * 60;
constexpr double kLimitAC8 = 60;
constexpr double kLimitAC9 = 10;
constexpr double kLimitAC10 = 2 * 60;

// Density tolerance: the reported fraction must equal 1 - 3770/410880
// exactly (as a rational), and the printed decimal within this.
constexpr double kDecimalTolerance = 1e-9;

std::string g_cli = COVERCERT_CLI_PATH;
fs::path g_work;

struct RunResult {
  int status = -1;
  std::string out;
};

std::string quote(const std::string& s) { return "'" + std::regex_replace(s, std::regex("'"), "'\\''") + "'"; }

RunResult run(const std::string& args) {
  const std::string cmd = quote(g_cli) + " --cache " + quote(g_work / "cache") + " " + args + " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) res.out.append(buf, n);
  const int raw = pclose(pipe);
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

/// Value after `key ` on its own line, or empty.
std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int g_failures = 0;

void criterion(const char* id, const char* title, double limit, const std::function<void(Outcome&)>& body,
               const std::function<void(Outcome&)>& untimed_setup = {}) {
  Outcome o;
  if (untimed_setup) untimed_setup(o);
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const Error& e) {
    o.require(false, std::string("unexpected ") + e.name() + ": " + e.what());
  } catch (const std::exception& e) {
    o.require(false, std::string("unexpected exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs >= limit) o.require(false, "runtime over limit");
  std::ostringstream line;
  line << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << title << " [" << std::fixed;
  line.precision(2);
  line << secs << "s < " << limit << "s]";
  if (!o.detail.empty()) line << " -- " << o.detail;
  std::cout << line.str() << std::endl;
  if (!o.pass) ++g_failures;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- criteria

void ac1(Outcome& o) {
  const RunResult res = run("--no-cache tables g");
  o.require(res.status == 0, "tables g exit " + std::to_string(res.status));
  o.require(field(res.out, "members") == "395", "members = '" + field(res.out, "members") + "'");
  o.require(field(res.out, "odd-members") == "320/320", "odd members = '" + field(res.out, "odd-members") + "'");
  // parse the printed table back
  const auto at = res.out.find("covercert-table");
  const GTable g = g_table_from(parse_table(res.out.substr(at == std::string::npos ? 0 : at), "g", 2));
  for (u64 listed : {2, 6, 8, 10, 12, 22, 24, 30, 32, 34}) o.require(g.contains(listed), std::to_string(listed) + " missing");
  for (u64 listed : {200, 292, 402, 474, 578}) o.require(g.contains(listed), std::to_string(listed) + " missing");
  for (u64 unlisted : {4, 14, 16, 18, 20, 26, 28, 36, 38, 640})
    o.require(!g.contains(unlisted), std::to_string(unlisted) + " unexpectedly present");
}

void ac2(Outcome& o) {
  const RunResult res = run("--no-cache tables pairs");
  o.require(res.status == 0, "exit " + std::to_string(res.status));
  o.require(field(res.out, "badbad") == "3771", "badbad = '" + field(res.out, "badbad") + "'");
  o.require(field(res.out, "failing-integers") == "3770 of 410880",
            "failing = '" + field(res.out, "failing-integers") + "'");
  o.require(field(res.out, "unsolved-pairs-within") == "515 0",
            "unsolved = '" + field(res.out, "unsolved-pairs-within") + "'");
}

void ac3(Outcome& o) {
  check_ten_primes_set();
  const RunResult res = run("--no-cache --jobs 1 tables tenprimes");
  o.require(res.status == 0, "exit " + std::to_string(res.status));
  o.require(field(res.out, "assigned") == "640/640", "assigned = '" + field(res.out, "assigned") + "'");
  o.require(field(res.out, "lucas-verified") == "640", "lucas-verified = '" + field(res.out, "lucas-verified") + "'");
  // re-check the printed assignments here as well
  const auto at = res.out.find("covercert-table");
  const TableFile t = parse_table(res.out.substr(at == std::string::npos ? 0 : at), "tenprimes", 3);
  o.require(t.rows.size() == 640, "printed rows " + std::to_string(t.rows.size()));
  for (const auto& row : t.rows) {
    const bool in_set = std::find(kTenPrimes.begin(), kTenPrimes.end(), row[1]) != kTenPrimes.end();
    if (!in_set || binom_mod_p(from_u64(row[2]), from_u64(row[0]), row[1]) != row[1] - 1) {
      o.require(false, "r = " + std::to_string(row[0]) + " fails");
      break;
    }
  }
}

// The timed run reads 𝒢 and the pair table from the cache (re-verifying
// every record on load); building them is AC1/AC2's job.
void ac4_setup(Outcome& o) {
  const RunResult res = run("tables pairs");
  o.require(res.status == 0, "could not build the cached tables");
}

void ac4(Outcome& o) {
  const RunResult res = run("tables exceptions --bound 2563");
  o.require(res.status == 0, "exit " + std::to_string(res.status));
  o.require(field(res.out, "exceptions") == "245", "exceptions = '" + field(res.out, "exceptions") + "'");
}

void ac5(Outcome& o) {
  const RunResult res = run("density --x 410880");
  o.require(res.status == 0, "exit " + std::to_string(res.status));
  mpq_class expect = 1 - mpq_class(3770, 410880);
  expect.canonicalize();
  o.require(field(res.out, "fraction") == expect.get_str(), "fraction = '" + field(res.out, "fraction") + "'");
  const double dec = std::stod(field(res.out, "decimal").empty() ? "0" : field(res.out, "decimal"));
  o.require(dec > 0.99, "fraction not above 0.99");
  o.require(std::abs(dec - expect.get_d()) < kDecimalTolerance, "decimal mismatch");

  const GTable g = compute_G(kBasePrime);
  const DigitCensus census(g, compute_pair_table(g));
  u64 brute = 0;
  for (u64 x = 1; x <= 100000; ++x) {
    brute += census.satisfies(from_u64(x));
    if (census.density_count(from_u64(x)) != from_u64(brute)) {
      o.require(false, "digit DP differs from brute force at x = " + std::to_string(x));
      break;
    }
  }
  for (u64 j = 0; j <= 10; ++j) {
    const RunResult b = run("density --bound " + std::to_string(j));
    mpq_class closed(pow_int(Int(kBasePrime - 395), j + 1) - 1, pow_int(Int(kBasePrime), j + 1) - 1);
    closed.canonicalize();
    if (field(b.out, "failing-fraction-bound") != closed.get_str())
      o.require(false, "bound mismatch at j = " + std::to_string(j));
  }
}

void ac6(Outcome& o) {
  for (u64 r : {1, 2, 3, 5, 640, 642, 1283}) {
    const auto t0 = Clock::now();
    const std::string tag = "r = " + std::to_string(r);
    const fs::path cert_path = g_work / ("sierpinski-r" + std::to_string(r) + ".cert");
    const RunResult w = run("--out " + quote(cert_path) + " witness --r " + std::to_string(r));
    o.require(w.status == 0, tag + ": witness exit " + std::to_string(w.status));
    const RunResult v = run("verify --in " + quote(cert_path));
    o.require(v.status == 0 && field(v.out, "verdict:") == "verified", tag + ": verify failed");
    for (const char* check : {"full-period", "odd", "magnitude", "divisibility", "coverage"})
      o.require(v.out.find(std::string("PASS ") + check) != std::string::npos, tag + ": " + check);
    const Certificate c = parse_certificate(read_file(cert_path));
    o.require(c.period <= (u64{1} << 13), tag + ": period above 2^13");
    o.require(binom_mod_p(c.k, c.r, 2) == 1, tag + ": C(k,r) even");

    Certificate k1 = c;
    k1.k += 1;
    Certificate wrong = c;
    wrong.classes.back().prime = 7;
    Certificate flip = c;
    flip.classes.front().sign = -flip.classes.front().sign;
    for (const auto& [name, m] : {std::pair{"k+1", &k1}, std::pair{"wrong prime", &wrong}, std::pair{"sign", &flip}}) {
      const fs::path mpath = g_work / "mutant.cert";
      std::ofstream(mpath) << serialize(*m);
      const RunResult mv = run("verify --in " + quote(mpath));
      o.require(mv.status == 1 && field(mv.out, "verdict:") == "refuted", tag + ": mutation " + name + " not refuted");
    }
    if (elapsed(t0) >= kLimitAC6PerR) o.require(false, tag + ": over the per-r limit");
  }
}

void ac7(Outcome& o) {
  for (u64 a : {2, 3, 5, 6, 10})
    for (u64 r : {1, 3, 5})
      for (WitnessKind kind : {WitnessKind::sierpinski, WitnessKind::riesel}) {
        const std::string tag = "a=" + std::to_string(a) + " r=" + std::to_string(r) + " " + to_string(kind);
        const Int a1 = from_u64(a + 1);
        if (mpz_popcount(a1.get_mpz_t()) == 1) {
          bool rejected = false;
          try {
            witness_oddr(from_u64(a), from_u64(r), kind);
          } catch (const HypothesisFailed&) {
            rejected = true;
          }
          o.require(rejected, tag + ": not rejected with HypothesisFailed");
          continue;
        }
        const Certificate c = build_certificate(witness_oddr(from_u64(a), from_u64(r), kind));
        const VerificationReport rep = verify_certificate(parse_certificate(serialize(c)));
        o.require(rep.verified(), tag + ": refuted");
        for (const char* check : {"gcd", "not-power"}) {
          const CheckResult* cr = rep.find(check);
          o.require(cr != nullptr && cr->pass, tag + ": " + check);
        }
      }
  const RunResult cli = run("witness --a 3 --r 1");
  o.require(cli.status == 1, "cli a = 3 exit " + std::to_string(cli.status));
}

void ac8(Outcome& o) {
  const PrimitiveCovering pc =
      binary_primitive_covering(Int(2), 6, Int(641), {3, 5, 17, 257, 65537, 6700417});
  o.require(check_primitive_covering(pc).ok, "tau = 6 covering is not (2,1)-primitive");
  for (WitnessKind kind : {WitnessKind::sierpinski, WitnessKind::riesel}) {
    const Witness w = witness_infr(pc, kind);
    const VerificationReport rep = verify_certificate(parse_certificate(serialize(build_certificate(w))));
    o.require(rep.verified(), to_string(kind) + ": certificate refuted");
    o.require(w.R.has_value(), to_string(kind) + ": no R");
    if (!w.R) continue;
    for (const Int& q : pc.primes)
      o.require(binom_mod_p(w.k, w.r, q) == mod_floor(*w.R, q), to_string(kind) + ": residue mod " + q.get_str());
  }
}

void ac9(Outcome& o) {
  o.require(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(2), Int(1), Int(6))), "(2,1,6)");
  o.require(std::holds_alternative<ZsigmondyException>(primitive_prime(Int(3), Int(1), Int(2))), "(3,1,2)");
  const std::vector<Int> expect{3, 5, 17, 257, 65537};
  for (unsigned l = 1; l <= 6; ++l) {
    const Int n = Int(1UL << l);
    const PrimitivePrimeResult res = primitive_prime(Int(2), Int(1), n);
    if (!std::holds_alternative<Int>(res)) {
      o.require(false, "2^" + std::to_string(l) + ": exception");
      continue;
    }
    const Int q = std::get<Int>(res);
    const bool right = l <= 5 ? q == expect[l - 1] : (q == 641 || q == 6700417);
    o.require(right, "2^" + std::to_string(l) + ": got " + q.get_str());
    o.require(mult_order(Int(2), q) == n, "order of 2 mod " + q.get_str());
  }
  const RunResult cli = run("zsigmondy --a 2 --b 1 --n 6");
  o.require(cli.out.rfind("exception", 0) == 0, "cli exception marker");
}

void ac10(Outcome& o) {
  const RootOptions algebraic{0, RootStrategy::algebraic};
  for (u64 r = 1; r < kBasePrime; ++r)
    for (u64 t : {u64{1}, kBasePrime - 1}) {
      std::vector<u64> scan;
      for (u64 k = 0; k < kBasePrime; ++k)
        if (binom_mod_p(from_u64(k), from_u64(r), kBasePrime) == t) scan.push_back(k);
      if (solve_binom_congruence(r, t, kBasePrime, algebraic) != scan) {
        o.require(false, "root set differs at r = " + std::to_string(r));
        r = kBasePrime;
        break;
      }
    }

  std::mt19937_64 rng(2024);
  const std::array<u64, 16> moduli{2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 18, 20, 24};
  for (int trial = 0; trial < 100; ++trial) {
    CoveringSystem c;
    const int n = 4 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const u64 m = moduli[rng() % moduli.size()];
      c.classes.push_back({rng() % m, m});
    }
    const u64 period = covering_period(c);
    if (period > 100000) continue;
    const unsigned want = 1 + rng() % 2;
    unsigned least = ~0U;
    for (u64 x = 0; x < period; ++x) {
      unsigned hits = 0;
      for (const auto& cls : c.classes) hits += x % cls.modulus == cls.residue;
      least = std::min(least, hits);
    }
    const CoverageReport rep = verify_covering(c, want);
    if (rep.min_multiplicity != least || rep.covered != (least >= want))
      o.require(false, "covering trial " + std::to_string(trial) + " differs");
  }

  // small grid: k, r <= 120 for these primes
  for (u64 p : {2, 3, 5, 7, 11, 13, 641})
    for (u64 k = 0; k <= 120; ++k)
      for (u64 r = 0; r <= 120; ++r)
        if (from_u64(binom_mod_p(from_u64(k), from_u64(r), p)) !=
            mod_floor(binom_exact(from_u64(k), from_u64(r)), from_u64(p))) {
          o.require(false, "Lucas differs at k=" + std::to_string(k) + " r=" + std::to_string(r));
          k = 121;
          break;
        }
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
  g_work = fs::temp_directory_path() / ("covercert-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(g_work);

  criterion("AC1", "good-digit census: 395 members, all odd residues, printed even list", kLimitAC1, ac1);
  criterion("AC2", "pair census: 3771 blocked pairs, 3770 failing integers, [1,515] solvable", kLimitAC2, ac2);
  criterion("AC3", "ten-primes lemma: all r in [1,640] assigned and Lucas-checked", kLimitAC3, ac3);
  criterion("AC4", "exception census: 245 up to 2563 (tables from cache)", kLimitAC4, ac4, ac4_setup);
  criterion("AC5", "density: exact 1-3770/410880, digit DP = brute force to 1e5, bound j<=10", kLimitAC5, ac5);
  criterion("AC6", "Sierpinski witnesses r in {1,2,3,5,640,642,1283} + mutations", 7 * kLimitAC6PerR, ac6);
  criterion("AC7", "odd-r witnesses for bases 2,3,5,6,10", kLimitAC7, ac7);
  criterion("AC8", "infinite-r family on the tau=6 binary covering", kLimitAC8, ac8);
  criterion("AC9", "primitive divisors and the Zsigmondy exceptions", kLimitAC9, ac9);
  criterion("AC10", "oracle equivalence: roots, coverings, Lucas", kLimitAC10, ac10);

  fs::remove_all(g_work);
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
