#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "covercert/certify.hpp"

using namespace covercert;

namespace {

const Certificate& cert_r1() {
  static const Certificate c = build_certificate(witness_sierpinski(Int(1), DigitTables(compute_G(kBasePrime))));
  return c;
}

bool passes(const Certificate& c) { return verify_certificate(c).verified(); }

}  // namespace

TEST(Certify, RoundTripIsExact) {
  const std::string text = serialize(cert_r1());
  EXPECT_EQ(parse_certificate(text), cert_r1());
  EXPECT_EQ(serialize(parse_certificate(text)), text);
  EXPECT_EQ(text.rfind(kCertificateHeader, 0), 0U);
}

TEST(Certify, VerifiesInExactMode) {
  const VerificationReport rep = verify_certificate(cert_r1());
  EXPECT_TRUE(rep.verified()) << rep.render();
  EXPECT_TRUE(rep.exact);
  for (const char* name : {"coverage", "divisibility", "full-period", "magnitude", "odd", "ledger"})
    EXPECT_TRUE(rep.find(name) && rep.find(name)->pass) << name;
}

TEST(Certify, MutationsAreRefuted) {
  Certificate k_plus = cert_r1();
  k_plus.k += 1;
  EXPECT_FALSE(passes(k_plus));

  Certificate wrong_prime = cert_r1();
  wrong_prime.classes[0].prime = 7;
  EXPECT_FALSE(passes(wrong_prime));

  Certificate sign = cert_r1();
  sign.classes[2].sign = -sign.classes[2].sign;
  EXPECT_FALSE(passes(sign));

  Certificate dropped = cert_r1();
  dropped.classes.pop_back();
  EXPECT_FALSE(passes(dropped));

  Certificate kind = cert_r1();
  kind.kind = WitnessKind::riesel;
  EXPECT_FALSE(passes(kind));
}

TEST(Certify, RandomKMutationsAreRefuted) {
  std::mt19937_64 rng(77);
  int refuted = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Certificate c = cert_r1();
    c.k += from_u64(1 + rng() % 1000000);
    refuted += !passes(c);
  }
  EXPECT_EQ(refuted, 20);
}

TEST(Certify, StrictParserRejects) {
  const std::string text = serialize(cert_r1());
  // truncated at every line boundary before "end"
  for (std::size_t pos = text.find('\n'); pos + 1 < text.size(); pos = text.find('\n', pos + 1))
    EXPECT_THROW(parse_certificate(text.substr(0, pos + 1)), MalformedCertificate) << pos;
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(parse_certificate(replace("v1", "v9")), MalformedCertificate);
  EXPECT_THROW(parse_certificate(replace("kind sierpinski", "kind  sierpinski")), MalformedCertificate);
  EXPECT_THROW(parse_certificate(replace("class 1 2 3 +", "class 1 2 3 *")), MalformedCertificate);
  // a stale period parses but fails the structure check
  const Certificate stale = parse_certificate(replace("period 64", "period 32"));
  EXPECT_FALSE(verify_certificate(stale).find("structure")->pass);
  EXPECT_THROW(parse_certificate(text + "extra\n"), MalformedCertificate);
  // swap two class lines: not canonical
  std::string swapped = replace("class 1 2 3 +\nclass 2 4 5 +", "class 2 4 5 +\nclass 1 2 3 +");
  EXPECT_THROW(parse_certificate(swapped), MalformedCertificate);
  EXPECT_EQ(parse_certificate(swapped, {true}), cert_r1());
}

TEST(Certify, LenientParserCanonicalizesShuffledLines) {
  std::vector<std::string> lines;
  const std::string text = serialize(cert_r1());
  std::vector<std::string> body;
  std::size_t start = 0;
  for (std::size_t end; (end = text.find('\n', start)) != std::string::npos; start = end + 1)
    lines.push_back(text.substr(start, end - start));
  std::string head, tail = "end\n";
  for (const auto& l : lines) {
    if (l.rfind("class ", 0) == 0 || l.rfind("aux ", 0) == 0)
      body.push_back(l);
    else if (l.rfind("period", 0) != 0 && l != "end")
      head += l + "\n";
  }
  std::shuffle(body.begin(), body.end(), std::mt19937_64(1));
  std::string shuffled = head;
  for (const auto& l : body) shuffled += l + "\n";
  shuffled += tail;
  EXPECT_EQ(parse_certificate(shuffled, {true}), cert_r1());
}

TEST(Certify, UncoveredClassesFailCoverage) {
  Certificate c = cert_r1();
  c.classes.erase(c.classes.begin());  // drop 1 mod 2
  c.period = 64;
  const VerificationReport rep = verify_certificate(c);
  ASSERT_NE(rep.find("coverage"), nullptr);
  EXPECT_FALSE(rep.find("coverage")->pass);
}

TEST(Certify, ResidueModeForHugeBinomials) {
  const PrimitiveCovering pc = binary_primitive_covering(Int(2), 6, Int(641), {3, 5, 17, 257, 65537, 6700417});
  for (WitnessKind kind : {WitnessKind::sierpinski, WitnessKind::riesel}) {
    const Certificate c = build_certificate(witness_infr(pc, kind));
    const VerificationReport rep = verify_certificate(c);
    EXPECT_TRUE(rep.verified()) << rep.render();
    EXPECT_FALSE(rep.exact);
    EXPECT_EQ(parse_certificate(serialize(c)), c);
    Certificate bad = c;
    bad.k += 2;
    EXPECT_FALSE(passes(bad));
  }
}

TEST(Certify, BaseASideConditions) {
  const Certificate c = build_certificate(witness_oddr(Int(10), Int(3), WitnessKind::riesel));
  const VerificationReport rep = verify_certificate(c);
  EXPECT_TRUE(rep.verified()) << rep.render();
  EXPECT_TRUE(rep.find("gcd")->pass);
  EXPECT_TRUE(rep.find("not-power")->pass);
}

TEST(Certify, BothKindsFromDisjointCovering) {
  const CoveringFile file =
      parse_covering("covercert-covering v1 a=100 b=1 m=2\n0 2 101\n1 4 73\n3 4 137\n\n0 3 7\n1 3 13\n2 3 37\n");
  const Certificate c = build_certificate(witness_infr(file.to_primitive(), WitnessKind::both));
  EXPECT_TRUE(passes(c));
  Certificate flipped = c;
  for (auto& cls : flipped.classes)
    if (cls.prime == 7) cls.sign = -cls.sign;
  cert_detail::canonicalize(flipped);
  EXPECT_FALSE(passes(flipped));
}
