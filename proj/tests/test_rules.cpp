#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "critmc/rules.hpp"
#include "support.hpp"

using namespace critmc;

namespace {

RuleType L() { return RuleType::large(); }
RuleType S(std::uint32_t s) { return RuleType::small(s); }

void check_parse_error(const std::string& text, const std::string& kind, std::size_t line) {
  try {
    parse_rule(text);
    FAIL("expected a parse error for: " << text);
  } catch (const RuleParseError& e) {
    CHECK(e.kind() == kind);
    CHECK(e.line() == line);
  }
}

}  // namespace

TEST_CASE("classify") {
  CHECK(classify(1, 1) == S(1));
  CHECK(classify(2, 1) == L());
  CHECK(classify(5, 5) == S(5));
  CHECK(classify(1, 0) == L());
}

TEST_CASE("classify returns large exactly above the bound") {
  for (std::uint32_t K = 0; K <= 6; ++K)
    for (std::uint64_t s = 1; s <= 20; ++s) CHECK(classify(s, K).is_large() == (s > K));
}

TEST_CASE("types order integers before large") {
  CHECK(S(1) < S(2));
  CHECK(S(30) < L());
  const auto types = all_types(3);
  REQUIRE(types.size() == 4);
  CHECK(types.back() == L());
  CHECK(all_types(0).size() == 1);
}

TEST_CASE("builtin rules") {
  const BoundedSizeRule er = builtin_rule("erdos-renyi");
  CHECK(er.bound() == 0);
  CHECK(er.quadruples().size() == 1);
  const BoundedSizeRule bf = builtin_rule("bohman-frieze");
  CHECK(bf.bound() == 1);
  CHECK(bf.quadruples().size() == 4);
  CHECK_THROWS_AS(builtin_rule("xyz"), UnknownRuleError);
  CHECK_THROWS_AS(load_rule("no/such/rule/file"), UnknownRuleError);
}

TEST_CASE("parse_rule matches the builtins") {
  CHECK(parse_rule("K=0\n* * * *") == builtin_rule("erdos-renyi"));
  CHECK(parse_rule("K=1\n1 1 1 1\n1 1 1 *\n1 1 * 1\n1 1 * *") == builtin_rule("bohman-frieze"));
}

TEST_CASE("parse_rule accepts comments, blank lines and duplicates") {
  const auto r = parse_rule("# BF\n\nK=1   # header\n1 1 * *\n\n1 1 * *\n1\t1 1 1\n1 1 1 *\n1 1 * 1\n");
  CHECK(r == builtin_rule("bohman-frieze"));
}

TEST_CASE("parse_rule errors carry kind and line") {
  check_parse_error("K=1\n1 2 1 1", "token out of range", 2);
  check_parse_error("K=1\n1 0 1 1", "token out of range", 2);
  check_parse_error("K=1\n1 1 1", "wrong arity", 2);
  check_parse_error("K=1\n1 1 * *\n1 1 * * *", "wrong arity", 3);
  check_parse_error("K=1\n1 x 1 1", "malformed token", 2);
  check_parse_error("K=a\n* * * *", "malformed header", 1);
  check_parse_error("1 1 1 1", "malformed header", 1);
  check_parse_error("", "malformed header", 1);
  check_parse_error("K=31\n* * * *", "malformed header", 1);
}

TEST_CASE("constructor validates coordinates") {
  const Quadruple bad{S(2), L(), L(), L()};
  CHECK_THROWS_AS(BoundedSizeRule(1, std::span(&bad, 1)), std::invalid_argument);
  const Quadruple q{L(), L(), L(), L()};
  CHECK_THROWS_AS(BoundedSizeRule(BoundedSizeRule::kMaxBound + 1, std::span(&q, 1)),
                  std::invalid_argument);
}

TEST_CASE("decide") {
  const auto bf = builtin_rule("bohman-frieze");
  CHECK(decide(bf, {S(1), S(1), S(1), L()}) == EdgeChoice::first);
  CHECK(decide(bf, {L(), S(1), S(1), S(1)}) == EdgeChoice::second);
  const auto er = builtin_rule("erdos-renyi");
  CHECK(decide(er, {L(), L(), L(), L()}) == EdgeChoice::first);
}

TEST_CASE("decide agrees with the quadruple list on random rules") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t K = static_cast<std::uint32_t>(rng.below(4));
    const auto rule = test::random_rule(K, 0.4, rng);
    const auto types = all_types(K);
    for (RuleType a : types)
      for (RuleType b : types)
        for (RuleType c : types)
          for (RuleType d : types) {
            const Quadruple q{a, b, c, d};
            const bool listed = std::find(rule.quadruples().begin(), rule.quadruples().end(), q) !=
                                rule.quadruples().end();
            CHECK(rule.contains(q) == listed);
            CHECK(decide(rule, q) == decide(rule, q));
          }
  }
}

TEST_CASE("serialization is canonical and round-trips") {
  CHECK(builtin_rule("erdos-renyi").serialize() == "K=0\n* * * *\n");
  CHECK(builtin_rule("bohman-frieze").serialize() == "K=1\n1 1 1 1\n1 1 1 *\n1 1 * 1\n1 1 * *\n");
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t K = static_cast<std::uint32_t>(rng.below(5));
    const auto rule = test::random_rule(K, 0.3, rng);
    const std::string text = rule.serialize();
    const auto back = parse_rule(text);
    CHECK(back == rule);
    CHECK(back.serialize() == text);
    CHECK(back.fingerprint() == rule.fingerprint());
  }
}

TEST_CASE("load_rule reads rule files") {
  const std::string path = "test_rules_tmp.rule";
  {
    std::ofstream f(path);
    f << "K=1\n1 1 * *\n1 1 1 1\n1 1 * 1\n1 1 1 *\n";
  }
  CHECK(load_rule(path) == builtin_rule("bohman-frieze"));
  std::remove(path.c_str());
}
