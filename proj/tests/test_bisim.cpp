#include <doctest.h>

#include <json.hpp>

#include "ipobisim/bisim.hpp"
#include "ipobisim/properties.hpp"
#include "ipobisim/translate.hpp"

using namespace ipobisim;

namespace {

CLTerm cl(const char* s) { return parse_cl(s); }
LambdaTerm lam(const char* s) { return parse_lambda(s); }

const char* kFlipApply = "S(S(K S)(S(K K)(S K K)))(S(S(K S)(K K))(K K))";

Config cbv_reactive() {
  Config c;
  c.strategy = Strategy::Cbv;
  c.label_set = LabelSet::ReactiveOnly;
  return c;
}

}  // namespace

TEST_CASE("K and S(KK)(SKK) are equivalent with second-order labels") {
  auto r = check_weak_bisim(cl("K"), cl("S (K K) (S K K)"), Config{}, {8, 200, false});
  CHECK(summary(r.verdict) == "Equivalent(8)");
  CHECK(r.stats.pairs_visited > 0);
}

TEST_CASE("first-order labels tell K from S(KK)(SKK)") {
  Config fo{Calculus::CL, Order::First, Strategy::Lazy, LabelSet::ReactiveOnly, 2};
  auto r = check_weak_bisim(cl("K"), cl("S (K K) (S K K)"), fo, {2, 50, false});
  REQUIRE(r.verdict.kind == VerdictKind::Distinguished);
  REQUIRE(r.verdict.trace.size() == 1);
  CHECK(r.verdict.trace[0].side == Side::Right);
  CHECK(r.verdict.trace[0].reason == "unmatched label");
}

TEST_CASE("cbv critical variable separates I from its eta-expansion") {
  auto r = check_weak_bisim(to_cl(lam("\\x. x")), cl(kFlipApply), cbv_reactive(), {4, 200, false});
  REQUIRE(r.verdict.kind == VerdictKind::Distinguished);
  CHECK(r.verdict.trace ==
        std::vector<TraceEntry>{{"[_] ?y1", Side::Both, "matched"}, {"[_] ?y2", Side::Right, "unmatched label"}});
}

TEST_CASE("verdict basics") {
  Config c;
  CHECK(summary(check_weak_bisim(cl("K"), cl("K"), c, {6, 100, false}).verdict) == "Equivalent(6)");
  CHECK(summary(check_weak_bisim(cl("K"), cl("S"), c, {0, 100, false}).verdict) == "Equivalent(0)");
  CHECK(check_weak_bisim(cl("K"), cl("S"), c, {3, 100, false}).verdict.kind == VerdictKind::Distinguished);
  // Identical after silent steps.
  CHECK(summary(check_weak_bisim(cl("K K"), cl("K'(K)"), c, {5, 100, false}).verdict) == "Equivalent(5)");
}

TEST_CASE("divergence policy") {
  CLTerm omega = cl_omega();
  Config c;
  auto both = check_weak_bisim(omega, omega, c, {3, 50, false});
  CHECK(summary(both.verdict) == "Unknown(FuelExhausted)");
  auto blind = check_weak_bisim(omega, omega, c, {3, 50, true});
  CHECK(blind.verdict.kind == VerdictKind::Equivalent);
  auto one = check_weak_bisim(omega, cl("K"), c, {3, 50, false});
  CHECK(summary(one.verdict) == "Unknown(FuelExhausted)");
  auto one_blind = check_weak_bisim(omega, cl("K"), c, {3, 50, true});
  CHECK(one_blind.verdict.kind == VerdictKind::Distinguished);
}

TEST_CASE("traces are shortest") {
  // K ?y1 and K'(K) ?y1 both fire; after a second argument one side is a bare
  // variable and the other a value, so the third label is the first mismatch.
  auto r = check_weak_bisim(cl("K"), cl("K'(K)"), Config{}, {6, 100, false});
  REQUIRE(r.verdict.kind == VerdictKind::Distinguished);
  REQUIRE(r.verdict.trace.size() == 3);
  CHECK(r.verdict.trace[2].reason == "unmatched label");
  auto shallow = check_weak_bisim(cl("K"), cl("K'(K)"), Config{}, {2, 100, false});
  CHECK(shallow.verdict.kind == VerdictKind::Equivalent);
}

TEST_CASE("bisimilarity is reflexive and symmetric on small terms") {
  Config c;
  auto terms = enumerate_terms(3, {"x"}, Flavor::Star);
  for (std::size_t i = 0; i < terms.size(); i += 3) {
    CAPTURE(format_term(terms[i]));
    auto self = check_weak_bisim(terms[i], terms[i], c, {4, 100, false}).verdict;
    CHECK(self.kind == VerdictKind::Equivalent);
    for (std::size_t j = i + 1; j < terms.size(); j += 7) {
      auto ab = check_weak_bisim(terms[i], terms[j], c, {3, 100, false}).verdict;
      auto ba = check_weak_bisim(terms[j], terms[i], c, {3, 100, false}).verdict;
      CHECK(ab.kind == ba.kind);
      CHECK(ab.trace.size() == ba.trace.size());
    }
  }
}

TEST_CASE("report json") {
  auto r = check_weak_bisim(cl("K"), cl("S (K K) (S K K)"), Config{}, {8, 200, false});
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["verdict"] == "Equivalent");
  CHECK(j["depth"] == 8);
  CHECK(j["trace"].empty());
  CHECK(j["stats"].contains("pairs_visited"));
  CHECK(j["stats"].contains("tau_steps"));
  CHECK(j["stats"].contains("wall_ms"));
}

TEST_CASE("lambda-level bisimulation") {
  Config c{Calculus::Lambda, Order::First, Strategy::Lazy, LabelSet::ReactiveOnly, 2};
  CHECK(check_weak_bisim(lam("(\\x. x) (\\y. y)"), lam("\\z. z"), c, {3, 100, false}).verdict.kind ==
        VerdictKind::Equivalent);
  // Only the divergent pool argument separates these, so the default policy cannot decide.
  auto strict = check_weak_bisim(lam("\\x. x"), lam("\\x y. x"), c, {3, 100, false}).verdict;
  CHECK(summary(strict) == "Unknown(FuelExhausted)");
  auto blind = check_weak_bisim(lam("\\x. x"), lam("\\x y. x"), c, {3, 100, true}).verdict;
  CHECK(blind.kind == VerdictKind::Distinguished);
}

TEST_CASE("applicative oracle") {
  OracleOptions o{3, 100, 2};
  CHECK(applicative_oracle(lam("\\x. x"), lam("\\y. y"), Strategy::Lazy, o).kind != VerdictKind::Distinguished);
  CHECK(applicative_oracle(lam("\\x. x"), lam("\\x y. x"), Strategy::Lazy, o).kind == VerdictKind::Distinguished);
  LambdaTerm omega = lambda_omega();
  CHECK(summary(applicative_oracle(omega, omega, Strategy::Lazy, o)) == "Unknown(FuelExhausted)");
  CHECK(applicative_oracle(cl("K"), cl("S"), Calculus::CL, Strategy::Lazy, o).kind == VerdictKind::Distinguished);
}

TEST_CASE("contextual oracle") {
  ContextPool pool;
  CHECK(describe_contexts(Strategy::Lazy, pool).size() == 111);
  CHECK(contextual_oracle(lam("\\x. x"), lam("(\\x. x) (\\x. x)"), Strategy::Lazy, pool, 200).kind !=
        VerdictKind::Distinguished);
  CHECK(contextual_oracle(lam("\\x. x"), lam("\\x y. x"), Strategy::Lazy, pool, 200).kind ==
        VerdictKind::Distinguished);
  CHECK(contextual_oracle(lam("\\x y. x y"), lam("\\x y. x y"), Strategy::Lazy, pool, 200).kind !=
        VerdictKind::Distinguished);
  auto eta = contextual_oracle(lam("\\x. x"), lam("\\x y. x y"), Strategy::Lazy, pool, 200);
  CHECK(eta.kind == VerdictKind::Distinguished);
}

TEST_CASE("congruence harness") {
  CongruenceOptions o;
  o.samples = 25;
  auto rep = congruence_harness({{cl("K"), cl("S (K K) (S K K)")}}, Config{}, o);
  REQUIRE(rep.pairs.size() == 1);
  CHECK(rep.pairs[0].certified);
  CHECK(rep.total_violations() == 0);
  CHECK(rep.pairs[0].equivalent + rep.pairs[0].unknown == 25);

  auto refl = congruence_harness({{cl("S ?x K"), cl("S ?x K")}}, Config{}, o);
  CHECK(refl.total_violations() == 0);

  auto rejected = congruence_harness({{to_cl(lam("\\x. x")), to_cl(lam("\\x y. x"))}}, Config{}, o);
  CHECK_FALSE(rejected.pairs[0].certified);
  CHECK(rejected.pairs[0].equivalent == 0);

  // Same seed, same report.
  CHECK(congruence_json(congruence_harness({{cl("K"), cl("S (K K) (S K K)")}}, Config{}, o)) ==
        congruence_json(rep));
}

TEST_CASE("the default congruence corpus certifies") {
  for (const auto& [a, b] : congruence_corpus()) {
    CAPTURE(format_term(a));
    CHECK(check_weak_bisim(a, b, Config{}, {8, 200, false}).verdict.kind == VerdictKind::Equivalent);
  }
}
