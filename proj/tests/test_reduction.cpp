#include <doctest.h>

#include "ipobisim/properties.hpp"
#include "ipobisim/reduction.hpp"

using namespace ipobisim;

namespace {

CLTerm cl(const char* s) { return parse_cl(s); }
LambdaTerm lam(const char* s) { return parse_lambda(s); }

}  // namespace

TEST_CASE("CL* lazy rules") {
  auto r = step(cl("K ?m"), Calculus::CLStar, Strategy::Lazy);
  REQUIRE(r.kind == StepKind::Stepped);
  CHECK(r.next == cl("K'(?m)"));
  CHECK(step(cl("S ?m"), Calculus::CLStar, Strategy::Lazy).next == cl("S'(?m)"));
  CHECK(step(cl("K'(?m) ?n"), Calculus::CLStar, Strategy::Lazy).next == cl("?m"));
  CHECK(step(cl("S'(?m) ?n"), Calculus::CLStar, Strategy::Lazy).next == cl("S''(?m,?n)"));
  CHECK(step(cl("S''(K,K) ?x"), Calculus::CLStar, Strategy::Lazy).next == cl("K ?x (K ?x)"));
  // Arguments are not touched by the lazy strategy.
  CHECK(step(cl("K'(K K) (K K)"), Calculus::CLStar, Strategy::Lazy).next == cl("K K"));
}

TEST_CASE("plain CL lazy rules") {
  CHECK(step(cl("S ?m ?n ?p"), Calculus::CL, Strategy::Lazy).next == cl("?m ?p (?n ?p)"));
  CHECK(step(cl("K ?m ?n"), Calculus::CL, Strategy::Lazy).next == cl("?m"));
  CHECK(step(cl("K K"), Calculus::CL, Strategy::Lazy).kind == StepKind::Halted);
  CHECK(step(cl("S K K"), Calculus::CL, Strategy::Lazy).kind == StepKind::Halted);
  CHECK_THROWS_AS(step(cl("K'(K)"), Calculus::CL, Strategy::Lazy), std::invalid_argument);
}

TEST_CASE("cbv waits for values") {
  // K (K K K) : the argument is reduced first.
  auto r = step(cl("K (K K K)"), Calculus::CLStar, Strategy::Cbv);
  REQUIRE(r.kind == StepKind::Stepped);
  CHECK(r.next == cl("K (K'(K) K)"));
  CHECK(step(cl("S''(K,K) S"), Calculus::CLStar, Strategy::Cbv).next == cl("K S (K S)"));
  auto stuck = step(cl("?x K"), Calculus::CLStar, Strategy::Cbv);
  CHECK(stuck.kind == StepKind::StuckOpen);
  CHECK(stuck.var == "x");
  CHECK(step(cl("?x"), Calculus::CLStar, Strategy::Cbv).kind == StepKind::Halted);
  CHECK(step(cl("K K (K K)"), Calculus::CL, Strategy::Cbv).next == cl("K"));
  CHECK(step(cl("S K (K K)"), Calculus::CL, Strategy::Cbv).kind == StepKind::Halted);
  CHECK(step(cl("K K (K K K)"), Calculus::CL, Strategy::Cbv).next == cl("K K K"));
}

TEST_CASE("lambda steppers") {
  CHECK(step(lam("\\x. x"), Strategy::Lazy).kind == StepKind::Halted);
  CHECK(step(lam("(\\x. x) (\\y. y)"), Strategy::Lazy).next == lam("\\y. y"));
  // Lazy does not evaluate the argument; cbv does.
  LambdaTerm t = lam("(\\x y. y) ((\\z. z) (\\z. z))");
  CHECK(step(t, Strategy::Lazy).next == lam("\\y. y"));
  CHECK(step(t, Strategy::Cbv).next == lam("(\\x y. y) (\\z. z)"));
  // Normal order reduces under binders and accepts open terms.
  LambdaTerm open = parse_lambda("\\x. (\\y. y) x", false);
  CHECK(step(open, Strategy::NormalFull).next == lam("\\x. x"));
  CHECK_THROWS_AS(step(parse_lambda("f (\\x. x)", false), Strategy::Lazy), OpenTermError);
}

TEST_CASE("beta avoids capture") {
  // (\x y. x) (\z. y-free) under a binder keeps indices straight.
  LambdaTerm body = parse_lambda("\\x. \\y. x y");
  LambdaTerm result = beta(body, lam("\\a. a"));
  CHECK(result == lam("\\y. (\\a. a) y"));
  LambdaTerm open_arg = parse_lambda("f", false);
  CHECK(format_term(beta(parse_lambda("\\x. \\f. x f", false), open_arg)) == "\\f1. f f1");
}

TEST_CASE("silent normalisation") {
  auto n = normalize_tau(cl("S (K K) (S K K)"), Calculus::CLStar, Strategy::Lazy, 10);
  CHECK(n.result == CLTerm::spp(cl("K K"), cl("S K K")));
  CHECK(n.status == NormalStatus::Normal);
  CHECK(n.steps == 2);

  LambdaTerm omega = lam("(\\x. x x) (\\x. x x)");
  auto w = normalize_tau(omega, Strategy::Lazy, 50);
  CHECK(w.result == omega);
  CHECK(w.status == NormalStatus::FuelExhausted);
  CHECK(w.steps == 50);

  auto k = normalize_tau(cl("K"), Calculus::CLStar, Strategy::Lazy, 5);
  CHECK(k.result == cl("K"));
  CHECK(k.steps == 0);

  // Exactly `fuel` steps to a normal form is not exhaustion.
  auto exact = normalize_tau(cl("S (K K) (S K K)"), Calculus::CLStar, Strategy::Lazy, 2);
  CHECK(exact.status == NormalStatus::Normal);
  auto short_fuel = normalize_tau(cl("S (K K) (S K K)"), Calculus::CLStar, Strategy::Lazy, 1);
  CHECK(short_fuel.status == NormalStatus::FuelExhausted);
}

TEST_CASE("value predicates") {
  CHECK(is_value(cl("K K"), Calculus::CL, Strategy::Lazy));
  CHECK_FALSE(is_value(cl("K K K"), Calculus::CL, Strategy::Lazy));
  CHECK(is_value(cl("S''(K,?x)"), Calculus::CLStar, Strategy::Cbv));
  CHECK_FALSE(is_value(cl("S''(K K,?x)"), Calculus::CLStar, Strategy::Cbv));
  CHECK(is_value(lam("\\x. x")));
  CHECK(missing_args(cl("K")) == 2);
  CHECK(missing_args(cl("S K")) == 2);
  CHECK(missing_args(cl("S K K")) == 1);
}

TEST_CASE("steppers agree with evaluation-context search on small terms") {
  for (Strategy s : {Strategy::Lazy, Strategy::Cbv}) {
    for (const auto& t : enumerate_terms(5, {"x"}, Flavor::Star)) {
      auto expected = context_search_successors(t, Calculus::CLStar, s);
      auto got = step(t, Calculus::CLStar, s);
      REQUIRE(expected.size() <= 1);
      CHECK((got.kind == StepKind::Stepped) == (expected.size() == 1));
      if (!expected.empty()) CHECK(got.next == expected[0]);
    }
    for (const auto& t : enumerate_terms(6, {}, Flavor::Plain)) {
      auto expected = context_search_successors(t, Calculus::CL, s);
      auto got = step(t, Calculus::CL, s);
      REQUIRE(expected.size() <= 1);
      CHECK((got.kind == StepKind::Stepped) == (expected.size() == 1));
      if (!expected.empty()) CHECK(got.next == expected[0]);
    }
    for (const auto& t : enumerate_lambda(6)) {
      auto expected = context_search_successors(t, s);
      auto got = step(t, s);
      REQUIRE(expected.size() <= 1);
      CHECK((got.kind == StepKind::Stepped) == (expected.size() == 1));
      if (!expected.empty()) CHECK(got.next == expected[0]);
    }
  }
}

TEST_CASE("normalisation is idempotent and fuel-monotone") {
  for (const auto& t : enumerate_terms(5, {}, Flavor::Star)) {
    auto small = normalize_tau(t, Calculus::CLStar, Strategy::Lazy, 20);
    auto big = normalize_tau(t, Calculus::CLStar, Strategy::Lazy, 40);
    if (small.status == NormalStatus::Normal) {
      CHECK(big.status == NormalStatus::Normal);
      CHECK(big.result == small.result);
      CHECK(big.steps == small.steps);
      CHECK(normalize_tau(small.result, Calculus::CLStar, Strategy::Lazy, 5).steps == 0);
    }
  }
}

TEST_CASE("enum names parse back") {
  for (Calculus c : {Calculus::Lambda, Calculus::CL, Calculus::CLStar}) CHECK(parse_calculus(to_string(c)) == c);
  for (Strategy s : {Strategy::Lazy, Strategy::Cbv, Strategy::NormalFull}) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_calculus("sk"), std::invalid_argument);
}
