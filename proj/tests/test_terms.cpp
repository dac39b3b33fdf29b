#include <doctest.h>

#include <map>
#include <set>

#include "ipobisim/terms.hpp"

using namespace ipobisim;

namespace {

// Independent counters over the term grammars, used to freeze enumeration sizes.
std::size_t count_cl_exact(std::size_t n, std::size_t leaves, bool star) {
  static std::map<std::tuple<std::size_t, std::size_t, bool>, std::size_t> memo;
  auto key = std::make_tuple(n, leaves, star);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t total = 0;
  if (n == 1) {
    total = leaves;
  } else {
    for (std::size_t a = 1; a < n; ++a) total += count_cl_exact(a, leaves, star) * count_cl_exact(n - a, leaves, star);
    if (star) {
      total += 2 * count_cl_exact(n - 1, leaves, star);
      for (std::size_t a = 1; a + 1 < n; ++a)
        total += count_cl_exact(a, leaves, star) * count_cl_exact(n - 1 - a, leaves, star);
    }
  }
  memo[key] = total;
  return total;
}

std::size_t count_cl_upto(std::size_t n, std::size_t leaves, bool star) {
  std::size_t total = 0;
  for (std::size_t i = 1; i <= n; ++i) total += count_cl_exact(i, leaves, star);
  return total;
}

std::size_t count_lambda_exact(std::size_t n, std::size_t depth) {
  if (n == 0) return 0;
  if (n == 1) return depth;
  std::size_t total = count_lambda_exact(n - 1, depth + 1);
  for (std::size_t a = 1; a < n; ++a) total += count_lambda_exact(a, depth) * count_lambda_exact(n - a, depth);
  return total;
}

CLTerm K() { return CLTerm::k(); }
CLTerm S() { return CLTerm::s(); }
CLTerm X(const char* n) { return CLTerm::meta(n); }
CLTerm ap(CLTerm f, CLTerm a) { return CLTerm::app(std::move(f), std::move(a)); }

}  // namespace

TEST_CASE("parsing builds the expected trees") {
  LambdaTerm self = parse_lambda("\\x. x x");
  REQUIRE(self.is(LamTag::Abs));
  REQUIRE(self.body().is(LamTag::App));
  CHECK(self.body().fun().index() == 0);
  CHECK(self.body().arg().index() == 0);

  CHECK(parse_cl("S K K") == ap(ap(S(), K()), K()));
  CHECK(parse_cl("K'(?x) ?y") == ap(CLTerm::kp(X("x")), X("y")));
  CHECK(parse_cl("S''(K, S)") == CLTerm::spp(K(), S()));
  CHECK(parse_cl("K (S K)") == ap(K(), ap(S(), K())));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse_cl("K ("), ParseError);
  CHECK_THROWS_AS(parse_cl("K'"), ParseError);
  CHECK_THROWS_AS(parse_lambda("\\x."), ParseError);
  CHECK_THROWS_AS(parse_lambda("\\x. y"), OpenTermError);
  CHECK_NOTHROW(parse_lambda("\\x. y", false));
  try {
    parse_cl("S K )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("printing and parsing round-trip") {
  for (const char* text : {"S (K K) (S K K)", "K'(?x) ?y", "S''(K'(S),?x) (K K)", "?x (?y ?z)"})
    CHECK(format_term(parse_cl(text)) == format_term(parse_cl(format_term(parse_cl(text)))));
  CHECK(format_term(parse_cl("S K K")) == "S K K");
  CHECK(format_term(parse_cl("K (S K)")) == "K (S K)");
  for (const auto& t : enumerate_terms(5, {"x"}, Flavor::Star)) CHECK(parse_cl(format_term(t)) == t);
  for (const auto& t : enumerate_lambda(6)) CHECK(parse_lambda(format_term(t)) == t);
}

TEST_CASE("lambda equality ignores binder names") {
  CHECK(parse_lambda("\\x. x") == parse_lambda("\\y. y"));
  CHECK(parse_lambda("\\x y. x") == parse_lambda("\\a b. a"));
  CHECK_FALSE(parse_lambda("\\x y. x") == parse_lambda("\\x y. y"));
  CHECK(debruijn_key(parse_lambda("\\x y. x")) == debruijn_key(parse_lambda("\\p q. p")));
}

TEST_CASE("size counts leaves and administrative constructors") {
  CHECK(parse_cl("S K K").size() == 3);
  CHECK(parse_cl("K'(K)").size() == 2);
  CHECK(parse_cl("S''(K, S) ?x").size() == 4);
  CHECK(parse_lambda("\\x. x x").size() == 3);
}

TEST_CASE("enumeration matches independent counts") {
  auto one = enumerate_terms(1, {}, Flavor::Star);
  CHECK(std::set<CLTerm>(one.begin(), one.end()) == std::set<CLTerm>{K(), S()});

  auto two = enumerate_terms(2, {}, Flavor::Star);
  std::set<CLTerm> expected{K(), S(), CLTerm::kp(K()), CLTerm::kp(S()), CLTerm::sp(K()), CLTerm::sp(S()),
                            ap(K(), K()),  ap(K(), S()),  ap(S(), K()),    ap(S(), S())};
  CHECK(std::set<CLTerm>(two.begin(), two.end()) == expected);

  auto with_x = enumerate_terms(1, {"x"}, Flavor::Star);
  CHECK(std::set<CLTerm>(with_x.begin(), with_x.end()) == std::set<CLTerm>{K(), S(), X("x")});

  for (std::size_t n = 1; n <= 6; ++n) {
    CAPTURE(n);
    CHECK(enumerate_terms(n, {}, Flavor::Star).size() == count_cl_upto(n, 2, true));
    CHECK(enumerate_terms(n, {}, Flavor::Plain).size() == count_cl_upto(n, 2, false));
    CHECK(enumerate_terms(n, {"x", "y"}, Flavor::Star).size() == count_cl_upto(n, 4, true));
  }
  // Exact-size counts of closed CL*: 2, 8, 52, 408.
  CHECK(count_cl_exact(1, 2, true) == 2);
  CHECK(count_cl_exact(4, 2, true) == 408);

  for (std::size_t n = 1; n <= 7; ++n) {
    std::size_t expected_lambda = 0;
    for (std::size_t i = 1; i <= n; ++i) expected_lambda += count_lambda_exact(i, 0);
    CHECK(enumerate_lambda(n).size() == expected_lambda);
  }
}

TEST_CASE("streamed enumeration agrees with the materialised one") {
  std::vector<CLTerm> streamed;
  for_each_term(5, {"x"}, Flavor::Star, [&](const CLTerm& t) { streamed.push_back(t); });
  CHECK(streamed == enumerate_terms(5, {"x"}, Flavor::Star));
  auto all = enumerate_terms(4, {"x", "y"}, Flavor::Star);
  CHECK(std::set<CLTerm>(all.begin(), all.end()).size() == all.size());
  CHECK(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("substitution") {
  CHECK(apply_subst(ap(X("x"), K()), {{"x", S()}}) == ap(S(), K()));
  CHECK(apply_subst(X("x"), {}) == X("x"));
  CHECK(apply_subst(ap(X("x"), X("x")), {{"x", CLTerm::kp(K())}}) == ap(CLTerm::kp(K()), CLTerm::kp(K())));
  CHECK(apply_subst(CLTerm::spp(X("x"), X("y")), {{"y", K()}}) == CLTerm::spp(X("x"), K()));

  Substitution first{{"x", ap(X("y"), K())}};
  Substitution then{{"y", S()}};
  CLTerm t = ap(X("x"), X("y"));
  CHECK(apply_subst(t, compose(first, then)) == apply_subst(apply_subst(t, first), then));
}

TEST_CASE("metavariable helpers") {
  CLTerm t = parse_cl("?b (K'(?a)) ?b ?c");
  CHECK(metavars_in_order(t) == std::vector<std::string>{"b", "a", "c"});
  CHECK(free_metavars(t) == std::set<std::string>{"a", "b", "c"});
  CHECK(fresh_metavar({"y1", "y2"}) == "y3");
  CHECK(fresh_metavar({"y2"}) == "y1");
  auto renamed = canonical_rename({parse_cl("?q ?p"), parse_cl("?p")});
  CHECK(format_term(renamed[0]) == "?v1 ?v2");
  CHECK(format_term(renamed[1]) == "?v2");
}

TEST_CASE("lazy spine classification") {
  CHECK(classify_lazy(X("x")) == SpineClass::bare("x"));
  CHECK(classify_lazy(ap(X("x"), K())) == SpineClass::stuck("x", 1));
  CHECK(classify_lazy(parse_cl("?x K S (K K)")) == SpineClass::stuck("x", 3));
  CHECK(classify_lazy(ap(K(), X("x"))) == SpineClass::reducible());
  CHECK(classify_lazy(CLTerm::kp(X("x"))) == SpineClass::value());
  CHECK(classify_lazy(K()) == SpineClass::value());
}

TEST_CASE("cbv classification") {
  CHECK(classify_cbv(ap(X("x"), X("y"))) == SpineClass::critical("x"));
  CHECK(classify_cbv(CLTerm::kp(K())) == SpineClass::value());
  CHECK(classify_cbv(ap(ap(K(), X("x")), X("y"))) == SpineClass::reducible());
  CHECK(classify_cbv(X("x")) == SpineClass::bare("x"));
  // A critical variable buried under a value in argument position.
  CHECK(classify_cbv(parse_cl("K (?y K)")) == SpineClass::critical("y"));
  CHECK(classify_cbv(parse_cl("?x (K K)")) == SpineClass::reducible());
}

TEST_CASE("every open term of size at most 5 has exactly one lazy class and one cbv class") {
  for (const auto& t : enumerate_terms(5, {"x", "y"}, Flavor::Star)) {
    CAPTURE(format_term(t));
    SpineClass lazy = classify_lazy(t);
    Spine sp = unwind(t);
    if (sp.head.is(CLTag::Meta))
      CHECK((lazy.kind == (sp.args.empty() ? SpineClass::Kind::BareVar : SpineClass::Kind::HeadStuck)));
    else
      CHECK((lazy.kind == (sp.args.empty() ? SpineClass::Kind::Value : SpineClass::Kind::Reducible)));
    CHECK_NOTHROW(classify_cbv(t));
  }
}

TEST_CASE("free lambda variables compare by name") {
  LambdaTerm parsed = parse_lambda("f b a", false);
  LambdaTerm built = LambdaTerm::app(LambdaTerm::app(LambdaTerm::var(0, "f"), LambdaTerm::var(1, "b")),
                                     LambdaTerm::var(2, "a"));
  CHECK(parsed == built);
  CHECK(parse_lambda("\\x. x f", false) == parse_lambda("\\y. y f", false));
  CHECK_FALSE(parse_lambda("\\x. x f", false) == parse_lambda("\\x. x g", false));
  CHECK_FALSE(parse_lambda("\\x. f", false) == parse_lambda("\\x. x", false));
  CHECK(is_closed(parse_lambda("\\x. x")));
  CHECK_FALSE(is_closed(parse_lambda("\\x. f", false)));
}
