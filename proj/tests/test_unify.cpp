#include <doctest.h>

#include <random>

#include "ipobisim/unify.hpp"

using namespace ipobisim;

namespace {

CLTerm cl(const char* s) { return parse_cl(s); }

void check_unifier(const CLTerm& a, const CLTerm& b, const Substitution& theta) {
  CLTerm ua = apply_subst(a, theta);
  CHECK(ua == apply_subst(b, theta));
  CHECK(apply_subst(ua, theta) == ua);
}

}  // namespace

TEST_CASE("unifier examples") {
  auto a = mgu(cl("K ?x1"), cl("K K"));
  REQUIRE(a);
  CHECK(*a == Substitution{{"x1", cl("K")}});

  CHECK_FALSE(mgu(cl("?x"), cl("K'(?x)")));
  CHECK_FALSE(mgu(cl("K"), cl("S")));
  CHECK_FALSE(mgu(cl("K'(?x)"), cl("S'(?x)")));

  auto b = mgu(cl("?x K"), cl("K'(?a) ?b"));
  REQUIRE(b);
  CHECK(*b == Substitution{{"b", cl("K")}, {"x", cl("K'(?a)")}});
  check_unifier(cl("?x K"), cl("K'(?a) ?b"), *b);

  auto c = mgu(cl("?x"), cl("?y"));
  REQUIRE(c);
  CHECK(*c == Substitution{{"x", cl("?y")}});
  CHECK(mgu(cl("?x"), cl("?x"))->empty());
}

TEST_CASE("bindings are fully resolved") {
  auto theta = mgu_all({{cl("?x"), cl("?y K")}, {cl("?y"), cl("S''(?z,K)")}, {cl("?z"), cl("S")}});
  REQUIRE(theta);
  CHECK(theta->at("x") == cl("S''(S,K) K"));
  CHECK(theta->at("y") == cl("S''(S,K)"));
  CHECK_FALSE(mgu_all({{cl("?x"), cl("?y K")}, {cl("?y"), cl("?x")}}));
}

TEST_CASE("renaming apart") {
  auto r = rename_apart(cl("K ?x"), {"x"});
  CHECK(r.term == cl("K ?y1"));
  CHECK(r.renaming == std::map<std::string, std::string>{{"x", "y1"}});
  auto k = rename_apart(cl("K"), {"x"});
  CHECK(k.term == cl("K"));
  CHECK(k.renaming.empty());
  auto twice = rename_apart(cl("?x ?x"), {"x", "y1"});
  CHECK(twice.term == cl("?y2 ?y2"));
  CHECK(twice.renaming == std::map<std::string, std::string>{{"x", "y2"}});
}

TEST_CASE("restriction") {
  Substitution theta{{"a", cl("K")}, {"b", cl("S")}};
  CHECK(restrict_to(theta, {"b", "c"}) == Substitution{{"b", cl("S")}});
}

TEST_CASE("mgu is sound, idempotent and most general on random pairs") {
  auto pool = enumerate_terms(4, {"x", "y"}, Flavor::Star);
  auto closed = enumerate_terms(3, {}, Flavor::Star);
  std::mt19937_64 rng(7);
  std::size_t unified = 0;
  for (int i = 0; i < 3000; ++i) {
    CLTerm a = pool[rng() % pool.size()];
    CLTerm b = pool[rng() % pool.size()];
    auto theta = mgu(a, b);
    if (!theta) {
      // No closed instance can make them equal either.
      Substitution ground;
      for (const auto& m : {"x", "y"}) ground.emplace(m, closed[rng() % closed.size()]);
      CHECK_FALSE(apply_subst(a, ground) == apply_subst(b, ground));
      continue;
    }
    ++unified;
    check_unifier(a, b, *theta);
    // Any closed unifier factors through theta: grounding theta's image gives back a unifier.
    Substitution ground;
    for (const auto& m : {"x", "y"}) ground.emplace(m, closed[rng() % closed.size()]);
    CHECK(apply_subst(apply_subst(a, *theta), ground) == apply_subst(apply_subst(b, *theta), ground));
  }
  CHECK(unified > 0);
}

TEST_CASE("an instance always unifies with its pattern") {
  auto pool = enumerate_terms(4, {"x", "y"}, Flavor::Star);
  auto closed = enumerate_terms(3, {}, Flavor::Star);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    CLTerm a = pool[rng() % pool.size()];
    Substitution sigma{{"x", closed[rng() % closed.size()]}, {"y", closed[rng() % closed.size()]}};
    CLTerm b = apply_subst(a, sigma);
    auto theta = mgu(a, b);
    REQUIRE(theta);
    check_unifier(a, b, *theta);
    CHECK(restrict_to(*theta, free_metavars(a)) == restrict_to(sigma, free_metavars(a)));
  }
}
