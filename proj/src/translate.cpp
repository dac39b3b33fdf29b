#include "ipobisim/translate.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ipobisim/reduction.hpp"

namespace ipobisim {

namespace {

// Lambda terms over K and S with named variables; only used while translating.
struct Mixed;
using MixedPtr = std::shared_ptr<const Mixed>;

struct Mixed {
  enum class Tag { Var, Lam, App, K, S } tag;
  std::string name;  // Var, Lam
  MixedPtr a;        // Lam body, App function
  MixedPtr b;        // App argument
};

MixedPtr mk_var(std::string n) { return std::make_shared<Mixed>(Mixed{Mixed::Tag::Var, std::move(n), {}, {}}); }
MixedPtr mk_lam(std::string n, MixedPtr body) {
  return std::make_shared<Mixed>(Mixed{Mixed::Tag::Lam, std::move(n), std::move(body), {}});
}
MixedPtr mk_app(MixedPtr f, MixedPtr x) {
  return std::make_shared<Mixed>(Mixed{Mixed::Tag::App, {}, std::move(f), std::move(x)});
}
MixedPtr mk_k() { return std::make_shared<Mixed>(Mixed{Mixed::Tag::K, {}, {}, {}}); }
MixedPtr mk_s() { return std::make_shared<Mixed>(Mixed{Mixed::Tag::S, {}, {}, {}}); }

// Bound names get a '#' prefix, which the surface syntax cannot produce, so they never
// collide with free variable names.
MixedPtr from_lambda(const LambdaTerm& t, std::vector<std::string>& scope, int& counter) {
  switch (t.tag()) {
    case LamTag::Var: {
      int depth = static_cast<int>(scope.size());
      if (t.index() < depth) return mk_var(scope[depth - 1 - t.index()]);
      return mk_var(t.name());
    }
    case LamTag::Abs: {
      std::string n = "#" + std::to_string(counter++);
      scope.push_back(n);
      MixedPtr body = from_lambda(t.body(), scope, counter);
      scope.pop_back();
      return mk_lam(n, body);
    }
    case LamTag::App: {
      MixedPtr f = from_lambda(t.fun(), scope, counter);
      return mk_app(f, from_lambda(t.arg(), scope, counter));
    }
  }
  return nullptr;
}

// The result contains no Lam node.
MixedPtr translate(const MixedPtr& t) {
  using Tag = Mixed::Tag;
  switch (t->tag) {
    case Tag::Var:
    case Tag::K:
    case Tag::S:
      return t;
    case Tag::App:
      return mk_app(translate(t->a), translate(t->b));
    case Tag::Lam:
      break;
  }
  const std::string& x = t->name;
  const MixedPtr& body = t->a;
  switch (body->tag) {
    case Tag::Var:
      if (body->name == x) return mk_app(mk_app(mk_s(), mk_k()), mk_k());
      return mk_app(mk_k(), body);
    case Tag::App:
      return mk_app(mk_app(mk_s(), translate(mk_lam(x, body->a))), translate(mk_lam(x, body->b)));
    case Tag::Lam:
      return translate(mk_lam(x, translate(body)));
    case Tag::K:
    case Tag::S:
      return mk_app(mk_k(), body);
  }
  return t;
}

CLTerm to_clterm(const MixedPtr& t) {
  switch (t->tag) {
    case Mixed::Tag::Var:
      return CLTerm::meta(t->name);
    case Mixed::Tag::K:
      return CLTerm::k();
    case Mixed::Tag::S:
      return CLTerm::s();
    case Mixed::Tag::App:
      return CLTerm::app(to_clterm(t->a), to_clterm(t->b));
    case Mixed::Tag::Lam:
      break;
  }
  throw std::logic_error("translation left an abstraction behind");
}

LambdaTerm lambda_k() { return LambdaTerm::abs("x", LambdaTerm::abs("y", LambdaTerm::var(1, "x"))); }

LambdaTerm lambda_s() {
  auto x = LambdaTerm::var(2, "x");
  auto y = LambdaTerm::var(1, "y");
  auto z = LambdaTerm::var(0, "z");
  return LambdaTerm::abs(
      "x", LambdaTerm::abs("y", LambdaTerm::abs("z", LambdaTerm::app(LambdaTerm::app(x, z),
                                                                      LambdaTerm::app(y, z)))));
}

LambdaTerm embed(const CLTerm& t, const std::vector<std::string>& free) {
  switch (t.tag()) {
    case CLTag::K:
      return lambda_k();
    case CLTag::S:
      return lambda_s();
    case CLTag::Kp:
      return LambdaTerm::app(lambda_k(), embed(t.first(), free));
    case CLTag::Sp:
      return LambdaTerm::app(lambda_s(), embed(t.first(), free));
    case CLTag::Spp:
      return LambdaTerm::app(LambdaTerm::app(lambda_s(), embed(t.first(), free)),
                             embed(t.second(), free));
    case CLTag::App:
      return LambdaTerm::app(embed(t.fun(), free), embed(t.arg(), free));
    case CLTag::Meta: {
      int k = 0;
      while (free[k] != t.name()) ++k;
      return LambdaTerm::var(k, t.name());
    }
  }
  return lambda_k();
}

}  // namespace

CLTerm to_cl(const LambdaTerm& m) {
  std::vector<std::string> scope;
  int counter = 0;
  return to_clterm(translate(from_lambda(m, scope, counter)));
}

LambdaTerm to_lambda(const CLTerm& t) { return embed(t, metavars_in_order(t)); }

ETCheck check_ET_identity(const LambdaTerm& m, std::size_t fuel) {
  auto lhs = normalize_tau(to_lambda(to_cl(m)), Strategy::NormalFull, fuel);
  auto rhs = normalize_tau(m, Strategy::NormalFull, fuel);
  ETCheck out{ETStatus::Confirmed, rhs.result, lhs.result};
  if (lhs.status == NormalStatus::FuelExhausted || rhs.status == NormalStatus::FuelExhausted)
    out.status = ETStatus::FuelExhausted;
  else if (!(lhs.result == rhs.result))
    out.status = ETStatus::Mismatch;
  return out;
}

std::string to_string(ETStatus s) {
  switch (s) {
    case ETStatus::Confirmed:
      return "Confirmed";
    case ETStatus::FuelExhausted:
      return "FuelExhausted";
    case ETStatus::Mismatch:
      return "Mismatch";
  }
  return "?";
}

}  // namespace ipobisim
