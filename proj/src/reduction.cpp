#include "ipobisim/reduction.hpp"

#include <algorithm>
#include <stdexcept>

namespace ipobisim {

std::string to_string(Calculus c) {
  switch (c) {
    case Calculus::Lambda:
      return "lambda";
    case Calculus::CL:
      return "cl";
    case Calculus::CLStar:
      return "clstar";
  }
  return "?";
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Lazy:
      return "lazy";
    case Strategy::Cbv:
      return "cbv";
    case Strategy::NormalFull:
      return "normal_full";
  }
  return "?";
}

Calculus parse_calculus(std::string_view s) {
  if (s == "lambda") return Calculus::Lambda;
  if (s == "cl") return Calculus::CL;
  if (s == "clstar") return Calculus::CLStar;
  throw std::invalid_argument("unknown calculus: " + std::string(s));
}

Strategy parse_strategy(std::string_view s) {
  if (s == "lazy") return Strategy::Lazy;
  if (s == "cbv") return Strategy::Cbv;
  if (s == "normal_full") return Strategy::NormalFull;
  throw std::invalid_argument("unknown strategy: " + std::string(s));
}

namespace {

using CLStep = StepResult<CLTerm>;
using LamStep = StepResult<LambdaTerm>;

CLStep stepped(CLTerm t) { return {StepKind::Stepped, std::move(t), {}, {}}; }
CLStep halted(const CLTerm& t, SpineClass c) { return {StepKind::Halted, t, std::move(c), {}}; }
CLStep stuck(const CLTerm& t, SpineClass c) {
  std::string v = c.var;
  return {StepKind::StuckOpen, t, std::move(c), std::move(v)};
}

// --- CL* rules: every combinator form fires on exactly one argument.
CLTerm fire_star(const CLTerm& c, const CLTerm& x) {
  switch (c.tag()) {
    case CLTag::K:
      return CLTerm::kp(x);
    case CLTag::S:
      return CLTerm::sp(x);
    case CLTag::Kp:
      return c.first();
    case CLTag::Sp:
      return CLTerm::spp(c.first(), x);
    case CLTag::Spp:
      return CLTerm::app(CLTerm::app(c.first(), x), CLTerm::app(c.second(), x));
    default:
      throw std::logic_error("fire_star: not a combinator form");
  }
}

void require_plain_node(const CLTerm& t) {
  if (t.is(CLTag::Kp) || t.is(CLTag::Sp) || t.is(CLTag::Spp))
    throw std::invalid_argument("K'/S'/S'' forms are not plain CL: " + format_term(t));
}

CLStep lazy_plain(const CLTerm& t) {
  Spine sp = unwind(t);
  const CLTerm& h = sp.head;
  require_plain_node(h);
  if (h.is(CLTag::Meta)) {
    if (sp.args.empty()) return stuck(t, SpineClass::bare(h.name()));
    return stuck(t, SpineClass::stuck(h.name(), sp.args.size()));
  }
  std::size_t n = sp.args.size();
  if (h.is(CLTag::K) && n >= 2) {
    CLTerm r = sp.args[0];
    for (std::size_t i = 2; i < n; ++i) r = CLTerm::app(r, sp.args[i]);
    return stepped(r);
  }
  if (h.is(CLTag::S) && n >= 3) {
    CLTerm r = CLTerm::app(CLTerm::app(sp.args[0], sp.args[2]), CLTerm::app(sp.args[1], sp.args[2]));
    for (std::size_t i = 3; i < n; ++i) r = CLTerm::app(r, sp.args[i]);
    return stepped(r);
  }
  return halted(t, SpineClass::value());
}

CLStep lazy_star(const CLTerm& t) {
  Spine sp = unwind(t);
  const CLTerm& h = sp.head;
  if (h.is(CLTag::Meta)) {
    if (sp.args.empty()) return stuck(t, SpineClass::bare(h.name()));
    return stuck(t, SpineClass::stuck(h.name(), sp.args.size()));
  }
  if (sp.args.empty()) return halted(t, SpineClass::value());
  CLTerm r = fire_star(h, sp.args[0]);
  for (std::size_t i = 1; i < sp.args.size(); ++i) r = CLTerm::app(r, sp.args[i]);
  return stepped(r);
}

bool plain_cbv_value(const CLTerm& t) {
  Spine sp = unwind(t);
  if (sp.head.is(CLTag::K)) {
    if (sp.args.size() > 1) return false;
  } else if (sp.head.is(CLTag::S)) {
    if (sp.args.size() > 2) return false;
  } else {
    return false;
  }
  for (const auto& a : sp.args)
    if (!plain_cbv_value(a)) return false;
  return true;
}

CLStep cbv_plain(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return halted(t, SpineClass::value());
    case CLTag::Meta:
      return stuck(t, SpineClass::bare(t.name()));
    case CLTag::App:
      break;
    default:
      require_plain_node(t);
  }
  const CLTerm& f = t.fun();
  const CLTerm& a = t.arg();
  if (!plain_cbv_value(f)) {
    CLStep r = cbv_plain(f);
    if (r.kind == StepKind::Stepped) return stepped(CLTerm::app(r.next, a));
    return stuck(t, SpineClass::critical(r.var));
  }
  if (!plain_cbv_value(a)) {
    CLStep r = cbv_plain(a);
    if (r.kind == StepKind::Stepped) return stepped(CLTerm::app(f, r.next));
    return stuck(t, SpineClass::critical(r.var));
  }
  if (f.is(CLTag::App) && f.fun().is(CLTag::K)) return stepped(f.arg());
  if (f.is(CLTag::App) && f.fun().is(CLTag::App) && f.fun().fun().is(CLTag::S)) {
    const CLTerm& v1 = f.fun().arg();
    const CLTerm& v2 = f.arg();
    return stepped(CLTerm::app(CLTerm::app(v1, a), CLTerm::app(v2, a)));
  }
  return halted(t, SpineClass::value());
}

CLStep cbv_star(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return halted(t, SpineClass::value());
    case CLTag::Meta:
      return halted(t, SpineClass::bare(t.name()));
    case CLTag::Kp:
    case CLTag::Sp: {
      if (is_cbv_value(t.first())) return halted(t, SpineClass::value());
      CLStep r = cbv_star(t.first());
      if (r.kind != StepKind::Stepped) return stuck(t, SpineClass::critical(r.var));
      return stepped(t.is(CLTag::Kp) ? CLTerm::kp(r.next) : CLTerm::sp(r.next));
    }
    case CLTag::Spp: {
      if (!is_cbv_value(t.first())) {
        CLStep r = cbv_star(t.first());
        if (r.kind != StepKind::Stepped) return stuck(t, SpineClass::critical(r.var));
        return stepped(CLTerm::spp(r.next, t.second()));
      }
      if (!is_cbv_value(t.second())) {
        CLStep r = cbv_star(t.second());
        if (r.kind != StepKind::Stepped) return stuck(t, SpineClass::critical(r.var));
        return stepped(CLTerm::spp(t.first(), r.next));
      }
      return halted(t, SpineClass::value());
    }
    case CLTag::App:
      break;
  }
  const CLTerm& f = t.fun();
  const CLTerm& a = t.arg();
  if (!is_cbv_value(f)) {
    CLStep r = cbv_star(f);
    if (r.kind != StepKind::Stepped) return stuck(t, SpineClass::critical(r.var));
    return stepped(CLTerm::app(r.next, a));
  }
  if (!is_cbv_value(a)) {
    CLStep r = cbv_star(a);
    if (r.kind != StepKind::Stepped) return stuck(t, SpineClass::critical(r.var));
    return stepped(CLTerm::app(f, r.next));
  }
  if (f.is(CLTag::Meta)) return stuck(t, SpineClass::critical(f.name()));
  return stepped(fire_star(f, a));
}

// --- lambda

LambdaTerm shift_at(const LambdaTerm& t, int by, int cutoff) {
  switch (t.tag()) {
    case LamTag::Var:
      if (t.index() >= cutoff) return LambdaTerm::var(t.index() + by, t.name());
      return t;
    case LamTag::Abs:
      return LambdaTerm::abs(t.name(), shift_at(t.body(), by, cutoff + 1));
    case LamTag::App:
      return LambdaTerm::app(shift_at(t.fun(), by, cutoff), shift_at(t.arg(), by, cutoff));
  }
  return t;
}

LambdaTerm subst_top(const LambdaTerm& t, const LambdaTerm& arg, bool arg_closed, int depth) {
  switch (t.tag()) {
    case LamTag::Var:
      if (t.index() == depth) return arg_closed ? arg : shift_at(arg, depth, 0);
      if (t.index() > depth) return LambdaTerm::var(t.index() - 1, t.name());
      return t;
    case LamTag::Abs:
      return LambdaTerm::abs(t.name(), subst_top(t.body(), arg, arg_closed, depth + 1));
    case LamTag::App:
      return LambdaTerm::app(subst_top(t.fun(), arg, arg_closed, depth),
                             subst_top(t.arg(), arg, arg_closed, depth));
  }
  return t;
}

LamStep lam_stepped(LambdaTerm t) { return {StepKind::Stepped, std::move(t), {}, {}}; }
LamStep lam_halted(const LambdaTerm& t) { return {StepKind::Halted, t, SpineClass::value(), {}}; }
LamStep lam_stuck(const LambdaTerm& t, const std::string& v) {
  return {StepKind::StuckOpen, t, SpineClass::bare(v), v};
}

struct LamSpine {
  LambdaTerm head;
  std::vector<LambdaTerm> args;
};

LamSpine lam_unwind(const LambdaTerm& t) {
  LamSpine sp;
  LambdaTerm cur = t;
  while (cur.is(LamTag::App)) {
    sp.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(sp.args.begin(), sp.args.end());
  sp.head = cur;
  return sp;
}

LamStep lam_lazy(const LambdaTerm& t) {
  LamSpine sp = lam_unwind(t);
  if (sp.head.is(LamTag::Var)) return lam_stuck(t, sp.head.name());
  if (sp.args.empty()) return lam_halted(t);
  LambdaTerm r = beta(sp.head, sp.args[0]);
  for (std::size_t i = 1; i < sp.args.size(); ++i) r = LambdaTerm::app(r, sp.args[i]);
  return lam_stepped(r);
}

LamStep lam_cbv(const LambdaTerm& t) {
  switch (t.tag()) {
    case LamTag::Var:
      return lam_stuck(t, t.name());
    case LamTag::Abs:
      return lam_halted(t);
    case LamTag::App:
      break;
  }
  const LambdaTerm& f = t.fun();
  const LambdaTerm& a = t.arg();
  if (!f.is(LamTag::Abs)) {
    LamStep r = lam_cbv(f);
    if (r.kind != StepKind::Stepped) return lam_stuck(t, r.var);
    return lam_stepped(LambdaTerm::app(r.next, a));
  }
  if (!a.is(LamTag::Abs)) {
    LamStep r = lam_cbv(a);
    if (r.kind != StepKind::Stepped) return lam_stuck(t, r.var);
    return lam_stepped(LambdaTerm::app(f, r.next));
  }
  return lam_stepped(beta(f, a));
}

LamStep lam_normal(const LambdaTerm& t) {
  LamSpine sp = lam_unwind(t);
  if (sp.head.is(LamTag::Abs)) {
    if (!sp.args.empty()) {
      LambdaTerm r = beta(sp.head, sp.args[0]);
      for (std::size_t i = 1; i < sp.args.size(); ++i) r = LambdaTerm::app(r, sp.args[i]);
      return lam_stepped(r);
    }
    LamStep b = lam_normal(sp.head.body());
    if (b.kind != StepKind::Stepped) return lam_halted(t);
    return lam_stepped(LambdaTerm::abs(sp.head.name(), b.next));
  }
  for (std::size_t i = 0; i < sp.args.size(); ++i) {
    LamStep r = lam_normal(sp.args[i]);
    if (r.kind == StepKind::Stepped) {
      sp.args[i] = r.next;
      return lam_stepped(apply_all(sp.head, sp.args));
    }
  }
  return lam_halted(t);
}

LamStep lam_step_unchecked(const LambdaTerm& t, Strategy s) {
  switch (s) {
    case Strategy::Lazy:
      return lam_lazy(t);
    case Strategy::Cbv:
      return lam_cbv(t);
    case Strategy::NormalFull:
      return lam_normal(t);
  }
  return lam_halted(t);
}

void require_closed(const LambdaTerm& t, Strategy s) {
  if (s == Strategy::NormalFull) return;
  if (!is_closed(t)) {
    auto fv = free_vars(t);
    throw OpenTermError(fv.empty() ? std::string("?") : *fv.begin());
  }
}

}  // namespace

StepResult<CLTerm> step(const CLTerm& t, Calculus calculus, Strategy strategy) {
  if (calculus == Calculus::Lambda)
    throw std::invalid_argument("lambda calculus expects a LambdaTerm");
  if (strategy == Strategy::NormalFull)
    throw std::invalid_argument("normal_full is defined only on lambda terms");
  if (calculus == Calculus::CL) return strategy == Strategy::Lazy ? lazy_plain(t) : cbv_plain(t);
  return strategy == Strategy::Lazy ? lazy_star(t) : cbv_star(t);
}

StepResult<LambdaTerm> step(const LambdaTerm& t, Strategy strategy) {
  require_closed(t, strategy);
  return lam_step_unchecked(t, strategy);
}

NormalizeOutcome<CLTerm> normalize_tau(const CLTerm& t, Calculus calculus, Strategy strategy,
                                       std::size_t fuel) {
  NormalizeOutcome<CLTerm> out{t, NormalStatus::Normal, 0};
  while (true) {
    auto r = step(out.result, calculus, strategy);
    if (r.kind != StepKind::Stepped) return out;
    if (out.steps == fuel) {
      out.status = NormalStatus::FuelExhausted;
      return out;
    }
    out.result = std::move(r.next);
    ++out.steps;
  }
}

NormalizeOutcome<LambdaTerm> normalize_tau(const LambdaTerm& t, Strategy strategy,
                                           std::size_t fuel) {
  require_closed(t, strategy);
  NormalizeOutcome<LambdaTerm> out{t, NormalStatus::Normal, 0};
  while (true) {
    auto r = lam_step_unchecked(out.result, strategy);
    if (r.kind != StepKind::Stepped) return out;
    if (out.steps == fuel) {
      out.status = NormalStatus::FuelExhausted;
      return out;
    }
    out.result = std::move(r.next);
    ++out.steps;
  }
}

bool is_value(const CLTerm& t, Calculus calculus, Strategy strategy) {
  if (calculus == Calculus::CL) {
    if (strategy == Strategy::Cbv) return plain_cbv_value(t);
    Spine sp = unwind(t);
    if (sp.head.is(CLTag::K)) return sp.args.size() < 2;
    if (sp.head.is(CLTag::S)) return sp.args.size() < 3;
    return false;
  }
  return strategy == Strategy::Cbv ? is_cbv_value(t) : is_lazy_value(t);
}

bool is_value(const LambdaTerm& t) { return t.is(LamTag::Abs); }

LambdaTerm beta(const LambdaTerm& abstraction, const LambdaTerm& argument) {
  if (!abstraction.is(LamTag::Abs)) throw std::invalid_argument("beta: not an abstraction");
  return subst_top(abstraction.body(), argument, is_closed(argument), 0);
}

LambdaTerm shift(const LambdaTerm& t, int by, int cutoff) { return shift_at(t, by, cutoff); }

std::size_t missing_args(const CLTerm& plain_value) {
  Spine sp = unwind(plain_value);
  std::size_t need = sp.head.is(CLTag::K) ? 2 : sp.head.is(CLTag::S) ? 3 : 0;
  return need > sp.args.size() ? need - sp.args.size() : 0;
}

}  // namespace ipobisim
