#include "ipobisim/unify.hpp"

#include <vector>

namespace ipobisim {

namespace {

// Follows variable-to-term bindings of a triangular substitution at the root only.
const CLTerm& walk(const CLTerm& t, const Substitution& bindings) {
  const CLTerm* u = &t;
  while (u->is(CLTag::Meta)) {
    auto it = bindings.find(u->name());
    if (it == bindings.end()) break;
    u = &it->second;
  }
  return *u;
}

bool occurs(const std::string& var, const CLTerm& t, const Substitution& bindings) {
  const CLTerm& u = walk(t, bindings);
  switch (u.tag()) {
    case CLTag::Meta:
      return u.name() == var;
    case CLTag::K:
    case CLTag::S:
      return false;
    case CLTag::Kp:
    case CLTag::Sp:
      return occurs(var, u.first(), bindings);
    case CLTag::Spp:
      return occurs(var, u.first(), bindings) || occurs(var, u.second(), bindings);
    case CLTag::App:
      return occurs(var, u.fun(), bindings) || occurs(var, u.arg(), bindings);
  }
  return false;
}

// Applies the bindings all the way down; subterms without bound variables are shared.
bool resolve_into(const CLTerm& t, const Substitution& bindings, CLTerm& out) {
  const CLTerm& u = walk(t, bindings);
  bool moved = &u != &t;
  switch (u.tag()) {
    case CLTag::Meta:
    case CLTag::K:
    case CLTag::S:
      out = u;
      return moved;
    case CLTag::Kp:
    case CLTag::Sp: {
      CLTerm inner;
      if (!resolve_into(u.first(), bindings, inner)) {
        out = u;
        return moved;
      }
      out = u.is(CLTag::Kp) ? CLTerm::kp(std::move(inner)) : CLTerm::sp(std::move(inner));
      return true;
    }
    case CLTag::Spp: {
      CLTerm a, b;
      bool ca = resolve_into(u.first(), bindings, a);
      bool cb = resolve_into(u.second(), bindings, b);
      if (!ca && !cb) {
        out = u;
        return moved;
      }
      out = CLTerm::spp(std::move(a), std::move(b));
      return true;
    }
    case CLTag::App: {
      CLTerm f, x;
      bool cf = resolve_into(u.fun(), bindings, f);
      bool cx = resolve_into(u.arg(), bindings, x);
      if (!cf && !cx) {
        out = u;
        return moved;
      }
      out = CLTerm::app(std::move(f), std::move(x));
      return true;
    }
  }
  out = u;
  return moved;
}

}  // namespace

std::optional<Substitution> mgu_all(const std::vector<std::pair<CLTerm, CLTerm>>& equations) {
  Substitution bindings;
  std::vector<std::pair<CLTerm, CLTerm>> work(equations.rbegin(), equations.rend());
  work.reserve(32);
  while (!work.empty()) {
    auto [l0, r0] = std::move(work.back());
    work.pop_back();
    const CLTerm l = walk(l0, bindings);
    const CLTerm r = walk(r0, bindings);
    if (l.is(CLTag::Meta) && r.is(CLTag::Meta) && l.name() == r.name()) continue;
    if (l.is(CLTag::Meta)) {
      if (occurs(l.name(), r, bindings)) return std::nullopt;
      bindings.emplace(l.name(), r);
      continue;
    }
    if (r.is(CLTag::Meta)) {
      if (occurs(r.name(), l, bindings)) return std::nullopt;
      bindings.emplace(r.name(), l);
      continue;
    }
    if (l.tag() != r.tag()) return std::nullopt;
    switch (l.tag()) {
      case CLTag::K:
      case CLTag::S:
      case CLTag::Meta:
        break;
      case CLTag::Kp:
      case CLTag::Sp:
        work.emplace_back(l.first(), r.first());
        break;
      case CLTag::Spp:
        work.emplace_back(l.second(), r.second());
        work.emplace_back(l.first(), r.first());
        break;
      case CLTag::App:
        work.emplace_back(l.arg(), r.arg());
        work.emplace_back(l.fun(), r.fun());
        break;
    }
  }
  Substitution out;
  for (const auto& [name, value] : bindings) {
    CLTerm resolved;
    resolve_into(value, bindings, resolved);
    out.emplace_hint(out.end(), name, std::move(resolved));
  }
  return out;
}

std::optional<Substitution> mgu(const CLTerm& a, const CLTerm& b) { return mgu_all({{a, b}}); }

Renamed rename_apart(const CLTerm& t, const std::set<std::string>& avoid, std::string_view prefix) {
  std::set<std::string> taken = avoid;
  Renamed out{t, {}};
  Substitution theta;
  for (const auto& name : metavars_in_order(t)) {
    std::string fresh = fresh_metavar(taken, prefix);
    taken.insert(fresh);
    out.renaming.emplace(name, fresh);
    theta.emplace(name, CLTerm::meta(fresh));
  }
  out.term = apply_subst(t, theta);
  return out;
}

Substitution restrict_to(const Substitution& theta, const std::set<std::string>& names) {
  Substitution out;
  for (const auto& [k, v] : theta)
    if (names.count(k)) out.emplace(k, v);
  return out;
}

}  // namespace ipobisim
