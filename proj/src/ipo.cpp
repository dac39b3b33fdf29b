#include "ipobisim/ipo.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include "ipobisim/unify.hpp"
#include "json.hpp"

namespace ipobisim {

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string wrapped(const CLTerm& t) {
  std::string s = format_term(t);
  return t.is(CLTag::App) ? "(" + s + ")" : s;
}

std::string wrapped(const LambdaTerm& t) {
  std::string s = format_term(t);
  return t.is(LamTag::Var) ? s : "(" + s + ")";
}

template <class T>
std::string format_label_impl(const LabelT<T>& l) {
  std::string out;
  if (l.left) out += wrapped(*l.left) + " ";
  if (l.subst.empty()) {
    out += "[_]";
  } else {
    out += "[_{";
    bool first = true;
    for (const auto& [name, term] : l.subst) {
      if (!first) out += ", ";
      first = false;
      out += "?" + name + ":=" + format_term(term);
    }
    out += "}]";
  }
  for (const auto& a : l.args) out += " " + wrapped(a);
  return out;
}

}  // namespace

std::string format_label(const Label& l) { return format_label_impl(l); }
std::string format_label(const LambdaLabel& l) { return format_label_impl(l); }

std::string to_string(Order o) { return o == Order::First ? "first" : "second"; }

std::string to_string(LabelSet s) {
  switch (s) {
    case LabelSet::ReactiveOnly:
      return "reactive";
    case LabelSet::AllIpo:
      return "all";
    case LabelSet::Finite:
      return "finite";
  }
  return "?";
}

Order parse_order(std::string_view s) {
  if (s == "first") return Order::First;
  if (s == "second") return Order::Second;
  throw std::invalid_argument("unknown order: " + std::string(s));
}

LabelSet parse_label_set(std::string_view s) {
  if (s == "reactive" || s == "reactive_only") return LabelSet::ReactiveOnly;
  if (s == "all" || s == "all_ipo") return LabelSet::AllIpo;
  if (s == "finite") return LabelSet::Finite;
  throw std::invalid_argument("unknown label set: " + std::string(s));
}

std::string describe(const Config& cfg) {
  return to_string(cfg.calculus) + "/" + to_string(cfg.order) + "/" + to_string(cfg.strategy) + "/" +
         to_string(cfg.label_set) + "/pool=" + std::to_string(cfg.arg_pool);
}

void validate(const Config& cfg) {
  if (cfg.strategy == Strategy::NormalFull)
    throw UnsupportedConfig("normal_full is an oracle stepper, not an LTS strategy");
  if (cfg.order == Order::Second && cfg.calculus != Calculus::CLStar)
    throw UnsupportedConfig("second-order labels exist only for clstar");
  if (cfg.label_set == LabelSet::Finite &&
      !(cfg.calculus == Calculus::CLStar && cfg.order == Order::Second && cfg.strategy == Strategy::Lazy))
    throw UnsupportedConfig("the finite label set exists only for clstar/second/lazy");
}

// ---------------------------------------------------------------------------
// Pools

CLTerm cl_omega() {
  CLTerm i = CLTerm::app(CLTerm::app(CLTerm::s(), CLTerm::k()), CLTerm::k());
  CLTerm half = CLTerm::app(CLTerm::app(CLTerm::s(), i), i);
  return CLTerm::app(half, half);
}

LambdaTerm lambda_omega() {
  LambdaTerm x = LambdaTerm::var(0, "x");
  LambdaTerm delta = LambdaTerm::abs("x", LambdaTerm::app(x, x));
  return LambdaTerm::app(delta, delta);
}

namespace {

std::mutex pool_mutex;

std::vector<CLTerm> closed_cl(Calculus calculus, std::size_t bound) {
  Flavor f = calculus == Calculus::CL ? Flavor::Plain : Flavor::Star;
  return enumerate_terms(bound, {}, f);
}

// Closed non-values up to the bound, for the "non-value argument" label families.
const std::vector<CLTerm>& nonvalue_pool(Calculus calculus, Strategy strategy, std::size_t bound) {
  static std::map<std::tuple<Calculus, Strategy, std::size_t>, std::vector<CLTerm>> cache;
  std::lock_guard<std::mutex> lock(pool_mutex);
  auto key = std::make_tuple(calculus, strategy, bound);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<CLTerm> out;
  for (const auto& t : closed_cl(calculus, bound))
    if (!is_value(t, calculus, strategy)) out.push_back(t);
  return cache.emplace(key, std::move(out)).first->second;
}

const std::vector<LambdaTerm>& lambda_nonvalue_pool(std::size_t bound) {
  static std::map<std::size_t, std::vector<LambdaTerm>> cache;
  std::lock_guard<std::mutex> lock(pool_mutex);
  auto it = cache.find(bound);
  if (it != cache.end()) return it->second;
  std::vector<LambdaTerm> out;
  for (const auto& t : enumerate_lambda(bound))
    if (!is_value(t)) out.push_back(t);
  return cache.emplace(bound, std::move(out)).first->second;
}

}  // namespace

const std::vector<CLTerm>& argument_pool(Calculus calculus, Strategy strategy, std::size_t bound) {
  static std::map<std::tuple<Calculus, Strategy, std::size_t>, std::vector<CLTerm>> cache;
  std::lock_guard<std::mutex> lock(pool_mutex);
  auto key = std::make_tuple(calculus, strategy, bound);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<CLTerm> out;
  for (const auto& t : closed_cl(calculus, bound))
    if (strategy != Strategy::Cbv || is_value(t, calculus, strategy)) out.push_back(t);
  if (strategy == Strategy::Lazy) out.push_back(cl_omega());
  return cache.emplace(key, std::move(out)).first->second;
}

const std::vector<LambdaTerm>& lambda_argument_pool(Strategy strategy, std::size_t bound) {
  static std::map<std::pair<Strategy, std::size_t>, std::vector<LambdaTerm>> cache;
  std::lock_guard<std::mutex> lock(pool_mutex);
  auto key = std::make_pair(strategy, bound);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<LambdaTerm> out;
  for (const auto& t : enumerate_lambda(bound))
    if (strategy != Strategy::Cbv || is_value(t)) out.push_back(t);
  if (strategy == Strategy::Lazy) out.push_back(lambda_omega());
  return cache.emplace(key, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Fresh-name canonicalization

namespace {

constexpr const char* kPlaceholder = "%";

CLTerm ph(const std::string& n) { return CLTerm::meta(kPlaceholder + n); }

struct FreshCollector {
  const std::set<std::string>& keep;
  std::vector<std::pair<std::string, bool>> order;  // name, first seen inside a probe constructor
  std::set<std::string> seen;

  void visit(const CLTerm& t, bool inside) {
    switch (t.tag()) {
      case CLTag::K:
      case CLTag::S:
        return;
      case CLTag::Meta:
        if (!keep.count(t.name()) && seen.insert(t.name()).second) order.emplace_back(t.name(), inside);
        return;
      case CLTag::Kp:
      case CLTag::Sp:
        visit(t.first(), true);
        return;
      case CLTag::Spp:
        visit(t.first(), true);
        visit(t.second(), true);
        return;
      case CLTag::App:
        visit(t.fun(), inside);
        visit(t.arg(), inside);
        return;
    }
  }
};

// Renames every metavariable outside `keep` to ?y1, ?y2, ... or, inside probe
// constructors, ?z1, ?z2, ..., numbered by first occurrence and skipping `taken`.
Label canonicalize(const Label& l, const std::set<std::string>& keep, const std::set<std::string>& taken) {
  FreshCollector col{keep, {}, {}};
  for (const auto& [_, v] : l.subst) col.visit(v, false);
  if (l.left) col.visit(*l.left, false);
  for (const auto& a : l.args) col.visit(a, false);
  std::set<std::string> used = taken;
  used.insert(keep.begin(), keep.end());
  Substitution ren;
  for (const auto& [name, inside] : col.order) {
    std::string fresh = fresh_metavar(used, inside ? "z" : "y");
    used.insert(fresh);
    ren.emplace(name, CLTerm::meta(fresh));
  }
  Label out;
  for (const auto& [k, v] : l.subst) out.subst.emplace(k, apply_subst(v, ren));
  if (l.left) out.left = apply_subst(*l.left, ren);
  for (const auto& a : l.args) out.args.push_back(apply_subst(a, ren));
  return out;
}

// Fresh names replaced by a neutral numbering, for comparing labels made against
// different avoid sets.
std::string label_key(const Label& l, const std::set<std::string>& state_metas) {
  FreshCollector col{state_metas, {}, {}};
  for (const auto& [_, v] : l.subst) col.visit(v, false);
  if (l.left) col.visit(*l.left, false);
  for (const auto& a : l.args) col.visit(a, false);
  Substitution ren;
  for (std::size_t i = 0; i < col.order.size(); ++i)
    ren.emplace(col.order[i].first, CLTerm::meta(std::string(kPlaceholder) + std::to_string(i)));
  Label m;
  for (const auto& [k, v] : l.subst) m.subst.emplace(k, apply_subst(v, ren));
  if (l.left) m.left = apply_subst(*l.left, ren);
  for (const auto& a : l.args) m.args.push_back(apply_subst(a, ren));
  return format_label(m);
}

const std::vector<CLTerm>& placeholder_probes() {
  static const std::vector<CLTerm> probes{CLTerm::k(), CLTerm::s(), CLTerm::kp(ph("a")), CLTerm::sp(ph("a")),
                                          CLTerm::spp(ph("a"), ph("b"))};
  return probes;
}

// Placeholders `prefix`1 .. `prefix`count, cached per prefix.
std::vector<CLTerm> numbered_placeholders(const std::string& prefix, std::size_t count) {
  static std::mutex guard;
  static std::map<std::string, std::vector<CLTerm>> cache;
  std::lock_guard<std::mutex> lock(guard);
  auto& names = cache[prefix];
  while (names.size() < count) names.push_back(ph(prefix + std::to_string(names.size() + 1)));
  return {names.begin(), names.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::vector<CLTerm> placeholder_args(std::size_t count) { return numbered_placeholders("y", count); }

Label make_label(Substitution subst, std::optional<CLTerm> left, std::vector<CLTerm> args) {
  Label l;
  l.subst = std::move(subst);
  l.left = std::move(left);
  l.args = std::move(args);
  return l;
}

template <class T>
void sort_and_dedupe(std::vector<LabelT<T>>& labels) {
  std::vector<std::pair<std::string, LabelT<T>>> keyed;
  keyed.reserve(labels.size());
  for (auto& l : labels) keyed.emplace_back(format_label(l), std::move(l));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  labels.clear();
  for (auto& [_, l] : keyed) labels.push_back(std::move(l));
}

std::vector<Label> finish(std::vector<Label> raw, const std::set<std::string>& keep,
                          const std::set<std::string>& avoid) {
  std::vector<Label> out;
  out.reserve(raw.size());
  for (const auto& l : raw) out.push_back(canonicalize(l, keep, avoid));
  sort_and_dedupe(out);
  return out;
}

// ---------------------------------------------------------------------------
// Second-order tables

std::vector<Label> second_order_lazy(const CLTerm& state, const Config& cfg) {
  std::vector<Label> raw;
  SpineClass cls = classify_lazy(state);
  auto probes = placeholder_probes();
  switch (cls.kind) {
    case SpineClass::Kind::BareVar:
      for (const auto& a : probes) {
        raw.push_back(make_label({{cls.var, a}}, std::nullopt, placeholder_args(1)));
        if (cfg.label_set != LabelSet::Finite)
          raw.push_back(make_label({{cls.var, CLTerm::app(a, ph("y1"))}}, std::nullopt, {}));
      }
      break;
    case SpineClass::Kind::HeadStuck: {
      std::size_t max_arity = cfg.label_set == LabelSet::Finite ? 0 : cfg.arg_pool;
      for (const auto& a : probes)
        for (std::size_t p = 0; p <= max_arity; ++p)
          raw.push_back(make_label({{cls.var, apply_all(a, placeholder_args(p))}}, std::nullopt, {}));
      break;
    }
    case SpineClass::Kind::Value:
      raw.push_back(make_label({}, std::nullopt, placeholder_args(1)));
      break;
    default:
      raw.push_back(Label{});
      break;
  }
  if (cfg.label_set == LabelSet::AllIpo)
    for (const auto& a : probes)
      for (std::size_t p = 0; p <= cfg.arg_pool; ++p)
        raw.push_back(make_label({}, apply_all(a, placeholder_args(p)), {}));
  return raw;
}

std::vector<Label> second_order_cbv(const CLTerm& state, const Config& cfg) {
  std::vector<Label> raw;
  SpineClass cls = classify_cbv(state);
  auto probes = placeholder_probes();
  switch (cls.kind) {
    case SpineClass::Kind::BareVar:
      for (const auto& a : probes) {
        raw.push_back(make_label({{cls.var, a}}, std::nullopt, placeholder_args(1)));
        raw.push_back(make_label({}, a, {}));
      }
      break;
    case SpineClass::Kind::Value:
      raw.push_back(make_label({}, std::nullopt, placeholder_args(1)));
      for (const auto& a : probes) raw.push_back(make_label({}, a, {}));
      break;
    case SpineClass::Kind::Critical:
      for (const auto& a : probes) raw.push_back(make_label({{cls.var, a}}, std::nullopt, {}));
      break;
    default:
      raw.push_back(Label{});
      break;
  }
  if (cfg.label_set == LabelSet::AllIpo)
    for (const auto& a : probes) raw.push_back(make_label({}, CLTerm::app(a, ph("y1")), {}));
  return raw;
}

// ---------------------------------------------------------------------------
// First-order tables

void require_closed_state(const CLTerm& state) {
  if (!is_closed(state))
    throw UnsupportedConfig("first-order labels need a closed state: " + format_term(state));
}

// All sequences of `len` elements drawn from `pool`, in lexicographic order.
template <class T, class F>
void for_each_tuple(const std::vector<T>& pool, std::size_t len, F&& visit) {
  std::vector<T> cur;
  std::vector<std::size_t> idx(len, 0);
  if (len > 0 && pool.empty()) return;
  while (true) {
    cur.clear();
    for (auto i : idx) cur.push_back(pool[i]);
    visit(cur);
    std::size_t pos = len;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < pool.size()) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (len == 0) return;
  }
}

std::vector<Label> first_order_star(const CLTerm& state, const Config& cfg) {
  std::vector<Label> raw;
  const auto& pool = argument_pool(Calculus::CLStar, cfg.strategy, cfg.arg_pool);
  if (is_value(state, Calculus::CLStar, cfg.strategy)) {
    for (const auto& p : pool) raw.push_back(make_label({}, std::nullopt, {p}));
    if (cfg.strategy == Strategy::Cbv)
      for (const auto& v : pool) raw.push_back(make_label({}, v, {}));
  } else {
    raw.push_back(Label{});
  }
  if (cfg.label_set == LabelSet::AllIpo) {
    const auto& extra = cfg.strategy == Strategy::Lazy
                            ? pool
                            : nonvalue_pool(Calculus::CLStar, cfg.strategy, cfg.arg_pool);
    for (const auto& p : extra) raw.push_back(make_label({}, p, {}));
  }
  return raw;
}

std::vector<Label> first_order_plain(const CLTerm& state, const Config& cfg) {
  std::vector<Label> raw;
  const auto& pool = argument_pool(Calculus::CL, cfg.strategy, cfg.arg_pool);
  const CLTerm K = CLTerm::k();
  const CLTerm S = CLTerm::s();
  auto ap = [](CLTerm f, CLTerm x) { return CLTerm::app(std::move(f), std::move(x)); };
  bool value = is_value(state, Calculus::CL, cfg.strategy);
  if (cfg.strategy == Strategy::Lazy) {
    if (value) {
      for_each_tuple(pool, missing_args(state),
                     [&](const std::vector<CLTerm>& ps) { raw.push_back(make_label({}, std::nullopt, ps)); });
    } else {
      raw.push_back(Label{});
    }
    if (cfg.label_set == LabelSet::AllIpo) {
      for (const auto& p : pool) {
        raw.push_back(make_label({}, K, {p}));
        raw.push_back(make_label({}, ap(K, p), {}));
      }
      for_each_tuple(pool, 2, [&](const std::vector<CLTerm>& ps) {
        raw.push_back(make_label({}, S, ps));
        raw.push_back(make_label({}, ap(S, ps[0]), {ps[1]}));
        raw.push_back(make_label({}, ap(ap(S, ps[0]), ps[1]), {}));
      });
    }
    return raw;
  }
  const auto& nonvalues = nonvalue_pool(Calculus::CL, Strategy::Cbv, cfg.arg_pool);
  if (!value) {
    raw.push_back(Label{});
  } else {
    std::size_t m = missing_args(state);
    for_each_tuple(pool, m, [&](const std::vector<CLTerm>& vs) { raw.push_back(make_label({}, std::nullopt, vs)); });
    for (std::size_t i = 0; i < m; ++i)
      for_each_tuple(pool, i, [&](const std::vector<CLTerm>& vs) {
        for (const auto& p : nonvalues) {
          auto args = vs;
          args.push_back(p);
          raw.push_back(make_label({}, std::nullopt, args));
        }
      });
    for (const auto& v : pool) {
      raw.push_back(make_label({}, K, {v}));
      raw.push_back(make_label({}, ap(K, v), {}));
    }
    for_each_tuple(pool, 2, [&](const std::vector<CLTerm>& vs) {
      raw.push_back(make_label({}, S, vs));
      raw.push_back(make_label({}, ap(S, vs[0]), {vs[1]}));
      raw.push_back(make_label({}, ap(ap(S, vs[0]), vs[1]), {}));
    });
    for (const auto& p : nonvalues) {
      raw.push_back(make_label({}, K, {p}));
      raw.push_back(make_label({}, S, {p}));
      for (const auto& v : pool) {
        raw.push_back(make_label({}, S, {v, p}));
        raw.push_back(make_label({}, ap(S, v), {p}));
      }
    }
  }
  if (cfg.label_set == LabelSet::AllIpo)
    for (const auto& r : nonvalues) raw.push_back(make_label({}, r, {}));
  return raw;
}

}  // namespace

std::vector<CLTerm> probe_values(const std::set<std::string>& avoid) {
  std::string z1 = fresh_metavar(avoid, "z");
  std::set<std::string> more = avoid;
  more.insert(z1);
  std::string z2 = fresh_metavar(more, "z");
  return {CLTerm::k(), CLTerm::s(), CLTerm::kp(CLTerm::meta(z1)), CLTerm::sp(CLTerm::meta(z1)),
          CLTerm::spp(CLTerm::meta(z1), CLTerm::meta(z2))};
}

std::vector<Label> labels_table(const CLTerm& state, const Config& cfg, const std::set<std::string>& avoid) {
  validate(cfg);
  if (cfg.calculus == Calculus::Lambda) throw UnsupportedConfig("lambda configuration needs a lambda term");
  std::vector<Label> raw;
  if (cfg.order == Order::Second) {
    raw = cfg.strategy == Strategy::Lazy ? second_order_lazy(state, cfg) : second_order_cbv(state, cfg);
  } else {
    require_closed_state(state);
    raw = cfg.calculus == Calculus::CL ? first_order_plain(state, cfg) : first_order_star(state, cfg);
  }
  return finish(std::move(raw), free_metavars(state), avoid);
}

std::vector<LambdaLabel> labels_table(const LambdaTerm& state, const Config& cfg) {
  validate(cfg);
  if (cfg.calculus != Calculus::Lambda) throw UnsupportedConfig("combinatory configuration needs a CL term");
  if (!is_closed(state)) throw OpenTermError(*free_vars(state).begin());
  std::vector<LambdaLabel> out;
  const auto& pool = lambda_argument_pool(cfg.strategy, cfg.arg_pool);
  if (is_value(state)) {
    for (const auto& p : pool) out.push_back(LambdaLabel{{}, std::nullopt, {p}});
    if (cfg.strategy == Strategy::Cbv)
      for (const auto& v : pool) out.push_back(LambdaLabel{{}, v, {}});
  } else {
    out.push_back(LambdaLabel{});
  }
  if (cfg.label_set == LabelSet::AllIpo) {
    const auto& extra = cfg.strategy == Strategy::Lazy ? pool : lambda_nonvalue_pool(cfg.arg_pool);
    for (const auto& p : extra) out.push_back(LambdaLabel{{}, p, {}});
  }
  sort_and_dedupe(out);
  return out;
}

bool labels_truncated(const CLTerm& state, const Config& cfg) {
  if (cfg.order == Order::First) return cfg.label_set == LabelSet::AllIpo || is_value(state, cfg.calculus, cfg.strategy);
  if (cfg.strategy == Strategy::Cbv || cfg.label_set == LabelSet::Finite) return false;
  return cfg.label_set == LabelSet::AllIpo || classify_lazy(state).kind == SpineClass::Kind::HeadStuck;
}

bool labels_truncated(const LambdaTerm& state, const Config& cfg) {
  return cfg.label_set == LabelSet::AllIpo || is_value(state);
}

// ---------------------------------------------------------------------------
// Unification-derived labels

std::vector<Label> labels_generic(const CLTerm& state, const Config& cfg, const GenericOptions& opts,
                                  const std::set<std::string>& avoid) {
  if (cfg.calculus != Calculus::CLStar || cfg.order != Order::Second)
    throw UnsupportedConfig("generic labels are derived for second-order clstar only");
  if (cfg.strategy != Strategy::Lazy)
    throw UnsupportedConfig("generic labels are derived for the lazy strategy only");

  const std::set<std::string> state_metas = free_metavars(state);
  const std::size_t n = unwind(state).args.size();
  const CLTerm rule_arg = ph("r");
  auto reducible = [](const CLTerm& t) {
    return step(t, Calculus::CLStar, Strategy::Lazy).kind == StepKind::Stepped;
  };
  auto occurrences = [](const std::string& name, const Label& l) {
    std::size_t count = 0;
    std::function<void(const CLTerm&)> walk = [&](const CLTerm& t) {
      switch (t.tag()) {
        case CLTag::Meta:
          count += t.name() == name;
          return;
        case CLTag::Kp:
        case CLTag::Sp:
          walk(t.first());
          return;
        case CLTag::Spp:
          walk(t.first());
          walk(t.second());
          return;
        case CLTag::App:
          walk(t.fun());
          walk(t.arg());
          return;
        default:
          return;
      }
    };
    for (const auto& [_, v] : l.subst) walk(v);
    for (const auto& a : l.args) walk(a);
    return count;
  };
  auto strippable = [&](const CLTerm& last, const Label& l) {
    return last.is(CLTag::Meta) && !state_metas.count(last.name()) && occurrences(last.name(), l) == 1;
  };

  // A rigid state head unifies only with a probe of the same constructor and no extra arguments.
  const CLTerm& state_head = unwind(state).head;
  const bool rigid = !state_head.is(CLTag::Meta);
  const auto all_ws = numbered_placeholders("w", opts.arg_bound + n + 2);

  std::vector<Label> raw;
  for (const CLTerm& head : placeholder_probes()) {
    if (rigid && head.tag() != state_head.tag()) continue;
    for (std::size_t k = 0; k <= 2; ++k) {
      const auto ys = placeholder_args(k);
      const CLTerm target = apply_all(state, ys);
      for (std::size_t p = 0; p <= opts.arg_bound; ++p) {
        if (p + n + k < 1) continue;
        if (rigid && p > 0) break;
        std::size_t j = p + n + k - 1;
        std::vector<CLTerm> ws(all_ws.begin(), all_ws.begin() + static_cast<std::ptrdiff_t>(j));
        const CLTerm pattern = apply_all(CLTerm::app(head, rule_arg), ws);
        auto theta = mgu(pattern, target);
        if (!theta) continue;
        Label l;
        l.subst = restrict_to(*theta, state_metas);
        for (const auto& y : ys) l.args.push_back(apply_subst(y, *theta));
        if (k >= 1 && strippable(l.args.back(), l)) {
          std::vector<CLTerm> shorter(l.args.begin(), l.args.end() - 1);
          if (reducible(apply_all(apply_subst(state, l.subst), shorter))) continue;
        }
        if (k == 0 && n == 0 && state.is(CLTag::Meta)) {
          auto it = l.subst.find(state.name());
          if (it != l.subst.end()) {
            Spine sp = unwind(it->second);
            if (!sp.args.empty() && strippable(sp.args.back(), l)) {
              std::vector<CLTerm> shorter(sp.args.begin(), sp.args.end() - 1);
              if (reducible(apply_all(sp.head, shorter))) continue;
            }
          }
        }
        if (opts.prune &&
            !std::all_of(l.subst.begin(), l.subst.end(), [](const auto& kv) { return is_probe_shape(kv.second); }))
          continue;
        raw.push_back(std::move(l));
      }
    }
  }
  return finish(std::move(raw), state_metas, avoid);
}

// ---------------------------------------------------------------------------
// Firing labels

CLTerm plug(const CLTerm& state, const Label& l) {
  CLTerm t = apply_subst(state, l.subst);
  if (l.left) t = CLTerm::app(*l.left, t);
  return apply_all(t, l.args);
}

LambdaTerm plug(const LambdaTerm& state, const LambdaLabel& l) {
  LambdaTerm t = state;
  if (l.left) t = LambdaTerm::app(*l.left, t);
  return apply_all(t, l.args);
}

CLTerm apply_label(const CLTerm& state, const Label& l, const Config& cfg) {
  auto r = step(plug(state, l), cfg.calculus, cfg.strategy);
  if (r.kind != StepKind::Stepped)
    throw NotEnabled("label " + format_label(l) + " does not fire on " + format_term(state));
  return r.next;
}

LambdaTerm apply_label(const LambdaTerm& state, const LambdaLabel& l, const Config& cfg) {
  auto r = step(plug(state, l), cfg.strategy);
  if (r.kind != StepKind::Stepped)
    throw NotEnabled("label " + format_label(l) + " does not fire on " + format_term(state));
  return r.next;
}

NormalizeOutcome<CLTerm> normalize(const CLTerm& t, const Config& cfg, std::size_t fuel) {
  return normalize_tau(t, cfg.calculus, cfg.strategy, fuel);
}

NormalizeOutcome<LambdaTerm> normalize(const LambdaTerm& t, const Config& cfg, std::size_t fuel) {
  return normalize_tau(t, cfg.strategy, fuel);
}

namespace {

std::set<std::string> label_metas(const Label& l) {
  std::set<std::string> out;
  for (const auto& [k, v] : l.subst) collect_metavars(v, out);
  if (l.left) collect_metavars(*l.left, out);
  for (const auto& a : l.args) collect_metavars(a, out);
  return out;
}

bool enabled_at(const CLTerm& nf, const Label& l, const Config& cfg) {
  auto metas = free_metavars(nf);
  std::string want = label_key(l, metas);
  for (const auto& cand : labels_table(nf, cfg, label_metas(l)))
    if (label_key(cand, metas) == want) return true;
  return false;
}

bool enabled_at(const LambdaTerm& nf, const LambdaLabel& l, const Config& cfg) {
  std::string want = format_label(l);
  for (const auto& cand : labels_table(nf, cfg))
    if (format_label(cand) == want) return true;
  return false;
}

template <class T, class L>
WeakOutcome<T> weak_successor_impl(const T& state, const L& l, const Config& cfg, std::size_t fuel) {
  WeakOutcome<T> out;
  auto pre = normalize(state, cfg, fuel);
  out.tau_steps = pre.steps;
  if (pre.status == NormalStatus::FuelExhausted) {
    out.status = WeakOutcome<T>::Status::FuelExhausted;
    return out;
  }
  if (l.is_tau()) {
    out.target = pre.result;
    return out;
  }
  if (!enabled_at(pre.result, l, cfg)) {
    out.status = WeakOutcome<T>::Status::NotEnabled;
    return out;
  }
  auto post = normalize(apply_label(pre.result, l, cfg), cfg, fuel);
  out.tau_steps += post.steps;
  if (post.status == NormalStatus::FuelExhausted) {
    out.status = WeakOutcome<T>::Status::FuelExhausted;
    return out;
  }
  out.target = post.result;
  return out;
}

}  // namespace

WeakOutcome<CLTerm> weak_successor(const CLTerm& state, const Label& l, const Config& cfg, std::size_t fuel) {
  return weak_successor_impl(state, l, cfg, fuel);
}

WeakOutcome<LambdaTerm> weak_successor(const LambdaTerm& state, const LambdaLabel& l, const Config& cfg,
                                       std::size_t fuel) {
  return weak_successor_impl(state, l, cfg, fuel);
}

// ---------------------------------------------------------------------------
// Exploration

namespace {

std::string state_key(const CLTerm& t) { return format_term(canonical_rename({t})[0]); }
std::string state_key(const LambdaTerm& t) { return debruijn_key(t); }

nlohmann::ordered_json label_to_json(const Label& l) {
  if (l.is_tau()) return "tau";
  nlohmann::ordered_json j;
  j["subst"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : l.subst) j["subst"][k] = format_term(v);
  j["left"] = l.left ? nlohmann::ordered_json(format_term(*l.left)) : nlohmann::ordered_json(nullptr);
  j["args"] = nlohmann::ordered_json::array();
  for (const auto& a : l.args) j["args"].push_back(format_term(a));
  return j;
}

nlohmann::ordered_json label_to_json(const LambdaLabel& l) {
  if (l.is_tau()) return "tau";
  nlohmann::ordered_json j;
  j["subst"] = nlohmann::ordered_json::object();
  j["left"] = l.left ? nlohmann::ordered_json(format_term(*l.left)) : nlohmann::ordered_json(nullptr);
  j["args"] = nlohmann::ordered_json::array();
  for (const auto& a : l.args) j["args"].push_back(format_term(a));
  return j;
}

template <class T>
TransitionGraph explore_impl(const T& root, const Config& cfg, std::size_t depth, std::size_t fuel) {
  validate(cfg);
  TransitionGraph g;
  std::unordered_map<std::string, std::string> representative;
  std::deque<std::pair<T, std::size_t>> queue;
  auto discover = [&](const T& t, std::size_t level) -> std::string {
    std::string key = state_key(t);
    auto it = representative.find(key);
    if (it != representative.end()) return it->second;
    std::string text = format_term(t);
    representative.emplace(key, text);
    g.states.push_back(text);
    queue.emplace_back(t, level);
    return text;
  };
  discover(root, 0);
  while (!queue.empty()) {
    auto [state, level] = queue.front();
    queue.pop_front();
    std::string source = representative.at(state_key(state));
    if (level >= depth) {
      g.frontier.push_back(source);
      continue;
    }
    auto pre = normalize(state, cfg, fuel);
    if (pre.status == NormalStatus::FuelExhausted) {
      g.fuel_exhausted.push_back(source);
      continue;
    }
    for (const auto& l : labels_table(pre.result, cfg)) {
      auto post = normalize(apply_label(pre.result, l, cfg), cfg, fuel);
      discover(post.result, level + 1);
      std::string target = format_term(post.result);
      if (post.status == NormalStatus::FuelExhausted &&
          std::find(g.fuel_exhausted.begin(), g.fuel_exhausted.end(), target) == g.fuel_exhausted.end())
        g.fuel_exhausted.push_back(target);
      Transition tr;
      tr.source = source;
      tr.label = format_label(l);
      tr.label_json = label_to_json(l).dump();
      tr.target = target;
      tr.tau_folded = pre.steps + post.steps;
      g.transitions.push_back(std::move(tr));
    }
  }
  return g;
}

}  // namespace

TransitionGraph lts_explore(const CLTerm& root, const Config& cfg, std::size_t depth, std::size_t fuel) {
  if (cfg.calculus == Calculus::Lambda) throw UnsupportedConfig("lambda configuration needs a lambda term");
  return explore_impl(root, cfg, depth, fuel);
}

TransitionGraph lts_explore(const LambdaTerm& root, const Config& cfg, std::size_t depth, std::size_t fuel) {
  if (cfg.calculus != Calculus::Lambda) throw UnsupportedConfig("combinatory configuration needs a CL term");
  return explore_impl(root, cfg, depth, fuel);
}

std::string transition_json(const Transition& t) {
  nlohmann::ordered_json j;
  j["state"] = t.source;
  j["label"] = nlohmann::ordered_json::parse(t.label_json);
  j["target"] = t.target;
  j["tau_folded"] = t.tau_folded;
  return j.dump();
}

}  // namespace ipobisim
