#include "ipobisim/properties.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "ipobisim/unify.hpp"

namespace ipobisim {

// ---------------------------------------------------------------------------
// Context-search steppers

namespace {

bool star_form(const CLTerm& t) {
  return t.is(CLTag::K) || t.is(CLTag::S) || t.is(CLTag::Kp) || t.is(CLTag::Sp) || t.is(CLTag::Spp);
}

// V ::= K | S | K'V | S'V | S''VV | metavariable
bool star_cbv_value(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
    case CLTag::Meta:
      return true;
    case CLTag::Kp:
    case CLTag::Sp:
      return star_cbv_value(t.first());
    case CLTag::Spp:
      return star_cbv_value(t.first()) && star_cbv_value(t.second());
    case CLTag::App:
      return false;
  }
  return false;
}

// V ::= K | K V | S | S V | S V V
bool plain_value(const CLTerm& t) {
  if (t.is(CLTag::K) || t.is(CLTag::S)) return true;
  if (!t.is(CLTag::App)) return false;
  const CLTerm& f = t.fun();
  if ((f.is(CLTag::K) || f.is(CLTag::S)) && plain_value(t.arg())) return true;
  return f.is(CLTag::App) && f.fun().is(CLTag::S) && plain_value(f.arg()) && plain_value(t.arg());
}

std::optional<CLTerm> star_contract(const CLTerm& t) {
  if (!t.is(CLTag::App)) return std::nullopt;
  const CLTerm& c = t.fun();
  const CLTerm& x = t.arg();
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
      return std::nullopt;
  }
}

std::optional<CLTerm> plain_contract(const CLTerm& t, bool by_value) {
  if (!t.is(CLTag::App)) return std::nullopt;
  const CLTerm& f = t.fun();
  if (f.is(CLTag::App) && f.fun().is(CLTag::K)) {
    if (by_value && !(plain_value(f.arg()) && plain_value(t.arg()))) return std::nullopt;
    return f.arg();
  }
  if (f.is(CLTag::App) && f.fun().is(CLTag::App) && f.fun().fun().is(CLTag::S)) {
    const CLTerm& m = f.fun().arg();
    const CLTerm& n = f.arg();
    const CLTerm& p = t.arg();
    if (by_value && !(plain_value(m) && plain_value(n) && plain_value(p))) return std::nullopt;
    return CLTerm::app(CLTerm::app(m, p), CLTerm::app(n, p));
  }
  return std::nullopt;
}

using Rebuild = std::function<CLTerm(const CLTerm&)>;

void search_cl(const CLTerm& t, Calculus calculus, Strategy strategy, const Rebuild& up, std::vector<CLTerm>& out) {
  const bool star = calculus == Calculus::CLStar;
  const bool cbv = strategy == Strategy::Cbv;
  std::optional<CLTerm> here;
  if (star) {
    if (t.is(CLTag::App) && star_form(t.fun()) && (!cbv || (star_cbv_value(t.fun()) && star_cbv_value(t.arg()))))
      here = star_contract(t);
  } else {
    here = plain_contract(t, cbv);
  }
  if (here) out.push_back(up(*here));

  switch (t.tag()) {
    case CLTag::App: {
      // D P
      search_cl(t.fun(), calculus, strategy, [&](const CLTerm& h) { return up(CLTerm::app(h, t.arg())); }, out);
      // V D
      bool fun_value = star ? star_cbv_value(t.fun()) : plain_value(t.fun());
      if (cbv && fun_value)
        search_cl(t.arg(), calculus, strategy, [&](const CLTerm& h) { return up(CLTerm::app(t.fun(), h)); }, out);
      return;
    }
    case CLTag::Kp:
    case CLTag::Sp:
      if (star && cbv) {
        bool kp = t.is(CLTag::Kp);
        search_cl(t.first(), calculus, strategy,
                  [&](const CLTerm& h) { return up(kp ? CLTerm::kp(h) : CLTerm::sp(h)); }, out);
      }
      return;
    case CLTag::Spp:
      if (star && cbv) {
        search_cl(t.first(), calculus, strategy, [&](const CLTerm& h) { return up(CLTerm::spp(h, t.second())); },
                  out);
        if (star_cbv_value(t.first()))
          search_cl(t.second(), calculus, strategy,
                    [&](const CLTerm& h) { return up(CLTerm::spp(t.first(), h)); }, out);
      }
      return;
    default:
      return;
  }
}

using LamRebuild = std::function<LambdaTerm(const LambdaTerm&)>;

void search_lambda(const LambdaTerm& t, Strategy strategy, const LamRebuild& up, std::vector<LambdaTerm>& out) {
  if (!t.is(LamTag::App)) return;
  const bool cbv = strategy == Strategy::Cbv;
  if (t.fun().is(LamTag::Abs) && (!cbv || t.arg().is(LamTag::Abs))) out.push_back(up(beta(t.fun(), t.arg())));
  search_lambda(t.fun(), strategy, [&](const LambdaTerm& h) { return up(LambdaTerm::app(h, t.arg())); }, out);
  if (cbv && t.fun().is(LamTag::Abs))
    search_lambda(t.arg(), strategy, [&](const LambdaTerm& h) { return up(LambdaTerm::app(t.fun(), h)); }, out);
}

}  // namespace

std::vector<CLTerm> context_search_successors(const CLTerm& t, Calculus calculus, Strategy strategy) {
  std::vector<CLTerm> out;
  search_cl(t, calculus, strategy, [](const CLTerm& h) { return h; }, out);
  return out;
}

std::vector<LambdaTerm> context_search_successors(const LambdaTerm& t, Strategy strategy) {
  std::vector<LambdaTerm> out;
  search_lambda(t, strategy, [](const LambdaTerm& h) { return h; }, out);
  return out;
}

// ---------------------------------------------------------------------------
// Invariant suite

namespace {

struct Tally {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::string first_failure;

  void fail(std::size_t index, const std::string& what) {
    ++failures;
    if (index < first_index) {
      first_index = index;
      first_failure = what;
    }
  }
  void merge(const Tally& o) {
    checked += o.checked;
    failures += o.failures;
    if (o.first_index < first_index) {
      first_index = o.first_index;
      first_failure = o.first_failure;
    }
  }
};

// Streams an enumeration in every worker and lets worker w handle indices w, w+jobs, ...
template <class Enumerate, class Check>
Tally sharded(std::size_t jobs, Enumerate&& enumerate, Check&& check) {
  jobs = std::max<std::size_t>(1, jobs);
  std::vector<Tally> tallies(jobs);
  auto worker = [&](std::size_t w) {
    std::size_t index = 0;
    enumerate([&](const auto& t) {
      if (index % jobs == w) {
        ++tallies[w].checked;
        check(t, index, tallies[w]);
      }
      ++index;
    });
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& th : threads) th.join();
  }
  Tally total;
  for (const auto& t : tallies) total.merge(t);
  return total;
}

template <class F>
InvariantResult timed(const std::string& name, F&& body) {
  auto start = std::chrono::steady_clock::now();
  Tally t = body();
  InvariantResult r;
  r.name = name;
  r.checked = t.checked;
  r.failures = t.failures;
  r.first_failure = t.first_failure;
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

auto cl_stream(std::size_t bound, std::vector<std::string> pool, Flavor flavor) {
  return [=](const auto& visit) { for_each_term(bound, pool, flavor, [&](const CLTerm& t) { visit(t); }); };
}

auto lambda_stream(std::size_t bound) {
  return [=](const auto& visit) {
    for (const auto& t : enumerate_lambda(bound)) visit(t);
  };
}

void check_cl_stepper(const CLTerm& t, std::size_t index, Tally& tally, Calculus calculus, Strategy strategy) {
  auto expected = context_search_successors(t, calculus, strategy);
  auto got = step(t, calculus, strategy);
  std::string where = format_term(t) + " [" + to_string(calculus) + "/" + to_string(strategy) + "]";
  if (expected.size() > 1) return tally.fail(index, "several redexes in " + where);
  bool stepped = got.kind == StepKind::Stepped;
  if (stepped != (expected.size() == 1)) return tally.fail(index, "redex disagreement on " + where);
  if (stepped && !(got.next == expected[0])) return tally.fail(index, "different successor for " + where);
  if (stepped && calculus == Calculus::CL && !is_plain(got.next))
    return tally.fail(index, "plain term left the plain fragment: " + where);
  if (stepped && is_closed(t) && !is_closed(got.next)) return tally.fail(index, "closedness lost: " + where);
  if (strategy == Strategy::Cbv && is_value(t, calculus, strategy) && stepped)
    return tally.fail(index, "value stepped: " + where);
}

void check_lambda_stepper(const LambdaTerm& t, std::size_t index, Tally& tally, Strategy strategy) {
  auto expected = context_search_successors(t, strategy);
  auto got = step(t, strategy);
  std::string where = format_term(t) + " [lambda/" + to_string(strategy) + "]";
  if (expected.size() > 1) return tally.fail(index, "several redexes in " + where);
  bool stepped = got.kind == StepKind::Stepped;
  if (stepped != (expected.size() == 1)) return tally.fail(index, "redex disagreement on " + where);
  if (stepped && !(got.next == expected[0])) return tally.fail(index, "different successor for " + where);
  if (stepped && !is_closed(got.next)) return tally.fail(index, "closedness lost: " + where);
}

}  // namespace

std::vector<InvariantResult> run_invariants(const InvariantOptions& opts) {
  std::vector<InvariantResult> out;
  const std::size_t jobs = opts.jobs;
  const std::vector<std::string> metas{"x", "y"};

  for (Strategy s : {Strategy::Lazy, Strategy::Cbv}) {
    out.push_back(timed("stepper/context agreement clstar " + to_string(s) + " closed <= " +
                            std::to_string(opts.max_size),
                        [&] {
                          return sharded(jobs, cl_stream(opts.max_size, {}, Flavor::Star),
                                         [&](const CLTerm& t, std::size_t i, Tally& tl) {
                                           check_cl_stepper(t, i, tl, Calculus::CLStar, s);
                                         });
                        }));
    out.push_back(timed("stepper/context agreement clstar " + to_string(s) + " open <= " +
                            std::to_string(opts.open_size),
                        [&] {
                          return sharded(jobs, cl_stream(opts.open_size, metas, Flavor::Star),
                                         [&](const CLTerm& t, std::size_t i, Tally& tl) {
                                           check_cl_stepper(t, i, tl, Calculus::CLStar, s);
                                         });
                        }));
    out.push_back(timed("stepper/context agreement cl " + to_string(s) + " closed <= " +
                            std::to_string(opts.max_size),
                        [&] {
                          return sharded(jobs, cl_stream(opts.max_size, {}, Flavor::Plain),
                                         [&](const CLTerm& t, std::size_t i, Tally& tl) {
                                           check_cl_stepper(t, i, tl, Calculus::CL, s);
                                         });
                        }));
    out.push_back(timed("stepper/context agreement lambda " + to_string(s) + " closed <= " +
                            std::to_string(opts.max_size),
                        [&] {
                          return sharded(jobs, lambda_stream(opts.max_size),
                                         [&](const LambdaTerm& t, std::size_t i, Tally& tl) {
                                           check_lambda_stepper(t, i, tl, s);
                                         });
                        }));
  }

  out.push_back(timed("classification partition and finite labels open <= " + std::to_string(opts.open_size), [&] {
    Config finite;
    return sharded(jobs, cl_stream(opts.open_size, metas, Flavor::Star), [&](const CLTerm& t, std::size_t i, Tally& tl) {
      Spine sp = unwind(t);
      bool head_var = sp.head.is(CLTag::Meta);
      int guards = (head_var && sp.args.empty()) + (head_var && !sp.args.empty()) + (!head_var && sp.args.empty()) +
                   (!head_var && !sp.args.empty());
      if (guards != 1) return tl.fail(i, "guards overlap on " + format_term(t));
      SpineClass lazy = classify_lazy(t);
      auto lazy_step = step(t, Calculus::CLStar, Strategy::Lazy);
      if ((lazy.kind == SpineClass::Kind::Reducible) != (lazy_step.kind == StepKind::Stepped))
        return tl.fail(i, "lazy class disagrees with stepper on " + format_term(t));
      if (lazy.kind == SpineClass::Kind::HeadStuck && lazy.arg_count != sp.args.size())
        return tl.fail(i, "wrong argument count on " + format_term(t));
      auto labels = labels_table(t, finite);
      if (labels.size() > 5) return tl.fail(i, "more than five finite labels on " + format_term(t));
      bool has_tau = std::any_of(labels.begin(), labels.end(), [](const Label& l) { return l.is_tau(); });
      if (has_tau != (lazy.kind == SpineClass::Kind::Reducible))
        return tl.fail(i, "silent label does not match reducibility on " + format_term(t));
      if ((lazy.kind == SpineClass::Kind::Value || lazy.kind == SpineClass::Kind::Reducible) && labels.size() != 1)
        return tl.fail(i, "value/reducible row must have one label: " + format_term(t));
      SpineClass cbv;
      try {
        cbv = classify_cbv(t);
      } catch (const NoClassError&) {
        return tl.fail(i, "no cbv class for " + format_term(t));
      }
      auto cbv_step = step(t, Calculus::CLStar, Strategy::Cbv);
      switch (cbv.kind) {
        case SpineClass::Kind::Reducible:
          if (cbv_step.kind != StepKind::Stepped) return tl.fail(i, "cbv reducible but stuck: " + format_term(t));
          break;
        case SpineClass::Kind::Critical:
          if (cbv_step.kind != StepKind::StuckOpen || cbv_step.var != cbv.var)
            return tl.fail(i, "critical variable disagrees with stepper on " + format_term(t));
          if (!free_metavars(t).count(cbv.var)) return tl.fail(i, "critical variable absent from " + format_term(t));
          break;
        default:
          if (cbv_step.kind != StepKind::Halted) return tl.fail(i, "cbv value stepped: " + format_term(t));
          if (!is_cbv_value(t)) return tl.fail(i, "halted non-value under cbv: " + format_term(t));
          break;
      }
    });
  }));

  out.push_back(timed("parse/print round trip", [&] {
    Tally total;
    total.merge(sharded(jobs, cl_stream(opts.max_size, {}, Flavor::Star), [](const CLTerm& t, std::size_t i, Tally& tl) {
      if (!(parse_cl(format_term(t)) == t)) tl.fail(i, "round trip changed " + format_term(t));
    }));
    total.merge(sharded(jobs, cl_stream(opts.open_size, metas, Flavor::Star), [](const CLTerm& t, std::size_t i, Tally& tl) {
      if (!(parse_cl(format_term(t)) == t)) tl.fail(i, "round trip changed " + format_term(t));
    }));
    total.merge(sharded(jobs, lambda_stream(opts.max_size), [](const LambdaTerm& t, std::size_t i, Tally& tl) {
      if (!(parse_lambda(format_term(t)) == t)) tl.fail(i, "round trip changed " + format_term(t));
    }));
    return total;
  }));

  out.push_back(timed("mgu soundness and idempotence on " + std::to_string(opts.mgu_pairs) + " pairs", [&] {
    auto pool = enumerate_terms(opts.open_size, metas, Flavor::Star);
    auto closed = enumerate_terms(4, {}, Flavor::Star);
    std::mt19937_64 rng(opts.seed);
    Tally tl;
    for (std::size_t i = 0; i < opts.mgu_pairs; ++i) {
      CLTerm a = pool[rng() % pool.size()];
      CLTerm b = pool[rng() % pool.size()];
      if (i % 2 == 1) {
        // Half the pairs are built to unify: b is a closed instance of a.
        Substitution sigma;
        for (const auto& m : free_metavars(a)) sigma.emplace(m, closed[rng() % closed.size()]);
        b = apply_subst(a, sigma);
      }
      ++tl.checked;
      auto theta = mgu(a, b);
      if (!theta) {
        if (i % 2 == 1) tl.fail(i, "no unifier for an instance pair: " + format_term(a) + " =? " + format_term(b));
        continue;
      }
      CLTerm ua = apply_subst(a, *theta);
      if (!(ua == apply_subst(b, *theta)))
        tl.fail(i, "unsound unifier for " + format_term(a) + " =? " + format_term(b));
      else if (!(apply_subst(ua, *theta) == ua))
        tl.fail(i, "unifier not idempotent for " + format_term(a) + " =? " + format_term(b));
    }
    return tl;
  }));
  return out;
}

// ---------------------------------------------------------------------------
// Table cross-check

TableCheckReport check_tables(const TableCheckOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> metas;
  for (std::size_t i = 0; i < opts.max_metavars; ++i) {
    static const char* names[] = {"x", "y", "z", "u", "v", "w"};
    metas.push_back(i < 6 ? names[i] : "m" + std::to_string(i));
  }
  Config finite;
  Config reactive;
  reactive.label_set = LabelSet::ReactiveOnly;
  reactive.arg_pool = opts.arg_bound;
  GenericOptions pruned{opts.arg_bound, true};
  GenericOptions unpruned{opts.arg_bound, false};

  auto texts = [](const std::vector<Label>& ls) {
    std::vector<std::string> out;
    for (const auto& l : ls) out.push_back(format_label(l));
    return out;
  };
  struct Local {
    std::size_t terms = 0, finite = 0, reactive = 0;
    std::vector<std::pair<std::size_t, std::string>> examples;
  };
  std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  std::vector<Local> locals(jobs);
  auto worker = [&](std::size_t w) {
    std::size_t index = 0;
    for_each_term(opts.max_size, metas, Flavor::Star, [&](const CLTerm& t) {
      if (index++ % jobs != w) return;
      Local& L = locals[w];
      ++L.terms;
      if (texts(labels_generic(t, finite, pruned)) != texts(labels_table(t, finite))) {
        ++L.finite;
        if (L.examples.size() < 5) L.examples.emplace_back(index, "finite: " + format_term(t));
      }
      if (texts(labels_generic(t, reactive, unpruned)) != texts(labels_table(t, reactive))) {
        ++L.reactive;
        if (L.examples.size() < 5) L.examples.emplace_back(index, "reactive: " + format_term(t));
      }
    });
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& th : threads) th.join();
  }
  TableCheckReport rep;
  std::vector<std::pair<std::size_t, std::string>> examples;
  for (const auto& L : locals) {
    rep.terms += L.terms;
    rep.finite_diffs += L.finite;
    rep.reactive_diffs += L.reactive;
    examples.insert(examples.end(), L.examples.begin(), L.examples.end());
  }
  std::sort(examples.begin(), examples.end());
  for (std::size_t i = 0; i < examples.size() && i < 5; ++i) rep.examples.push_back(examples[i].second);
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<std::pair<CLTerm, CLTerm>> congruence_corpus() {
  static const char* const texts[][2] = {
      {"K", "S (K K) (S K K)"},
      {"S K K", "S K S"},
      {"S K K", "S (K (S K K)) (S K K)"},
      {"S K K ?x", "?x"},
      {"K ?x ?y", "S K K ?x"},
      {"K (S K K) ?x", "S K K"},
      {"S (K K) (S K K) ?x", "K ?x"},
      {"S K S ?x ?y", "?x ?y"},
  };
  std::vector<std::pair<CLTerm, CLTerm>> out;
  for (const auto& p : texts) out.emplace_back(parse_cl(p[0]), parse_cl(p[1]));
  return out;
}

}  // namespace ipobisim
