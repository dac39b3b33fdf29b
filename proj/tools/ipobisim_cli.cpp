#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "ipobisim/bisim.hpp"
#include "ipobisim/ipo.hpp"
#include "ipobisim/properties.hpp"
#include "ipobisim/translate.hpp"

using namespace ipobisim;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDistinguished = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int verdict_exit(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Equivalent:
      return kExitOk;
    case VerdictKind::Distinguished:
      return kExitDistinguished;
    case VerdictKind::Unknown:
      return kExitUnknown;
  }
  return kExitUnknown;
}

std::string verdict_json(const Verdict& v) {
  ordered_json j;
  j["verdict"] = summary(v);
  if (v.kind == VerdictKind::Equivalent) j["depth"] = v.depth;
  if (v.kind == VerdictKind::Unknown) j["reason"] = to_string(v.reason);
  j["trace"] = ordered_json::array();
  for (const auto& e : v.trace) j["trace"].push_back({{"label", e.label}, {"side", to_string(e.side)}, {"reason", e.reason}});
  return j.dump();
}

bool looks_lambda(const std::string& text) {
  return text.find('\\') != std::string::npos || text.find("λ") != std::string::npos;
}

// "auto" picks lambda when the text contains a binder.
Calculus resolve_calculus(const std::string& requested, const std::string& text) {
  if (requested == "auto") return looks_lambda(text) ? Calculus::Lambda : Calculus::CLStar;
  try {
    return parse_calculus(requested);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

template <class F>
auto usage_guard(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Config make_config(const std::string& calculus, const std::string& order, const std::string& strategy,
                   const std::string& labels, std::size_t pool) {
  return usage_guard([&] {
    Config cfg;
    cfg.calculus = parse_calculus(calculus);
    cfg.order = parse_order(order);
    cfg.strategy = parse_strategy(strategy);
    cfg.label_set = parse_label_set(labels);
    cfg.arg_pool = pool;
    validate(cfg);
    return cfg;
  });
}

struct LtsArgs {
  std::string term;
  std::string calculus = "clstar", order = "second", strategy = "lazy", labels = "finite", format = "json";
  std::size_t depth = 6, fuel = kDefaultFuel, pool = 3;
};

struct BisimArgs {
  std::string a, b;
  std::string calculus = "clstar", order = "second", strategy = "lazy", labels = "finite";
  std::size_t depth = 6, fuel = kDefaultFuel, pool = 3;
  bool divergence_blind = false;
  bool from_lambda = false;
};

struct OracleArgs {
  std::string kind, a, b;
  std::string calculus = "lambda", strategy = "lazy";
  std::size_t depth = 3, fuel = kDefaultFuel, pool = 2, frames = 2, atom_size = 3;
};

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("IPOBISIM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("IPOBISIM_SEED is not a number: ") + env);
    }
  }
  return flag;
}

int run_parse(const std::string& text, const std::string& calculus) {
  if (resolve_calculus(calculus, text) == Calculus::Lambda)
    std::cout << format_term(parse_lambda(text, false)) << "\n";
  else
    std::cout << format_term(parse_cl(text)) << "\n";
  return kExitOk;
}

template <class T, class Step>
int reduce_loop(T term, std::size_t fuel, bool trace, Step&& step_once) {
  std::size_t steps = 0;
  if (trace) std::cout << format_term(term) << "\n";
  for (;;) {
    auto r = step_once(term);
    if (r.kind != StepKind::Stepped) {
      if (!trace) std::cout << format_term(term) << "\n";
      std::cerr << "halted after " << steps << " steps (" << to_string(r.cls) << ")\n";
      return kExitOk;
    }
    if (steps == fuel) {
      if (!trace) std::cout << format_term(term) << "\n";
      std::cerr << "fuel exhausted after " << steps << " steps\n";
      return kExitUnknown;
    }
    term = r.next;
    ++steps;
    if (trace) std::cout << format_term(term) << "\n";
  }
}

int run_reduce(const std::string& text, const std::string& calculus_name, const std::string& strategy_name,
               std::size_t fuel, bool trace) {
  Calculus calculus = resolve_calculus(calculus_name, text);
  Strategy strategy = usage_guard([&] { return parse_strategy(strategy_name); });
  if (calculus == Calculus::Lambda) {
    LambdaTerm t = parse_lambda(text, strategy != Strategy::NormalFull);
    return reduce_loop(t, fuel, trace, [&](const LambdaTerm& m) { return step(m, strategy); });
  }
  if (strategy == Strategy::NormalFull) throw UsageError("normal_full applies to lambda terms only");
  CLTerm t = parse_cl(text);
  if (calculus == Calculus::CL && !is_plain(t)) throw UsageError("plain CL terms may not contain K', S' or S''");
  return reduce_loop(t, fuel, trace, [&](const CLTerm& m) { return step(m, calculus, strategy); });
}

int run_translate(const std::string& text, const std::string& dir) {
  if (dir == "lambda-to-cl") {
    std::cout << format_term(to_cl(parse_lambda(text, false))) << "\n";
  } else if (dir == "cl-to-lambda") {
    std::cout << format_term(to_lambda(parse_cl(text))) << "\n";
  } else {
    throw UsageError("--dir must be lambda-to-cl or cl-to-lambda");
  }
  return kExitOk;
}

void print_graph(const TransitionGraph& g, const std::string& format) {
  if (format == "json") {
    for (const auto& t : g.transitions) std::cout << transition_json(t) << "\n";
  } else {
    for (const auto& t : g.transitions) {
      std::cout << t.source << "  --" << t.label << "-->  " << t.target;
      if (t.tau_folded) std::cout << "  (" << t.tau_folded << " silent)";
      std::cout << "\n";
    }
  }
  std::cerr << g.states.size() << " states, " << g.transitions.size() << " transitions, " << g.frontier.size()
            << " on the frontier, " << g.fuel_exhausted.size() << " out of fuel\n";
}

int run_lts(const LtsArgs& a) {
  if (a.format != "json" && a.format != "text") throw UsageError("--format must be json or text");
  Config cfg = make_config(a.calculus, a.order, a.strategy, a.labels, a.pool);
  TransitionGraph g = cfg.calculus == Calculus::Lambda ? lts_explore(parse_lambda(a.term), cfg, a.depth, a.fuel)
                                                       : lts_explore(parse_cl(a.term), cfg, a.depth, a.fuel);
  print_graph(g, a.format);
  return g.fuel_exhausted.empty() ? kExitOk : kExitUnknown;
}

int run_bisim(const BisimArgs& a) {
  Config cfg = make_config(a.calculus, a.order, a.strategy, a.labels, a.pool);
  BisimOptions opts{a.depth, a.fuel, a.divergence_blind};
  BisimResult r;
  if (cfg.calculus == Calculus::Lambda) {
    r = check_weak_bisim(parse_lambda(a.a), parse_lambda(a.b), cfg, opts);
  } else if (a.from_lambda) {
    r = check_weak_bisim(to_cl(parse_lambda(a.a)), to_cl(parse_lambda(a.b)), cfg, opts);
  } else {
    r = check_weak_bisim(parse_cl(a.a), parse_cl(a.b), cfg, opts);
  }
  std::cout << report_json(r) << "\n";
  std::cerr << summary(r.verdict) << "\n";
  return verdict_exit(r.verdict);
}

int run_oracle(const OracleArgs& a) {
  Strategy strategy = usage_guard([&] { return parse_strategy(a.strategy); });
  if (strategy == Strategy::NormalFull) throw UsageError("oracles run under lazy or cbv");
  Verdict v;
  if (a.kind == "contextual") {
    if (a.calculus != "lambda") throw UsageError("the contextual oracle works on lambda terms");
    ContextPool pool{a.frames, a.atom_size};
    v = contextual_oracle(parse_lambda(a.a), parse_lambda(a.b), strategy, pool, a.fuel);
  } else if (a.kind == "applicative") {
    OracleOptions opts{a.depth, a.fuel, a.pool};
    Calculus calculus = usage_guard([&] { return parse_calculus(a.calculus); });
    if (calculus == Calculus::Lambda)
      v = applicative_oracle(parse_lambda(a.a), parse_lambda(a.b), strategy, opts);
    else
      v = applicative_oracle(parse_cl(a.a), parse_cl(a.b), calculus, strategy, opts);
  } else {
    throw UsageError("oracle kind must be applicative or contextual");
  }
  std::cout << verdict_json(v) << "\n";
  std::cerr << summary(v) << "\n";
  return verdict_exit(v);
}

int run_check_tables(const TableCheckOptions& opts) {
  TableCheckReport rep = check_tables(opts);
  ordered_json j;
  j["terms"] = rep.terms;
  j["finite_diffs"] = rep.finite_diffs;
  j["reactive_diffs"] = rep.reactive_diffs;
  j["examples"] = rep.examples;
  std::cout << j.dump() << "\n";
  std::cerr << rep.terms << " terms, " << rep.finite_diffs << " finite diffs, " << rep.reactive_diffs
            << " reactive diffs, " << rep.wall_ms << " ms\n";
  return rep.finite_diffs + rep.reactive_diffs == 0 ? kExitOk : kExitDistinguished;
}

int run_congruence(CongruenceOptions opts) {
  opts.seed = effective_seed(opts.seed);
  Config cfg;
  CongruenceReport rep = congruence_harness(congruence_corpus(), cfg, opts);
  std::cout << congruence_json(rep) << "\n";
  std::size_t certified = 0;
  for (const auto& p : rep.pairs) certified += p.certified;
  std::cerr << certified << " certified pairs, " << rep.total_violations() << " violations\n";
  return rep.total_violations() == 0 ? kExitOk : kExitDistinguished;
}

int run_invariant_suite(InvariantOptions opts) {
  opts.seed = effective_seed(opts.seed);
  auto results = ipobisim::run_invariants(opts);
  ordered_json j = ordered_json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.ok();
    ordered_json e;
    e["name"] = r.name;
    e["checked"] = r.checked;
    e["failures"] = r.failures;
    if (!r.ok()) e["first_failure"] = r.first_failure;
    j.push_back(std::move(e));
    std::cerr << (r.ok() ? "ok    " : "FAIL  ") << r.name << ": " << r.checked << " checked, " << r.wall_ms
              << " ms\n";
  }
  std::cout << j.dump() << "\n";
  return ok ? kExitOk : kExitDistinguished;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derived transition systems for lambda calculus and combinatory logic, with bounded bisimulation"};
  app.require_subcommand(1);

  std::string term, calculus = "auto", strategy = "lazy", dir;
  std::size_t fuel = kDefaultFuel;
  bool trace = false;

  auto* parse = app.add_subcommand("parse", "Print the canonical form of a term");
  parse->add_option("term", term)->required();
  parse->add_option("--calculus", calculus, "auto|lambda|cl|clstar");

  auto* reduce = app.add_subcommand("reduce", "Run the one-step reducer to a halt");
  reduce->add_option("term", term)->required();
  reduce->add_option("--calculus", calculus, "auto|lambda|cl|clstar");
  reduce->add_option("--strategy", strategy, "lazy|cbv|normal_full");
  reduce->add_option("--fuel", fuel);
  reduce->add_flag("--trace", trace, "Print every intermediate term");

  auto* translate = app.add_subcommand("translate", "Translate between lambda terms and combinators");
  translate->add_option("term", term)->required();
  translate->add_option("--dir", dir, "lambda-to-cl|cl-to-lambda")->required();

  LtsArgs lts_args;
  auto* lts = app.add_subcommand("lts", "Explore the derived transition system from a term");
  lts->add_option("term", lts_args.term)->required();
  lts->add_option("--calculus", lts_args.calculus, "lambda|cl|clstar");
  lts->add_option("--order", lts_args.order, "first|second");
  lts->add_option("--strategy", lts_args.strategy, "lazy|cbv");
  lts->add_option("--labels", lts_args.labels, "reactive|all|finite");
  lts->add_option("--depth", lts_args.depth);
  lts->add_option("--fuel", lts_args.fuel);
  lts->add_option("--pool", lts_args.pool, "Argument size bound (first order) or arity bound (second order)");
  lts->add_option("--format", lts_args.format, "json|text");

  BisimArgs bisim_args;
  auto* bisim = app.add_subcommand("bisim", "Bounded weak bisimulation check of two terms");
  bisim->add_option("a", bisim_args.a)->required();
  bisim->add_option("b", bisim_args.b)->required();
  bisim->add_option("--calculus", bisim_args.calculus, "lambda|cl|clstar");
  bisim->add_option("--order", bisim_args.order, "first|second");
  bisim->add_option("--strategy", bisim_args.strategy, "lazy|cbv");
  bisim->add_option("--labels", bisim_args.labels, "reactive|all|finite");
  bisim->add_option("--depth", bisim_args.depth);
  bisim->add_option("--fuel", bisim_args.fuel);
  bisim->add_option("--pool", bisim_args.pool);
  bisim->add_flag("--divergence-blind", bisim_args.divergence_blind, "Treat mutual fuel exhaustion as matching");
  bisim->add_flag("--from-lambda", bisim_args.from_lambda, "Parse both terms as lambda terms and compare their translations");

  TableCheckOptions table_opts;
  auto* tables = app.add_subcommand("check-tables", "Compare unification-derived labels with the tables");
  tables->add_option("--max-size", table_opts.max_size);
  tables->add_option("--max-metavars", table_opts.max_metavars);
  tables->add_option("--arg-bound", table_opts.arg_bound);
  tables->add_option("--jobs", table_opts.jobs);

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Reference equivalence checks on closed terms");
  oracle->add_option("kind", oracle_args.kind, "applicative|contextual")->required();
  oracle->add_option("a", oracle_args.a)->required();
  oracle->add_option("b", oracle_args.b)->required();
  oracle->add_option("--calculus", oracle_args.calculus, "lambda|cl|clstar");
  oracle->add_option("--strategy", oracle_args.strategy, "lazy|cbv");
  oracle->add_option("--depth", oracle_args.depth);
  oracle->add_option("--fuel", oracle_args.fuel);
  oracle->add_option("--pool", oracle_args.pool, "Argument size bound for the applicative game");
  oracle->add_option("--frames", oracle_args.frames, "Context frames for the contextual game");
  oracle->add_option("--atom-size", oracle_args.atom_size, "Size bound of terms placed in contexts");

  auto* prop = app.add_subcommand("prop", "Property suites");
  prop->require_subcommand(1);
  CongruenceOptions cong_opts;
  auto* congruence = prop->add_subcommand("congruence", "Random contexts and substitutions on certified pairs");
  congruence->add_option("--samples", cong_opts.samples);
  congruence->add_option("--seed", cong_opts.seed);
  congruence->add_option("--jobs", cong_opts.jobs);
  congruence->add_option("--certify-depth", cong_opts.certify_depth);
  congruence->add_option("--check-depth", cong_opts.check_depth);
  congruence->add_option("--fuel", cong_opts.fuel);
  InvariantOptions inv_opts;
  auto* invariants = prop->add_subcommand("invariants", "Exhaustive invariant checks over small terms");
  invariants->add_option("--max-size", inv_opts.max_size);
  invariants->add_option("--open-size", inv_opts.open_size);
  invariants->add_option("--mgu-pairs", inv_opts.mgu_pairs);
  invariants->add_option("--seed", inv_opts.seed);
  invariants->add_option("--jobs", inv_opts.jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*parse) return run_parse(term, calculus);
    if (*reduce) return run_reduce(term, calculus, strategy, fuel, trace);
    if (*translate) return run_translate(term, dir);
    if (*lts) return run_lts(lts_args);
    if (*bisim) return run_bisim(bisim_args);
    if (*tables) return run_check_tables(table_opts);
    if (*oracle) return run_oracle(oracle_args);
    if (*congruence) return run_congruence(cong_opts);
    if (*invariants) return run_invariant_suite(inv_opts);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const OpenTermError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedConfig& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
