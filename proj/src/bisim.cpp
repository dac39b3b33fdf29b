#include "ipobisim/bisim.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace ipobisim {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Equivalent:
      return "Equivalent";
    case VerdictKind::Distinguished:
      return "Distinguished";
    case VerdictKind::Unknown:
      return "Unknown";
  }
  return "?";
}

std::string to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::FuelExhausted:
      return "FuelExhausted";
    case UnknownReason::DepthExhausted:
      return "DepthExhausted";
    case UnknownReason::PoolLimited:
      return "PoolLimited";
  }
  return "?";
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Left:
      return "left";
    case Side::Right:
      return "right";
    case Side::Both:
      return "both";
  }
  return "?";
}

std::string summary(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Equivalent:
      return "Equivalent(" + std::to_string(v.depth) + ")";
    case VerdictKind::Distinguished:
      return "Distinguished(" + std::to_string(v.trace.size()) + "-step trace)";
    case VerdictKind::Unknown:
      return "Unknown(" + to_string(v.reason) + ")";
  }
  return "?";
}

namespace {

// Per-calculus hooks used by the generic game.
std::string pair_key(const CLTerm& a, const CLTerm& b) {
  auto r = canonical_rename({a, b});
  return format_term(r[0]) + " | " + format_term(r[1]);
}
std::string pair_key(const LambdaTerm& a, const LambdaTerm& b) { return debruijn_key(a) + " | " + debruijn_key(b); }

std::vector<LambdaLabel> pair_labels(const LambdaTerm& nf, const LambdaTerm&, const Config& cfg) {
  return labels_table(nf, cfg);
}

struct Outcome {
  enum class Kind { Related, Distinguished, Unknown } kind = Kind::Related;
  std::vector<TraceEntry> trace;
  UnknownReason reason = UnknownReason::FuelExhausted;
};

template <class T>
class Game {
 public:
  Game(const Config& cfg, const BisimOptions& opts, BisimStats& stats) : cfg_(cfg), opts_(opts), stats_(stats) {}

  Outcome play(const T& a, const T& b, std::size_t depth) {
    auto na = normalize(a, cfg_, opts_.fuel);
    auto nb = normalize(b, cfg_, opts_.fuel);
    stats_.tau_steps += na.steps + nb.steps;
    bool ea = na.status == NormalStatus::FuelExhausted;
    bool eb = nb.status == NormalStatus::FuelExhausted;
    if (ea || eb) {
      if (!opts_.divergence_blind) return unknown(UnknownReason::FuelExhausted);
      if (ea && eb) return {};
      Outcome o;
      o.kind = Outcome::Kind::Distinguished;
      o.trace.push_back({"(halt)", ea ? Side::Right : Side::Left, "observability: only this side halts"});
      return o;
    }
    if (depth == 0) {
      depth_cut_ = true;
      return {};
    }
    if (na.result == nb.result) return {};
    ++stats_.pairs_visited;
    std::string key = pair_key(na.result, nb.result);
    if (in_progress_.count(key)) return {};
    auto done = verified_.find(key);
    if (done != verified_.end() && done->second >= depth) return {};

    auto la = pair_labels(na.result, nb.result, cfg_);
    auto lb = pair_labels(nb.result, na.result, cfg_);
    if (labels_truncated(na.result, cfg_) || labels_truncated(nb.result, cfg_)) truncated_ = true;
    std::map<std::string, std::size_t> ia, ib;
    for (std::size_t i = 0; i < la.size(); ++i) ia.emplace(format_label(la[i]), i);
    for (std::size_t i = 0; i < lb.size(); ++i) ib.emplace(format_label(lb[i]), i);
    std::set<std::string> all;
    for (const auto& [t, _] : ia) all.insert(t);
    for (const auto& [t, _] : ib) all.insert(t);
    for (const auto& text : all) {
      bool in_a = ia.count(text) > 0;
      bool in_b = ib.count(text) > 0;
      if (in_a != in_b) {
        Outcome o;
        o.kind = Outcome::Kind::Distinguished;
        o.trace.push_back({text, in_a ? Side::Left : Side::Right, "unmatched label"});
        return o;
      }
    }

    in_progress_.insert(key);
    std::optional<Outcome> pending;
    for (const auto& [text, i] : ia) {
      T ta = apply_label(na.result, la[i], cfg_);
      T tb = apply_label(nb.result, lb[ib.at(text)], cfg_);
      Outcome r = play(ta, tb, depth - 1);
      if (r.kind == Outcome::Kind::Distinguished) {
        in_progress_.erase(key);
        r.trace.insert(r.trace.begin(), TraceEntry{text, Side::Both, "matched"});
        return r;
      }
      if (r.kind == Outcome::Kind::Unknown && !pending) pending = r;
    }
    in_progress_.erase(key);
    if (pending) return *pending;
    auto& slot = verified_[key];
    slot = std::max(slot, depth);
    return {};
  }

  bool depth_cut() const { return depth_cut_; }
  bool truncated() const { return truncated_; }

 private:
  static Outcome unknown(UnknownReason r) {
    Outcome o;
    o.kind = Outcome::Kind::Unknown;
    o.reason = r;
    return o;
  }

  const Config& cfg_;
  const BisimOptions& opts_;
  BisimStats& stats_;
  std::unordered_set<std::string> in_progress_;
  std::unordered_map<std::string, std::size_t> verified_;
  bool depth_cut_ = false;
  bool truncated_ = false;
};

template <class T>
BisimResult run_game(const T& a, const T& b, const Config& cfg, const BisimOptions& opts) {
  validate(cfg);
  auto start = std::chrono::steady_clock::now();
  BisimResult res;
  auto finish = [&](Verdict v) {
    res.verdict = std::move(v);
    res.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return res;
  };
  if (opts.depth == 0) return finish(Verdict::equivalent(0));
  bool truncated = false;
  for (std::size_t d = 1; d <= opts.depth; ++d) {
    Game<T> game(cfg, opts, res.stats);
    Outcome o = game.play(a, b, d);
    truncated = truncated || game.truncated();
    if (o.kind == Outcome::Kind::Distinguished) return finish(Verdict::distinguished(std::move(o.trace)));
    if (d == opts.depth || !game.depth_cut()) {
      if (o.kind == Outcome::Kind::Unknown) return finish(Verdict::unknown(o.reason));
      if (truncated) return finish(Verdict::unknown(UnknownReason::PoolLimited));
      return finish(Verdict::equivalent(opts.depth));
    }
  }
  return finish(Verdict::equivalent(opts.depth));
}

}  // namespace

std::vector<Label> pair_labels(const CLTerm& nf, const CLTerm& other, const Config& cfg) {
  return labels_table(nf, cfg, free_metavars(other));
}

BisimResult check_weak_bisim(const CLTerm& a, const CLTerm& b, const Config& cfg, const BisimOptions& opts) {
  if (cfg.calculus == Calculus::Lambda) throw UnsupportedConfig("lambda configuration needs lambda terms");
  return run_game(a, b, cfg, opts);
}

BisimResult check_weak_bisim(const LambdaTerm& a, const LambdaTerm& b, const Config& cfg,
                             const BisimOptions& opts) {
  if (cfg.calculus != Calculus::Lambda) throw UnsupportedConfig("combinatory configuration needs CL terms");
  return run_game(a, b, cfg, opts);
}

std::string report_json(const BisimResult& r) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(r.verdict.kind);
  j["depth"] = r.verdict.kind == VerdictKind::Equivalent ? nlohmann::ordered_json(r.verdict.depth)
                                                         : nlohmann::ordered_json(nullptr);
  if (r.verdict.kind == VerdictKind::Unknown) j["reason"] = to_string(r.verdict.reason);
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& e : r.verdict.trace)
    j["trace"].push_back({{"label", e.label}, {"side", to_string(e.side)}, {"reason", e.reason}});
  j["stats"] = {{"pairs_visited", r.stats.pairs_visited},
                {"tau_steps", r.stats.tau_steps},
                {"wall_ms", r.stats.wall_ms}};
  return j.dump();
}

// ---------------------------------------------------------------------------
// Applicative oracle

namespace {

template <class T, class Eval>
Verdict applicative_game(const T& a, const T& b, const std::vector<T>& pool, std::size_t depth, Eval&& eval,
                         bool& fuel_seen) {
  auto ea = eval(a);
  auto eb = eval(b);
  bool xa = ea.status == NormalStatus::FuelExhausted;
  bool xb = eb.status == NormalStatus::FuelExhausted;
  if (xa && xb) {
    fuel_seen = true;
    return Verdict::unknown(UnknownReason::FuelExhausted);
  }
  if (xa != xb)
    return Verdict::distinguished({{"(halt)", xa ? Side::Right : Side::Left, "convergence differs"}});
  if (ea.result == eb.result) return Verdict::equivalent(depth);
  if (depth == 0) return Verdict::unknown(UnknownReason::PoolLimited);
  for (const auto& p : pool) {
    Verdict v = applicative_game(T::app(ea.result, p), T::app(eb.result, p), pool, depth - 1, eval, fuel_seen);
    if (v.kind == VerdictKind::Distinguished) {
      v.trace.insert(v.trace.begin(), TraceEntry{"[_] " + format_term(p), Side::Both, "applied"});
      return v;
    }
  }
  return Verdict::unknown(fuel_seen ? UnknownReason::FuelExhausted : UnknownReason::PoolLimited);
}

}  // namespace

Verdict applicative_oracle(const LambdaTerm& a, const LambdaTerm& b, Strategy strategy, const OracleOptions& opts) {
  const auto& pool = lambda_argument_pool(strategy, opts.pool);
  bool fuel_seen = false;
  return applicative_game(a, b, pool, opts.depth,
                          [&](const LambdaTerm& t) { return normalize_tau(t, strategy, opts.fuel); }, fuel_seen);
}

Verdict applicative_oracle(const CLTerm& a, const CLTerm& b, Calculus calculus, Strategy strategy,
                           const OracleOptions& opts) {
  const auto& pool = argument_pool(calculus, strategy, opts.pool);
  bool fuel_seen = false;
  return applicative_game(a, b, pool, opts.depth,
                          [&](const CLTerm& t) { return normalize_tau(t, calculus, strategy, opts.fuel); },
                          fuel_seen);
}

// ---------------------------------------------------------------------------
// Contextual oracle

namespace {

struct Frame {
  bool applicant_left = false;  // P C instead of C P
  LambdaTerm term;
};

std::vector<LambdaTerm> context_atoms(const ContextPool& pool) {
  auto atoms = enumerate_lambda(pool.atom_size);
  atoms.push_back(lambda_omega());
  return atoms;
}

std::vector<std::vector<Frame>> all_contexts(const ContextPool& pool) {
  auto atoms = context_atoms(pool);
  std::vector<std::vector<Frame>> out{{}};
  std::vector<std::vector<Frame>> layer{{}};
  for (std::size_t f = 0; f < pool.frames; ++f) {
    std::vector<std::vector<Frame>> next;
    for (const auto& ctx : layer)
      for (bool left : {false, true})
        for (const auto& p : atoms) {
          auto c = ctx;
          c.push_back({left, p});
          next.push_back(std::move(c));
        }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

LambdaTerm fill(const std::vector<Frame>& ctx, const LambdaTerm& t) {
  LambdaTerm cur = t;
  for (const auto& f : ctx) cur = f.applicant_left ? LambdaTerm::app(f.term, cur) : LambdaTerm::app(cur, f.term);
  return cur;
}

std::string context_text(const std::vector<Frame>& ctx) {
  std::string cur = "[_]";
  for (const auto& f : ctx) {
    std::string p = "(" + format_term(f.term) + ")";
    cur = f.applicant_left ? p + " (" + cur + ")" : "(" + cur + ") " + p;
  }
  return cur;
}

}  // namespace

std::vector<std::string> describe_contexts(Strategy, const ContextPool& pool) {
  std::vector<std::string> out;
  for (const auto& c : all_contexts(pool)) out.push_back(context_text(c));
  return out;
}

Verdict contextual_oracle(const LambdaTerm& a, const LambdaTerm& b, Strategy strategy, const ContextPool& pool,
                          std::size_t fuel) {
  if (a == b) return Verdict::equivalent(0);
  for (const auto& ctx : all_contexts(pool)) {
    bool ha = normalize_tau(fill(ctx, a), strategy, fuel).status == NormalStatus::Normal;
    bool hb = normalize_tau(fill(ctx, b), strategy, fuel).status == NormalStatus::Normal;
    if (ha != hb)
      return Verdict::distinguished({{context_text(ctx), ha ? Side::Left : Side::Right, "halts only on this side"}});
  }
  return Verdict::unknown(UnknownReason::PoolLimited);
}

// ---------------------------------------------------------------------------
// Congruence harness

std::size_t CongruenceReport::total_violations() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.violations.size();
  return n;
}

namespace {

struct Sample {
  std::vector<std::pair<bool, CLTerm>> frames;  // (applicant on the left, term)
  Substitution theta;
};

CLTerm fill(const std::vector<std::pair<bool, CLTerm>>& frames, const CLTerm& t) {
  CLTerm cur = t;
  for (const auto& [left, p] : frames) cur = left ? CLTerm::app(p, cur) : CLTerm::app(cur, p);
  return cur;
}

std::string sample_text(const Sample& s) {
  std::string ctx = "[_]";
  for (const auto& [left, p] : s.frames) {
    std::string pt = "(" + format_term(p) + ")";
    ctx = left ? pt + " (" + ctx + ")" : "(" + ctx + ") " + pt;
  }
  std::string th;
  for (const auto& [k, v] : s.theta) th += (th.empty() ? "" : ", ") + ("?" + k) + ":=" + format_term(v);
  return ctx + " | {" + th + "}";
}

// Uniform draw without relying on implementation-defined distributions.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

CongruenceReport congruence_harness(const std::vector<std::pair<CLTerm, CLTerm>>& pairs, const Config& cfg,
                                    const CongruenceOptions& opts) {
  validate(cfg);
  const auto atoms = enumerate_terms(3, {"x", "y"}, Flavor::Star);
  std::mt19937_64 rng(opts.seed);
  CongruenceReport report;
  for (const auto& [a, b] : pairs) {
    CongruencePairReport pr;
    pr.left = format_term(a);
    pr.right = format_term(b);
    BisimOptions cert_opts{opts.certify_depth, opts.fuel, false};
    Verdict cert = check_weak_bisim(a, b, cfg, cert_opts).verdict;
    pr.certificate = summary(cert);
    pr.certified = cert.kind == VerdictKind::Equivalent;
    if (!pr.certified) {
      report.pairs.push_back(std::move(pr));
      continue;
    }
    std::set<std::string> metas = free_metavars(a);
    collect_metavars(b, metas);
    std::vector<Sample> samples(opts.samples);
    for (auto& s : samples) {
      std::size_t frames = draw(rng, 4);
      for (std::size_t f = 0; f < frames; ++f) {
        bool left = draw(rng, 2) == 1;
        s.frames.emplace_back(left, atoms[draw(rng, atoms.size())]);
      }
      for (const auto& m : metas) s.theta.emplace(m, atoms[draw(rng, atoms.size())]);
    }
    std::vector<Verdict> verdicts(samples.size());
    BisimOptions check_opts{opts.check_depth, opts.fuel, false};
    auto worker = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < samples.size(); i += stride) {
        const auto& s = samples[i];
        verdicts[i] = check_weak_bisim(fill(s.frames, apply_subst(a, s.theta)), fill(s.frames, apply_subst(b, s.theta)),
                                       cfg, check_opts)
                          .verdict;
      }
    };
    std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
    if (jobs == 1) {
      worker(0, 1);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker, t, jobs);
      for (auto& th : threads) th.join();
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      switch (verdicts[i].kind) {
        case VerdictKind::Equivalent:
          ++pr.equivalent;
          break;
        case VerdictKind::Unknown:
          ++pr.unknown;
          break;
        case VerdictKind::Distinguished:
          pr.violations.push_back(sample_text(samples[i]));
          break;
      }
    }
    report.pairs.push_back(std::move(pr));
  }
  return report;
}

std::string congruence_json(const CongruenceReport& r) {
  nlohmann::ordered_json j;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : r.pairs) {
    nlohmann::ordered_json e;
    e["left"] = p.left;
    e["right"] = p.right;
    e["certified"] = p.certified;
    e["certificate"] = p.certificate;
    e["equivalent"] = p.equivalent;
    e["unknown"] = p.unknown;
    e["violations"] = p.violations;
    j["pairs"].push_back(std::move(e));
  }
  j["total_violations"] = r.total_violations();
  return j.dump();
}

}  // namespace ipobisim
