#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipobisim/ipo.hpp"

namespace ipobisim {

enum class VerdictKind { Equivalent, Distinguished, Unknown };
enum class UnknownReason { FuelExhausted, DepthExhausted, PoolLimited };
enum class Side { Left, Right, Both };

struct TraceEntry {
  std::string label;
  Side side = Side::Both;
  std::string reason;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Equivalent;
  std::size_t depth = 0;           // Equivalent
  std::vector<TraceEntry> trace;   // Distinguished
  UnknownReason reason = UnknownReason::PoolLimited;  // Unknown

  static Verdict equivalent(std::size_t d) { return {VerdictKind::Equivalent, d, {}, {}}; }
  static Verdict distinguished(std::vector<TraceEntry> t) {
    return {VerdictKind::Distinguished, 0, std::move(t), {}};
  }
  static Verdict unknown(UnknownReason r) { return {VerdictKind::Unknown, 0, {}, r}; }
};

std::string to_string(VerdictKind k);
std::string to_string(UnknownReason r);
std::string to_string(Side s);
std::string summary(const Verdict& v);  // e.g. "Equivalent(8)", "Unknown(FuelExhausted)"

struct BisimStats {
  std::size_t pairs_visited = 0;
  std::size_t tau_steps = 0;
  double wall_ms = 0.0;
};

struct BisimOptions {
  std::size_t depth = 6;
  std::size_t fuel = kDefaultFuel;
  bool divergence_blind = false;  // both sides running out of fuel count as matching silence
};

struct BisimResult {
  Verdict verdict;
  BisimStats stats;
};

// Bounded weak bisimulation game. Distinguished traces are shortest: the game is
// replayed with increasing depth and the first refutation (in label order) wins.
BisimResult check_weak_bisim(const CLTerm& a, const CLTerm& b, const Config& cfg, const BisimOptions& opts);
BisimResult check_weak_bisim(const LambdaTerm& a, const LambdaTerm& b, const Config& cfg,
                             const BisimOptions& opts);

// JSON report: {verdict, depth, trace, stats}.
std::string report_json(const BisimResult& r);

// Labels offered by both sides of a pair, named against the union of their metavariables.
std::vector<Label> pair_labels(const CLTerm& nf, const CLTerm& other, const Config& cfg);

struct OracleOptions {
  std::size_t depth = 3;
  std::size_t fuel = kDefaultFuel;
  std::size_t pool = 2;
};

// Applicative game: convergence, then recursion on every pool argument.
Verdict applicative_oracle(const LambdaTerm& a, const LambdaTerm& b, Strategy strategy, const OracleOptions& opts);
Verdict applicative_oracle(const CLTerm& a, const CLTerm& b, Calculus calculus, Strategy strategy,
                           const OracleOptions& opts);

// Contexts C ::= [ ] | C P | P C with at most `frames` frames; P ranges over closed
// terms up to `atom_size` plus the divergent term.
struct ContextPool {
  std::size_t frames = 2;
  std::size_t atom_size = 3;
};

std::vector<std::string> describe_contexts(Strategy strategy, const ContextPool& pool);

Verdict contextual_oracle(const LambdaTerm& a, const LambdaTerm& b, Strategy strategy, const ContextPool& pool,
                          std::size_t fuel);

struct CongruenceOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  std::size_t certify_depth = 8;
  std::size_t check_depth = 6;
  std::size_t fuel = 200;
  std::size_t jobs = 1;
};

struct CongruencePairReport {
  std::string left;
  std::string right;
  bool certified = false;
  std::string certificate;  // verdict summary of the premise check
  std::size_t equivalent = 0;
  std::size_t unknown = 0;
  std::vector<std::string> violations;  // "context | theta" descriptions
};

struct CongruenceReport {
  std::vector<CongruencePairReport> pairs;
  std::size_t total_violations() const;
};

// Samples random (context, substitution) pairs for each certified pair and checks
// that the plugged instances are never distinguished.
CongruenceReport congruence_harness(const std::vector<std::pair<CLTerm, CLTerm>>& pairs, const Config& cfg,
                                    const CongruenceOptions& opts);

std::string congruence_json(const CongruenceReport& r);

}  // namespace ipobisim
