#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipobisim/ipo.hpp"

namespace ipobisim {

// Every one-step successor obtained by locating a rule instance under the strategy's
// evaluation contexts. Written independently of `step`, to cross-check it.
std::vector<CLTerm> context_search_successors(const CLTerm& t, Calculus calculus, Strategy strategy);
std::vector<LambdaTerm> context_search_successors(const LambdaTerm& t, Strategy strategy);

struct InvariantResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::string first_failure;
  double wall_ms = 0.0;

  bool ok() const { return failures == 0; }
};

struct InvariantOptions {
  std::size_t max_size = 8;        // closed enumerations
  std::size_t open_size = 6;       // enumerations over metavariables {x, y}
  std::size_t mgu_pairs = 10000;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
};

std::vector<InvariantResult> run_invariants(const InvariantOptions& opts);

struct TableCheckOptions {
  std::size_t max_size = 6;
  std::size_t max_metavars = 2;
  std::size_t arg_bound = 2;
  std::size_t jobs = 1;
};

struct TableCheckReport {
  std::size_t terms = 0;
  std::size_t finite_diffs = 0;    // pruned generic labels vs the finite table
  std::size_t reactive_diffs = 0;  // unpruned generic labels vs the bounded reactive table
  std::vector<std::string> examples;
  double wall_ms = 0.0;
};

TableCheckReport check_tables(const TableCheckOptions& opts);

// Pairs of CL* terms fed to the congruence harness by default.
std::vector<std::pair<CLTerm, CLTerm>> congruence_corpus();

}  // namespace ipobisim
