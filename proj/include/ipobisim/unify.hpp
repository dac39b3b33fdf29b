#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "ipobisim/terms.hpp"

namespace ipobisim {

// Most general unifier, idempotent, with occurs check. Returns nullopt when the terms
// clash or a metavariable would occur in its own binding. When both sides are
// metavariables, the left one is bound to the right one.
std::optional<Substitution> mgu(const CLTerm& a, const CLTerm& b);

// Simultaneous unification of several equations.
std::optional<Substitution> mgu_all(const std::vector<std::pair<CLTerm, CLTerm>>& equations);

struct Renamed {
  CLTerm term;
  std::map<std::string, std::string> renaming;  // old name -> new name
};

// Renames every metavariable of t to y1, y2, ... (first occurrence order), skipping `avoid`.
Renamed rename_apart(const CLTerm& t, const std::set<std::string>& avoid,
                     std::string_view prefix = "y");

// Restriction of theta to the given names.
Substitution restrict_to(const Substitution& theta, const std::set<std::string>& names);

}  // namespace ipobisim
