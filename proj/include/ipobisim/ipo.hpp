#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipobisim/reduction.hpp"
#include "ipobisim/terms.hpp"

namespace ipobisim {

class UnsupportedConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotEnabled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A context [ ]_subst, optionally with a value applied from the left, followed by
// arguments on the right. The empty label is the silent step.
template <class T>
struct LabelT {
  Substitution subst;
  std::optional<T> left;
  std::vector<T> args;

  bool is_tau() const { return subst.empty() && !left && args.empty(); }
};

using Label = LabelT<CLTerm>;
using LambdaLabel = LabelT<LambdaTerm>;

// Human-readable form, e.g. `[_{?x:=K'(?z1)}] ?y1` or `K'(?z1) [_]`; the silent step is `[_]`.
std::string format_label(const Label& l);
std::string format_label(const LambdaLabel& l);

enum class Order { First, Second };
enum class LabelSet { ReactiveOnly, AllIpo, Finite };

std::string to_string(Order o);
std::string to_string(LabelSet s);
Order parse_order(std::string_view s);
LabelSet parse_label_set(std::string_view s);  // accepts reactive|reactive_only|all|all_ipo|finite

struct Config {
  Calculus calculus = Calculus::CLStar;
  Order order = Order::Second;
  Strategy strategy = Strategy::Lazy;
  LabelSet label_set = LabelSet::Finite;
  std::size_t arg_pool = 3;  // size bound for first-order arguments, arity bound for second-order
};

std::string describe(const Config& cfg);
void validate(const Config& cfg);  // throws UnsupportedConfig

// The five probe shapes K, S, K'(?z1), S'(?z1), S''(?z1,?z2), with z-names chosen outside `avoid`.
std::vector<CLTerm> probe_values(const std::set<std::string>& avoid);

// Closed argument terms for first-order labels: every term up to the size bound
// (values only under cbv), plus a divergent term under lazy evaluation.
const std::vector<CLTerm>& argument_pool(Calculus calculus, Strategy strategy, std::size_t bound);
const std::vector<LambdaTerm>& lambda_argument_pool(Strategy strategy, std::size_t bound);

// Divergent terms used in lazy pools.
CLTerm cl_omega();
LambdaTerm lambda_omega();

// Table-driven labels, sorted by text. Fresh metavariables avoid both `avoid` and the
// state's own metavariables.
std::vector<Label> labels_table(const CLTerm& state, const Config& cfg,
                                const std::set<std::string>& avoid = {});
std::vector<LambdaLabel> labels_table(const LambdaTerm& state, const Config& cfg);

// True when the state's label set is cut off by a finite bound (argument pool or
// substitution arity), so an agreement on it is only relative to that bound.
bool labels_truncated(const CLTerm& state, const Config& cfg);
bool labels_truncated(const LambdaTerm& state, const Config& cfg);

struct GenericOptions {
  std::size_t arg_bound = 2;  // max arguments applied to a probe inside the substitution
  bool prune = false;         // keep only substitutions whose range is a bare probe
};

// Reactive labels of second-order lazy CL* computed by unifying rule left-hand sides
// against the state spine extended with fresh arguments. Sorted by text.
std::vector<Label> labels_generic(const CLTerm& state, const Config& cfg, const GenericOptions& opts,
                                  const std::set<std::string>& avoid = {});

// Plugs the state into the label's context and fires exactly one step.
CLTerm apply_label(const CLTerm& state, const Label& l, const Config& cfg);
LambdaTerm apply_label(const LambdaTerm& state, const LambdaLabel& l, const Config& cfg);

// The plugged term before reduction.
CLTerm plug(const CLTerm& state, const Label& l);
LambdaTerm plug(const LambdaTerm& state, const LambdaLabel& l);

NormalizeOutcome<CLTerm> normalize(const CLTerm& t, const Config& cfg, std::size_t fuel);
NormalizeOutcome<LambdaTerm> normalize(const LambdaTerm& t, const Config& cfg, std::size_t fuel);

template <class T>
struct WeakOutcome {
  enum class Status { Ok, NotEnabled, FuelExhausted } status = Status::Ok;
  std::optional<T> target;
  std::size_t tau_steps = 0;
};

WeakOutcome<CLTerm> weak_successor(const CLTerm& state, const Label& l, const Config& cfg,
                                   std::size_t fuel);
WeakOutcome<LambdaTerm> weak_successor(const LambdaTerm& state, const LambdaLabel& l,
                                       const Config& cfg, std::size_t fuel);

struct Transition {
  std::string source;
  std::string label;        // human-readable form
  std::string label_json;   // dump form
  std::string target;
  std::size_t tau_folded = 0;
};

struct TransitionGraph {
  std::vector<std::string> states;         // first representatives, discovery order
  std::vector<Transition> transitions;
  std::vector<std::string> frontier;       // discovered but not expanded (depth limit)
  std::vector<std::string> fuel_exhausted; // states whose silent run did not finish
};

TransitionGraph lts_explore(const CLTerm& root, const Config& cfg, std::size_t depth, std::size_t fuel);
TransitionGraph lts_explore(const LambdaTerm& root, const Config& cfg, std::size_t depth,
                            std::size_t fuel);

// JSON object for one transition, on a single line.
std::string transition_json(const Transition& t);

}  // namespace ipobisim
