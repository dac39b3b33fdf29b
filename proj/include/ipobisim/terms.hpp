#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ipobisim {

// ---------------------------------------------------------------------------
// Errors

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string expected);
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class OpenTermError : public std::runtime_error {
 public:
  explicit OpenTermError(const std::string& var)
      : std::runtime_error("term is not closed: free variable " + var) {}
};

class NoClassError : public std::runtime_error {
 public:
  explicit NoClassError(const std::string& term)
      : std::runtime_error("stuck term without critical variable: " + term) {}
};

// ---------------------------------------------------------------------------
// Combinatory terms (plain CL, CL* and open second-order states)

enum class CLTag : std::uint8_t { K, S, Kp, Sp, Spp, App, Meta };

class CLTerm {
 public:
  CLTerm();  // K

  static CLTerm k();
  static CLTerm s();
  static CLTerm kp(CLTerm m);
  static CLTerm sp(CLTerm m);
  static CLTerm spp(CLTerm m, CLTerm n);
  static CLTerm app(CLTerm f, CLTerm a);
  static CLTerm meta(std::string name);

  CLTag tag() const;
  bool is(CLTag t) const { return tag() == t; }
  // App children.
  const CLTerm& fun() const;
  const CLTerm& arg() const;
  // Kp/Sp/Spp children.
  const CLTerm& first() const;
  const CLTerm& second() const;
  const std::string& name() const;

  // Leaves and K'/S'/S'' constructors count one each; application nodes are free.
  std::size_t size() const;
  std::size_t hash() const;

  friend bool operator==(const CLTerm& a, const CLTerm& b);
  // Enumeration order: size, then tag, then children left to right.
  friend std::strong_ordering operator<=>(const CLTerm& a, const CLTerm& b);

 private:
  struct Node;
  explicit CLTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct CLTermHash {
  std::size_t operator()(const CLTerm& t) const { return t.hash(); }
};

// Left-nested application of `head` to `args`.
CLTerm apply_all(CLTerm head, const std::vector<CLTerm>& args);

struct Spine {
  CLTerm head;
  std::vector<CLTerm> args;
};
Spine unwind(const CLTerm& t);

bool is_plain(const CLTerm& t);
bool is_closed(const CLTerm& t);
bool is_lazy_value(const CLTerm& t);
bool is_cbv_value(const CLTerm& t);  // CL* by-value grammar, metavariables included
bool is_probe_shape(const CLTerm& t);

using Substitution = std::map<std::string, CLTerm>;

CLTerm apply_subst(const CLTerm& t, const Substitution& theta);
Substitution compose(const Substitution& first, const Substitution& then);

std::set<std::string> free_metavars(const CLTerm& t);
void collect_metavars(const CLTerm& t, std::set<std::string>& out);
// Metavariable names in first-occurrence (pre-order) order.
std::vector<std::string> metavars_in_order(const CLTerm& t);

// Least `prefix`N (N >= 1) not in `avoid`.
std::string fresh_metavar(const std::set<std::string>& avoid, std::string_view prefix = "y");

// Renames metavariables by first occurrence across all terms to `prefix`1, `prefix`2, ...
std::vector<CLTerm> canonical_rename(const std::vector<CLTerm>& terms, std::string_view prefix = "v");

std::string format_term(const CLTerm& t);

enum class Flavor { Plain, Star };

// All terms of size <= bound in enumeration order.
std::vector<CLTerm> enumerate_terms(std::size_t size_bound, const std::vector<std::string>& pool,
                                    Flavor flavor);
// Streams the same sequence without materialising the last size level.
void for_each_term(std::size_t size_bound, const std::vector<std::string>& pool, Flavor flavor,
                   const std::function<void(const CLTerm&)>& visit);

// ---------------------------------------------------------------------------
// Lambda terms with distance indices and retained display names

enum class LamTag : std::uint8_t { Var, Abs, App };

class LambdaTerm {
 public:
  LambdaTerm();  // \x. x

  static LambdaTerm var(int index, std::string name);
  static LambdaTerm abs(std::string name, LambdaTerm body);
  static LambdaTerm app(LambdaTerm f, LambdaTerm a);

  LamTag tag() const;
  bool is(LamTag t) const { return tag() == t; }
  int index() const;
  const std::string& name() const;
  const LambdaTerm& body() const;
  const LambdaTerm& fun() const;
  const LambdaTerm& arg() const;
  std::size_t size() const;
  std::size_t hash() const;  // ignores binder display names
  bool closed() const;

  // Alpha-equality: binder names are ignored, free variables compare by name.
  friend bool operator==(const LambdaTerm& a, const LambdaTerm& b);

 private:
  struct Node;
  explicit LambdaTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool alpha_eq(const LambdaTerm& a, const LambdaTerm& b);
bool is_closed(const LambdaTerm& t);
std::set<std::string> free_vars(const LambdaTerm& t);
LambdaTerm apply_all(LambdaTerm head, const std::vector<LambdaTerm>& args);

// Capture-avoiding printer: binder names are freshened only where needed.
std::string format_term(const LambdaTerm& t);
// Index-only rendering, stable under alpha-conversion.
std::string debruijn_key(const LambdaTerm& t);

// Closed terms of size <= bound in order of size (same size measure as CLTerm).
std::vector<LambdaTerm> enumerate_lambda(std::size_t size_bound);

// ---------------------------------------------------------------------------
// Parsing

LambdaTerm parse_lambda(std::string_view text, bool require_closed = true);
CLTerm parse_cl(std::string_view text);

// ---------------------------------------------------------------------------
// Spine classification

struct SpineClass {
  enum class Kind { BareVar, HeadStuck, Value, Reducible, Critical };
  Kind kind = Kind::Value;
  std::string var;     // BareVar, HeadStuck, Critical
  std::size_t arg_count = 0;  // HeadStuck

  static SpineClass bare(std::string v) { return {Kind::BareVar, std::move(v), 0}; }
  static SpineClass stuck(std::string v, std::size_t n) { return {Kind::HeadStuck, std::move(v), n}; }
  static SpineClass value() { return {Kind::Value, {}, 0}; }
  static SpineClass reducible() { return {Kind::Reducible, {}, 0}; }
  static SpineClass critical(std::string v) { return {Kind::Critical, std::move(v), 0}; }

  friend bool operator==(const SpineClass&, const SpineClass&) = default;
};

std::string to_string(const SpineClass& c);

SpineClass classify_lazy(const CLTerm& t);
SpineClass classify_cbv(const CLTerm& t);  // throws NoClassError

}  // namespace ipobisim
