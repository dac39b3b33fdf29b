#include "ipobisim/terms.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_map>
#include <utility>

namespace ipobisim {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

ParseError::ParseError(std::size_t position, std::string expected)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": expected " +
                         expected),
      position_(position),
      expected_(std::move(expected)) {}

// ===========================================================================
// CLTerm

struct CLTerm::Node {
  CLTag tag;
  CLTerm c0{std::shared_ptr<const Node>{}};
  CLTerm c1{std::shared_ptr<const Node>{}};
  std::string name;
  std::size_t size = 1;
  std::size_t hash = 0;
};

CLTerm::CLTerm() : CLTerm(k()) {}

CLTerm CLTerm::k() {
  static const CLTerm t = [] {
    auto n = std::make_shared<Node>();
    n->tag = CLTag::K;
    n->hash = mix(0, 1);
    return CLTerm(std::shared_ptr<const Node>(n));
  }();
  return t;
}

CLTerm CLTerm::s() {
  static const CLTerm t = [] {
    auto n = std::make_shared<Node>();
    n->tag = CLTag::S;
    n->hash = mix(0, 2);
    return CLTerm(std::shared_ptr<const Node>(n));
  }();
  return t;
}

CLTerm CLTerm::kp(CLTerm m) {
  auto n = std::make_shared<Node>();
  n->tag = CLTag::Kp;
  n->size = 1 + m.size();
  n->hash = mix(mix(0, 3), m.hash());
  n->c0 = std::move(m);
  return CLTerm(std::shared_ptr<const Node>(n));
}

CLTerm CLTerm::sp(CLTerm m) {
  auto n = std::make_shared<Node>();
  n->tag = CLTag::Sp;
  n->size = 1 + m.size();
  n->hash = mix(mix(0, 4), m.hash());
  n->c0 = std::move(m);
  return CLTerm(std::shared_ptr<const Node>(n));
}

CLTerm CLTerm::spp(CLTerm m, CLTerm k) {
  auto n = std::make_shared<Node>();
  n->tag = CLTag::Spp;
  n->size = 1 + m.size() + k.size();
  n->hash = mix(mix(mix(0, 5), m.hash()), k.hash());
  n->c0 = std::move(m);
  n->c1 = std::move(k);
  return CLTerm(std::shared_ptr<const Node>(n));
}

CLTerm CLTerm::app(CLTerm f, CLTerm a) {
  auto n = std::make_shared<Node>();
  n->tag = CLTag::App;
  n->size = f.size() + a.size();
  n->hash = mix(mix(mix(0, 6), f.hash()), a.hash());
  n->c0 = std::move(f);
  n->c1 = std::move(a);
  return CLTerm(std::shared_ptr<const Node>(n));
}

CLTerm CLTerm::meta(std::string name) {
  auto n = std::make_shared<Node>();
  n->tag = CLTag::Meta;
  n->hash = mix(mix(0, 7), std::hash<std::string>{}(name));
  n->name = std::move(name);
  return CLTerm(std::shared_ptr<const Node>(n));
}

CLTag CLTerm::tag() const { return node_->tag; }
const CLTerm& CLTerm::fun() const { return node_->c0; }
const CLTerm& CLTerm::arg() const { return node_->c1; }
const CLTerm& CLTerm::first() const { return node_->c0; }
const CLTerm& CLTerm::second() const { return node_->c1; }
const std::string& CLTerm::name() const { return node_->name; }
std::size_t CLTerm::size() const { return node_->size; }
std::size_t CLTerm::hash() const { return node_->hash; }

bool operator==(const CLTerm& a, const CLTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.tag() != b.tag() || a.size() != b.size()) return false;
  switch (a.tag()) {
    case CLTag::K:
    case CLTag::S:
      return true;
    case CLTag::Meta:
      return a.name() == b.name();
    case CLTag::Kp:
    case CLTag::Sp:
      return a.first() == b.first();
    case CLTag::Spp:
    case CLTag::App:
      return a.node_->c0 == b.node_->c0 && a.node_->c1 == b.node_->c1;
  }
  return false;
}

std::strong_ordering operator<=>(const CLTerm& a, const CLTerm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.tag() <=> b.tag(); c != 0) return c;
  switch (a.tag()) {
    case CLTag::K:
    case CLTag::S:
      return std::strong_ordering::equal;
    case CLTag::Meta:
      return a.name() <=> b.name();
    case CLTag::Kp:
    case CLTag::Sp:
      return a.first() <=> b.first();
    case CLTag::Spp:
    case CLTag::App:
      if (auto c = a.node_->c0 <=> b.node_->c0; c != 0) return c;
      return a.node_->c1 <=> b.node_->c1;
  }
  return std::strong_ordering::equal;
}

CLTerm apply_all(CLTerm head, const std::vector<CLTerm>& args) {
  for (const auto& a : args) head = CLTerm::app(std::move(head), a);
  return head;
}

Spine unwind(const CLTerm& t) {
  Spine sp;
  CLTerm cur = t;
  while (cur.is(CLTag::App)) {
    sp.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(sp.args.begin(), sp.args.end());
  sp.head = cur;
  return sp;
}

bool is_plain(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
    case CLTag::Meta:
      return true;
    case CLTag::App:
      return is_plain(t.fun()) && is_plain(t.arg());
    default:
      return false;
  }
}

bool is_closed(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return true;
    case CLTag::Meta:
      return false;
    case CLTag::Kp:
    case CLTag::Sp:
      return is_closed(t.first());
    case CLTag::Spp:
    case CLTag::App:
      return is_closed(t.first()) && is_closed(t.second());
  }
  return true;
}

bool is_lazy_value(const CLTerm& t) {
  return t.is(CLTag::K) || t.is(CLTag::S) || t.is(CLTag::Kp) || t.is(CLTag::Sp) ||
         t.is(CLTag::Spp);
}

bool is_cbv_value(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
    case CLTag::Meta:
      return true;
    case CLTag::Kp:
    case CLTag::Sp:
      return is_cbv_value(t.first());
    case CLTag::Spp:
      return is_cbv_value(t.first()) && is_cbv_value(t.second());
    case CLTag::App:
      return false;
  }
  return false;
}

bool is_probe_shape(const CLTerm& t) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return true;
    case CLTag::Kp:
    case CLTag::Sp:
      return t.first().is(CLTag::Meta);
    case CLTag::Spp:
      return t.first().is(CLTag::Meta) && t.second().is(CLTag::Meta) &&
             t.first().name() != t.second().name();
    default:
      return false;
  }
}

CLTerm apply_subst(const CLTerm& t, const Substitution& theta) {
  if (theta.empty()) return t;
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return t;
    case CLTag::Meta: {
      auto it = theta.find(t.name());
      return it == theta.end() ? t : it->second;
    }
    case CLTag::Kp:
      return CLTerm::kp(apply_subst(t.first(), theta));
    case CLTag::Sp:
      return CLTerm::sp(apply_subst(t.first(), theta));
    case CLTag::Spp:
      return CLTerm::spp(apply_subst(t.first(), theta), apply_subst(t.second(), theta));
    case CLTag::App:
      return CLTerm::app(apply_subst(t.fun(), theta), apply_subst(t.arg(), theta));
  }
  return t;
}

Substitution compose(const Substitution& first, const Substitution& then) {
  Substitution out;
  for (const auto& [x, t] : first) out[x] = apply_subst(t, then);
  for (const auto& [x, t] : then) out.emplace(x, t);
  return out;
}

void collect_metavars(const CLTerm& t, std::set<std::string>& out) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return;
    case CLTag::Meta:
      out.insert(t.name());
      return;
    case CLTag::Kp:
    case CLTag::Sp:
      collect_metavars(t.first(), out);
      return;
    case CLTag::Spp:
    case CLTag::App:
      collect_metavars(t.first(), out);
      collect_metavars(t.second(), out);
      return;
  }
}

std::set<std::string> free_metavars(const CLTerm& t) {
  std::set<std::string> out;
  collect_metavars(t, out);
  return out;
}

namespace {

void metavars_ordered(const CLTerm& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
      return;
    case CLTag::Meta:
      if (seen.insert(t.name()).second) out.push_back(t.name());
      return;
    case CLTag::Kp:
    case CLTag::Sp:
      metavars_ordered(t.first(), out, seen);
      return;
    case CLTag::Spp:
    case CLTag::App:
      metavars_ordered(t.first(), out, seen);
      metavars_ordered(t.second(), out, seen);
      return;
  }
}

}  // namespace

std::vector<std::string> metavars_in_order(const CLTerm& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  metavars_ordered(t, out, seen);
  return out;
}

std::string fresh_metavar(const std::set<std::string>& avoid, std::string_view prefix) {
  for (std::size_t i = 1;; ++i) {
    std::string cand = std::string(prefix) + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

std::vector<CLTerm> canonical_rename(const std::vector<CLTerm>& terms, std::string_view prefix) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& t : terms) metavars_ordered(t, order, seen);
  Substitution ren;
  for (std::size_t i = 0; i < order.size(); ++i)
    ren[order[i]] = CLTerm::meta(std::string(prefix) + std::to_string(i + 1));
  std::vector<CLTerm> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(apply_subst(t, ren));
  return out;
}

namespace {

void format_into(const CLTerm& t, std::string& out) {
  switch (t.tag()) {
    case CLTag::K:
      out += 'K';
      return;
    case CLTag::S:
      out += 'S';
      return;
    case CLTag::Meta:
      out += '?';
      out += t.name();
      return;
    case CLTag::Kp:
      out += "K'(";
      format_into(t.first(), out);
      out += ')';
      return;
    case CLTag::Sp:
      out += "S'(";
      format_into(t.first(), out);
      out += ')';
      return;
    case CLTag::Spp:
      out += "S''(";
      format_into(t.first(), out);
      out += ',';
      format_into(t.second(), out);
      out += ')';
      return;
    case CLTag::App:
      format_into(t.fun(), out);
      out += ' ';
      if (t.arg().is(CLTag::App)) {
        out += '(';
        format_into(t.arg(), out);
        out += ')';
      } else {
        format_into(t.arg(), out);
      }
      return;
  }
}

}  // namespace

std::string format_term(const CLTerm& t) {
  std::string out;
  format_into(t, out);
  return out;
}

std::vector<CLTerm> enumerate_terms(std::size_t size_bound, const std::vector<std::string>& pool,
                                    Flavor flavor) {
  std::vector<CLTerm> out;
  for_each_term(size_bound, pool, flavor, [&](const CLTerm& t) { out.push_back(t); });
  return out;
}

void for_each_term(std::size_t size_bound, const std::vector<std::string>& pool, Flavor flavor,
                   const std::function<void(const CLTerm&)>& visit) {
  if (size_bound == 0) return;
  std::vector<std::string> names = pool;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::vector<std::vector<CLTerm>> level(size_bound + 1);
  auto build = [&](std::size_t n, const std::function<void(const CLTerm&)>& emit) {
    if (n == 1) {
      emit(CLTerm::k());
      emit(CLTerm::s());
      for (const auto& x : names) emit(CLTerm::meta(x));
      return;
    }
    if (flavor == Flavor::Star) {
      for (const auto& m : level[n - 1]) emit(CLTerm::kp(m));
      for (const auto& m : level[n - 1]) emit(CLTerm::sp(m));
      for (std::size_t a = 1; a + 1 < n; ++a)
        for (const auto& m : level[a])
          for (const auto& k : level[n - 1 - a]) emit(CLTerm::spp(m, k));
    }
    for (std::size_t a = 1; a < n; ++a)
      for (const auto& f : level[a])
        for (const auto& x : level[n - a]) emit(CLTerm::app(f, x));
  };
  for (std::size_t n = 1; n <= size_bound; ++n) {
    if (n < size_bound) {
      build(n, [&](const CLTerm& t) {
        level[n].push_back(t);
        visit(t);
      });
    } else {
      build(n, visit);
    }
  }
}

// ===========================================================================
// LambdaTerm

struct LambdaTerm::Node {
  LamTag tag;
  int index = 0;
  std::string name;
  LambdaTerm c0{std::shared_ptr<const Node>{}};
  LambdaTerm c1{std::shared_ptr<const Node>{}};
  std::size_t size = 1;
  std::size_t hash = 0;
  int open_depth = 0;  // binders needed above this node to close it
};

LambdaTerm::LambdaTerm() : LambdaTerm(abs("x", var(0, "x"))) {}

LambdaTerm LambdaTerm::var(int index, std::string name) {
  auto n = std::make_shared<Node>();
  n->tag = LamTag::Var;
  n->index = index;
  n->name = std::move(name);
  n->hash = mix(mix(0, 11), static_cast<std::size_t>(index));
  n->open_depth = index + 1;
  return LambdaTerm(std::shared_ptr<const Node>(n));
}

LambdaTerm LambdaTerm::abs(std::string name, LambdaTerm body) {
  auto n = std::make_shared<Node>();
  n->tag = LamTag::Abs;
  n->name = std::move(name);
  n->size = 1 + body.size();
  n->hash = mix(mix(0, 12), body.hash());
  n->open_depth = std::max(0, body.node_->open_depth - 1);
  n->c0 = std::move(body);
  return LambdaTerm(std::shared_ptr<const Node>(n));
}

LambdaTerm LambdaTerm::app(LambdaTerm f, LambdaTerm a) {
  auto n = std::make_shared<Node>();
  n->tag = LamTag::App;
  n->size = f.size() + a.size();
  n->hash = mix(mix(mix(0, 13), f.hash()), a.hash());
  n->open_depth = std::max(f.node_->open_depth, a.node_->open_depth);
  n->c0 = std::move(f);
  n->c1 = std::move(a);
  return LambdaTerm(std::shared_ptr<const Node>(n));
}

LamTag LambdaTerm::tag() const { return node_->tag; }
int LambdaTerm::index() const { return node_->index; }
const std::string& LambdaTerm::name() const { return node_->name; }
const LambdaTerm& LambdaTerm::body() const { return node_->c0; }
const LambdaTerm& LambdaTerm::fun() const { return node_->c0; }
const LambdaTerm& LambdaTerm::arg() const { return node_->c1; }
std::size_t LambdaTerm::size() const { return node_->size; }
std::size_t LambdaTerm::hash() const { return node_->hash; }
bool LambdaTerm::closed() const { return node_->open_depth == 0; }

namespace {

bool alpha_eq_closed(const LambdaTerm& a, const LambdaTerm& b) {
  if (a.tag() != b.tag() || a.hash() != b.hash()) return false;
  switch (a.tag()) {
    case LamTag::Var:
      return a.index() == b.index();
    case LamTag::Abs:
      return alpha_eq_closed(a.body(), b.body());
    case LamTag::App:
      return alpha_eq_closed(a.fun(), b.fun()) && alpha_eq_closed(a.arg(), b.arg());
  }
  return false;
}

bool alpha_eq_at(const LambdaTerm& a, const LambdaTerm& b, int depth) {
  if (a.tag() != b.tag()) return false;
  // Hashes see indices only, so they decide equality just for closed subterms.
  if (a.closed() && b.closed()) return a.hash() == b.hash() && a.size() == b.size() && alpha_eq_closed(a, b);
  switch (a.tag()) {
    case LamTag::Var:
      if (a.index() < depth || b.index() < depth) return a.index() == b.index();
      return a.name() == b.name();
    case LamTag::Abs:
      return alpha_eq_at(a.body(), b.body(), depth + 1);
    case LamTag::App:
      return alpha_eq_at(a.fun(), b.fun(), depth) && alpha_eq_at(a.arg(), b.arg(), depth);
  }
  return false;
}

void free_vars_at(const LambdaTerm& t, int depth, std::set<std::string>& out) {
  switch (t.tag()) {
    case LamTag::Var:
      if (t.index() >= depth) out.insert(t.name());
      return;
    case LamTag::Abs:
      free_vars_at(t.body(), depth + 1, out);
      return;
    case LamTag::App:
      free_vars_at(t.fun(), depth, out);
      free_vars_at(t.arg(), depth, out);
      return;
  }
}

}  // namespace

bool operator==(const LambdaTerm& a, const LambdaTerm& b) {
  return a.node_ == b.node_ || alpha_eq_at(a, b, 0);
}

bool alpha_eq(const LambdaTerm& a, const LambdaTerm& b) { return a == b; }

bool is_closed(const LambdaTerm& t) { return t.closed(); }

std::set<std::string> free_vars(const LambdaTerm& t) {
  std::set<std::string> out;
  free_vars_at(t, 0, out);
  return out;
}

LambdaTerm apply_all(LambdaTerm head, const std::vector<LambdaTerm>& args) {
  for (const auto& a : args) head = LambdaTerm::app(std::move(head), a);
  return head;
}

namespace {

struct LambdaPrinter {
  std::set<std::string> free;
  std::vector<std::string> scope;
  std::string out;

  std::string pick(const std::string& wanted) {
    auto taken = [&](const std::string& c) {
      return free.count(c) || std::find(scope.begin(), scope.end(), c) != scope.end();
    };
    if (!taken(wanted)) return wanted;
    for (std::size_t i = 1;; ++i) {
      std::string c = wanted + std::to_string(i);
      if (!taken(c)) return c;
    }
  }

  void term(const LambdaTerm& t) {
    if (t.is(LamTag::Abs)) {
      std::string n = pick(t.name());
      out += '\\';
      out += n;
      out += ". ";
      scope.push_back(n);
      term(t.body());
      scope.pop_back();
      return;
    }
    app(t);
  }

  void app(const LambdaTerm& t) {
    if (!t.is(LamTag::App)) {
      atom(t);
      return;
    }
    app(t.fun());
    out += ' ';
    atom(t.arg());
  }

  void atom(const LambdaTerm& t) {
    if (t.is(LamTag::Var)) {
      int depth = static_cast<int>(scope.size());
      if (t.index() < depth)
        out += scope[depth - 1 - t.index()];
      else
        out += t.name();
      return;
    }
    out += '(';
    term(t);
    out += ')';
  }
};

void debruijn_into(const LambdaTerm& t, int depth, std::string& out) {
  switch (t.tag()) {
    case LamTag::Var:
      if (t.index() < depth)
        out += std::to_string(t.index());
      else
        out += "#" + t.name();
      return;
    case LamTag::Abs:
      out += "\\.";
      debruijn_into(t.body(), depth + 1, out);
      return;
    case LamTag::App:
      out += '(';
      debruijn_into(t.fun(), depth, out);
      out += ' ';
      debruijn_into(t.arg(), depth, out);
      out += ')';
      return;
  }
}

std::string binder_name(int depth) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w"};
  if (depth < 6) return names[depth];
  return "x" + std::to_string(depth);
}

}  // namespace

std::string format_term(const LambdaTerm& t) {
  LambdaPrinter p;
  p.free = free_vars(t);
  p.term(t);
  return p.out;
}

std::string debruijn_key(const LambdaTerm& t) {
  std::string out;
  debruijn_into(t, 0, out);
  return out;
}

std::vector<LambdaTerm> enumerate_lambda(std::size_t size_bound) {
  // memo[(n, depth)] = terms of exact size n whose free indices are < depth
  std::map<std::pair<std::size_t, int>, std::vector<LambdaTerm>> memo;
  std::function<const std::vector<LambdaTerm>&(std::size_t, int)> gen =
      [&](std::size_t n, int depth) -> const std::vector<LambdaTerm>& {
    auto key = std::make_pair(n, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<LambdaTerm> out;
    if (n == 1) {
      for (int i = 0; i < depth; ++i) out.push_back(LambdaTerm::var(i, binder_name(depth - 1 - i)));
    } else {
      for (const auto& b : gen(n - 1, depth + 1)) out.push_back(LambdaTerm::abs(binder_name(depth), b));
      for (std::size_t a = 1; a < n; ++a) {
        const auto& fs = gen(a, depth);
        if (fs.empty()) continue;
        const auto& xs = gen(n - a, depth);
        for (const auto& f : fs)
          for (const auto& x : xs) out.push_back(LambdaTerm::app(f, x));
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  };
  std::vector<LambdaTerm> all;
  for (std::size_t n = 1; n <= size_bound; ++n) {
    const auto& lv = gen(n, 0);
    all.insert(all.end(), lv.begin(), lv.end());
  }
  return all;
}

// ===========================================================================
// Parsing

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool at_end() {
    skip();
    return i_ >= s_.size();
  }
  char peek() {
    skip();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool starts_with(std::string_view lit) {
    skip();
    return s_.substr(i_, lit.size()) == lit;
  }
  bool eat(std::string_view lit) {
    if (!starts_with(lit)) return false;
    i_ += lit.size();
    return true;
  }
  void expect(std::string_view lit) {
    if (!eat(lit)) throw ParseError(pos(), "'" + std::string(lit) + "'");
  }
  std::size_t pos() {
    skip();
    return i_;
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string ident() {
    skip();
    if (i_ >= s_.size() || !ident_start(s_[i_])) throw ParseError(i_, "identifier");
    std::size_t start = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    return std::string(s_.substr(start, i_ - start));
  }
  std::string metaname() {
    std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
      ++i_;
    if (start == i_) throw ParseError(i_, "metavariable name");
    return std::string(s_.substr(start, i_ - start));
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

struct LambdaParser {
  Cursor cur;
  bool require_closed;
  std::vector<std::string> scope;
  std::vector<std::string> free;

  bool lambda_start() { return cur.starts_with("\\") || cur.starts_with("λ"); }

  LambdaTerm term() {
    if (lambda_start()) return abstraction();
    return application();
  }

  LambdaTerm abstraction() {
    if (!cur.eat("\\")) cur.expect("λ");
    std::vector<std::string> names;
    names.push_back(cur.ident());
    while (Cursor::ident_start(cur.peek())) names.push_back(cur.ident());
    cur.expect(".");
    for (const auto& n : names) scope.push_back(n);
    LambdaTerm body = term();
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
      scope.pop_back();
      body = LambdaTerm::abs(*it, body);
    }
    return body;
  }

  bool atom_start() {
    char c = cur.peek();
    return c == '(' || Cursor::ident_start(c);
  }

  LambdaTerm application() {
    if (!atom_start()) throw ParseError(cur.pos(), "term");
    LambdaTerm t = atom();
    while (true) {
      if (atom_start()) {
        t = LambdaTerm::app(t, atom());
      } else if (lambda_start()) {
        t = LambdaTerm::app(t, abstraction());
        return t;
      } else {
        return t;
      }
    }
  }

  LambdaTerm atom() {
    if (cur.eat("(")) {
      LambdaTerm t = term();
      cur.expect(")");
      return t;
    }
    std::string n = cur.ident();
    int depth = static_cast<int>(scope.size());
    for (int i = depth - 1; i >= 0; --i)
      if (scope[i] == n) return LambdaTerm::var(depth - 1 - i, n);
    if (require_closed) throw OpenTermError(n);
    auto it = std::find(free.begin(), free.end(), n);
    int k = static_cast<int>(it - free.begin());
    if (it == free.end()) free.push_back(n);
    return LambdaTerm::var(depth + k, n);
  }
};

struct CLParser {
  Cursor cur;

  CLTerm term() {
    if (!atom_start()) throw ParseError(cur.pos(), "CL term");
    CLTerm t = atom();
    while (atom_start()) t = CLTerm::app(t, atom());
    return t;
  }

  bool atom_start() {
    char c = cur.peek();
    return c == 'K' || c == 'S' || c == '?' || c == '(';
  }

  CLTerm atom() {
    if (cur.eat("(")) {
      CLTerm t = term();
      cur.expect(")");
      return t;
    }
    if (cur.eat("?")) return CLTerm::meta(cur.metaname());
    if (cur.eat("K'")) {
      cur.expect("(");
      CLTerm m = term();
      cur.expect(")");
      return CLTerm::kp(m);
    }
    if (cur.eat("K")) return CLTerm::k();
    if (cur.eat("S''")) {
      cur.expect("(");
      CLTerm m = term();
      cur.expect(",");
      CLTerm n = term();
      cur.expect(")");
      return CLTerm::spp(m, n);
    }
    if (cur.eat("S'")) {
      cur.expect("(");
      CLTerm m = term();
      cur.expect(")");
      return CLTerm::sp(m);
    }
    if (cur.eat("S")) return CLTerm::s();
    throw ParseError(cur.pos(), "CL atom");
  }
};

}  // namespace

LambdaTerm parse_lambda(std::string_view text, bool require_closed) {
  LambdaParser p{Cursor(text), require_closed, {}, {}};
  LambdaTerm t = p.term();
  if (!p.cur.at_end()) throw ParseError(p.cur.pos(), "end of input");
  return t;
}

CLTerm parse_cl(std::string_view text) {
  CLParser p{Cursor(text)};
  CLTerm t = p.term();
  if (!p.cur.at_end()) throw ParseError(p.cur.pos(), "end of input");
  return t;
}

// ===========================================================================
// Classification

std::string to_string(const SpineClass& c) {
  switch (c.kind) {
    case SpineClass::Kind::BareVar:
      return "BareVar(" + c.var + ")";
    case SpineClass::Kind::HeadStuck:
      return "HeadStuck(" + c.var + "," + std::to_string(c.arg_count) + ")";
    case SpineClass::Kind::Value:
      return "Value";
    case SpineClass::Kind::Reducible:
      return "Reducible";
    case SpineClass::Kind::Critical:
      return "Critical(" + c.var + ")";
  }
  return "?";
}

SpineClass classify_lazy(const CLTerm& t) {
  Spine sp = unwind(t);
  if (sp.head.is(CLTag::Meta)) {
    if (sp.args.empty()) return SpineClass::bare(sp.head.name());
    return SpineClass::stuck(sp.head.name(), sp.args.size());
  }
  return sp.args.empty() ? SpineClass::value() : SpineClass::reducible();
}

namespace {

// Value / reducible / critical status under by-value evaluation, following the
// critical-variable recursion; K'/S'/S'' arguments are inspected left to right.
struct CbvStatus {
  enum class Kind { Value, Reducible, Critical, None } kind;
  std::string var;
};

CbvStatus cbv_status(const CLTerm& t) {
  using K = CbvStatus::Kind;
  switch (t.tag()) {
    case CLTag::K:
    case CLTag::S:
    case CLTag::Meta:
      return {K::Value, {}};
    case CLTag::Kp:
    case CLTag::Sp:
      return cbv_status(t.first());
    case CLTag::Spp: {
      CbvStatus a = cbv_status(t.first());
      if (a.kind != K::Value) return a;
      return cbv_status(t.second());
    }
    case CLTag::App: {
      CbvStatus f = cbv_status(t.fun());
      if (f.kind != K::Value) return f;
      CbvStatus a = cbv_status(t.arg());
      if (a.kind != K::Value) return a;
      if (t.fun().is(CLTag::Meta)) return {K::Critical, t.fun().name()};
      return {K::Reducible, {}};
    }
  }
  return {K::None, {}};
}

}  // namespace

SpineClass classify_cbv(const CLTerm& t) {
  if (t.is(CLTag::Meta)) return SpineClass::bare(t.name());
  CbvStatus st = cbv_status(t);
  switch (st.kind) {
    case CbvStatus::Kind::Value:
      return SpineClass::value();
    case CbvStatus::Kind::Reducible:
      return SpineClass::reducible();
    case CbvStatus::Kind::Critical:
      return SpineClass::critical(st.var);
    case CbvStatus::Kind::None:
      break;
  }
  throw NoClassError(format_term(t));
}

}  // namespace ipobisim
