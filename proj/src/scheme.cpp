#include "horsmc/scheme.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace horsmc {

// ---------------------------------------------------------------------------
// Sort

SortPtr Sort::ground() {
  static const SortPtr o = std::make_shared<const Sort>();
  return o;
}

SortPtr Sort::arrow(SortPtr arg, SortPtr result) {
  auto s = std::make_shared<Sort>();
  s->arg_ = std::move(arg);
  s->result_ = std::move(result);
  return s;
}

SortPtr Sort::first_order(int arity) {
  SortPtr s = ground();
  for (int i = 0; i < arity; ++i) s = arrow(ground(), s);
  return s;
}

int Sort::order() const {
  if (is_ground()) return 0;
  return std::max(arg_->order() + 1, result_->order());
}

int Sort::arity() const { return is_ground() ? 0 : 1 + result_->arity(); }

std::string Sort::str() const {
  if (is_ground()) return "o";
  std::string lhs = arg_->str();
  if (!arg_->is_ground()) lhs = "(" + lhs + ")";
  return lhs + " -> " + result_->str();
}

bool operator==(const Sort& a, const Sort& b) {
  if (a.is_ground() || b.is_ground()) return a.is_ground() == b.is_ground();
  return *a.arg() == *b.arg() && *a.result() == *b.result();
}

// ---------------------------------------------------------------------------
// Term

TermPtr Term::variable(std::string name, int index) {
  auto t = std::make_shared<Term>();
  t->kind_ = TermKind::Variable;
  t->name_ = std::move(name);
  t->index_ = index;
  return t;
}

TermPtr Term::nonterminal(std::string name, int index) {
  auto t = std::make_shared<Term>();
  t->kind_ = TermKind::Nonterminal;
  t->name_ = std::move(name);
  t->index_ = index;
  return t;
}

TermPtr Term::terminal(std::string name, int index) {
  auto t = std::make_shared<Term>();
  t->kind_ = TermKind::Terminal;
  t->name_ = std::move(name);
  t->index_ = index;
  return t;
}

TermPtr Term::apply(TermPtr fun, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind_ = TermKind::Application;
  t->fun_ = std::move(fun);
  t->arg_ = std::move(arg);
  return t;
}

TermPtr Term::apply(TermPtr head, const std::vector<TermPtr>& args) {
  for (const auto& a : args) head = apply(std::move(head), a);
  return head;
}

const Term& Term::head() const {
  const Term* t = this;
  while (t->kind_ == TermKind::Application) t = t->fun_.get();
  return *t;
}

std::vector<TermPtr> Term::spine_args() const {
  std::vector<TermPtr> args;
  const Term* t = this;
  while (t->kind_ == TermKind::Application) {
    args.push_back(t->arg_);
    t = t->fun_.get();
  }
  return {args.rbegin(), args.rend()};
}

std::size_t Term::size() const {
  if (kind_ != TermKind::Application) return 1;
  return 1 + fun_->size() + arg_->size();
}

std::string Term::str() const {
  if (kind_ != TermKind::Application) return name_;
  std::string out = head().name();
  for (const auto& a : spine_args()) {
    if (a->kind() == TermKind::Application)
      out += " (" + a->str() + ")";
    else
      out += " " + a->str();
  }
  return out;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() != TermKind::Application) return a.name() == b.name();
  return structurally_equal(*a.fun(), *b.fun()) && structurally_equal(*a.arg(), *b.arg());
}

// ---------------------------------------------------------------------------
// Scheme construction

namespace {

bool is_upper_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

struct Resolver {
  const std::map<std::string, int>& nt_index;
  std::vector<TerminalSymbol>& terminals;
  std::map<std::string, int> terminal_index;
  const Rule* rule = nullptr;

  TermPtr resolve(const TermPtr& t) {
    switch (t->kind()) {
      case TermKind::Application:
        return Term::apply(resolve(t->fun()), resolve(t->arg()));
      default:
        break;
    }
    const std::string& name = t->name();
    for (std::size_t i = 0; i < rule->params.size(); ++i)
      if (rule->params[i] == name) return Term::variable(name, static_cast<int>(i));
    if (is_upper_name(name)) {
      auto it = nt_index.find(name);
      if (it == nt_index.end())
        throw ParseError(rule->pos, "undefined nonterminal '" + name + "' in rule for " +
                                        rule->head);
      return Term::nonterminal(name, it->second);
    }
    auto it = terminal_index.find(name);
    if (it == terminal_index.end()) {
      it = terminal_index.emplace(name, static_cast<int>(terminals.size())).first;
      terminals.push_back({name, -1});
    }
    return Term::terminal(name, it->second);
  }
};

}  // namespace

Scheme Scheme::build(std::vector<Rule> rules, const std::map<std::string, int>& declared_arities) {
  if (rules.empty()) throw ParseError({}, "scheme has no rules");
  Scheme scheme;
  std::map<std::string, int> nt_index;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    if (!is_upper_name(r.head))
      throw ParseError(r.pos, "nonterminal '" + r.head + "' must start with an uppercase letter");
    if (!nt_index.emplace(r.head, static_cast<int>(i)).second)
      throw ParseError(r.pos, "second rule for nonterminal '" + r.head + "'");
    std::set<std::string> seen;
    for (const auto& p : r.params) {
      if (is_upper_name(p))
        throw ParseError(r.pos, "parameter '" + p + "' must start with a lowercase letter");
      if (!seen.insert(p).second)
        throw ParseError(r.pos, "duplicate parameter '" + p + "' in rule for " + r.head);
    }
  }
  if (!rules.front().params.empty())
    throw SortError(rules.front().head, "start symbol must have no parameters");

  Resolver resolver{nt_index, scheme.terminals_, {}, nullptr};
  for (const auto& [name, arity] : declared_arities) {
    if (is_upper_name(name)) throw ArityError("terminal '" + name + "' must be lowercase");
    resolver.terminal_index.emplace(name, static_cast<int>(scheme.terminals_.size()));
    scheme.terminals_.push_back({name, arity});
  }
  for (auto& r : rules) {
    resolver.rule = &r;
    r.body = resolver.resolve(r.body);
  }
  scheme.sorts_ = sort_check(rules, scheme.terminals_, declared_arities);
  scheme.rules_ = std::move(rules);
  return scheme;
}

std::optional<int> Scheme::find_nonterminal(const std::string& name) const {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].head == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> Scheme::find_terminal(const std::string& name) const {
  for (std::size_t i = 0; i < terminals_.size(); ++i)
    if (terminals_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::map<std::string, int> Scheme::alphabet() const {
  std::map<std::string, int> out;
  for (const auto& t : terminals_) out[t.name] = t.arity;
  return out;
}

// ---------------------------------------------------------------------------
// Sort inference by unification

namespace {

class Unifier {
 public:
  int fresh() { return push({Kind::Var, -1, -1}); }
  int ground() { return push({Kind::Ground, -1, -1}); }
  int arrow(int a, int r) { return push({Kind::Arrow, a, r}); }
  int first_order(int arity) {
    int s = ground();
    for (int i = 0; i < arity; ++i) s = arrow(ground(), s);
    return s;
  }

  // Returns an empty string on success, else a description of the conflict.
  std::string unify(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return {};
    Node na = nodes_[a], nb = nodes_[b];
    if (na.kind == Kind::Var) return bind(a, b);
    if (nb.kind == Kind::Var) return bind(b, a);
    if (na.kind != nb.kind) return "cannot unify " + show(a) + " with " + show(b);
    if (na.kind == Kind::Ground) return {};
    parent_[a] = b;
    if (auto e = unify(na.a, nb.a); !e.empty()) return e;
    return unify(na.b, nb.b);
  }

  SortPtr resolve(int s) {
    s = find(s);
    const Node& n = nodes_[s];
    if (n.kind != Kind::Arrow) return Sort::ground();
    return Sort::arrow(resolve(n.a), resolve(n.b));
  }

 private:
  enum class Kind { Var, Ground, Arrow };
  struct Node {
    Kind kind;
    int a, b;
  };

  int push(Node n) {
    nodes_.push_back(n);
    parent_.push_back(static_cast<int>(parent_.size()));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool occurs(int var, int s) {
    s = find(s);
    if (s == var) return true;
    const Node& n = nodes_[s];
    return n.kind == Kind::Arrow && (occurs(var, n.a) || occurs(var, n.b));
  }
  std::string bind(int var, int s) {
    if (occurs(var, s)) return "infinite sort (occurs check) for " + show(s);
    parent_[var] = s;
    return {};
  }
  std::string show(int s) {
    s = find(s);
    const Node& n = nodes_[s];
    if (n.kind == Kind::Var) return "'s" + std::to_string(s);
    if (n.kind == Kind::Ground) return "o";
    return "(" + show(n.a) + " -> " + show(n.b) + ")";
  }

  std::vector<Node> nodes_;
  std::vector<int> parent_;
};

void check_declared_arities(const TermPtr& t, const std::vector<TerminalSymbol>& terminals) {
  if (t->kind() != TermKind::Application) return;
  const Term& h = t->head();
  auto args = t->spine_args();
  if (h.kind() == TermKind::Terminal) {
    int arity = terminals[static_cast<std::size_t>(h.index())].arity;
    if (arity >= 0 && static_cast<int>(args.size()) > arity)
      throw ArityError("terminal '" + h.name() + "' of arity " + std::to_string(arity) +
                       " applied to " + std::to_string(args.size()) + " arguments");
  }
  for (const auto& a : args) check_declared_arities(a, terminals);
}

}  // namespace

SortAssignment sort_check(const std::vector<Rule>& rules, std::vector<TerminalSymbol>& terminals,
                          const std::map<std::string, int>& declared_arities) {
  Unifier u;
  std::vector<int> nt_sort, term_sort;
  std::vector<std::vector<int>> param_sort;
  for (const auto& r : rules) {
    nt_sort.push_back(u.fresh());
    param_sort.emplace_back();
    for (std::size_t i = 0; i < r.params.size(); ++i) param_sort.back().push_back(u.fresh());
  }
  for (auto& t : terminals) {
    auto it = declared_arities.find(t.name);
    if (it != declared_arities.end()) t.arity = it->second;
    term_sort.push_back(t.arity >= 0 ? u.first_order(t.arity) : u.fresh());
  }

  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    const Rule& r = rules[ri];
    check_declared_arities(r.body, terminals);
    std::function<int(const TermPtr&)> infer = [&](const TermPtr& t) -> int {
      switch (t->kind()) {
        case TermKind::Variable:
          return param_sort[ri][static_cast<std::size_t>(t->index())];
        case TermKind::Nonterminal:
          return nt_sort[static_cast<std::size_t>(t->index())];
        case TermKind::Terminal:
          return term_sort[static_cast<std::size_t>(t->index())];
        case TermKind::Application: {
          int f = infer(t->fun());
          int a = infer(t->arg());
          int res = u.fresh();
          if (auto e = u.unify(f, u.arrow(a, res)); !e.empty()) {
            // A clash involving a terminal means it is used at two arities.
            for (const Term* h : {&t->arg()->head(), &t->head()})
              if (h->kind() == TermKind::Terminal)
                throw ArityError("terminal '" + h->name() + "' is used at inconsistent arities in '" + t->str() +
                                 "' (rule for " + r.head + "): " + e);
            throw SortError(r.head, "in '" + t->str() + "': " + e);
          }
          return res;
        }
      }
      return u.ground();
    };
    int body = infer(r.body);
    if (auto e = u.unify(body, u.ground()); !e.empty())
      throw SortError(r.head, "rule body is not of ground sort: " + e);
    int lhs = u.ground();
    for (auto it = param_sort[ri].rbegin(); it != param_sort[ri].rend(); ++it)
      lhs = u.arrow(*it, lhs);
    if (auto e = u.unify(nt_sort[ri], lhs); !e.empty()) throw SortError(r.head, e);
  }

  SortAssignment out;
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    out.nonterminals.push_back(u.resolve(nt_sort[ri]));
    out.order = std::max(out.order, out.nonterminals.back()->order());
    out.parameters.emplace_back();
    for (int p : param_sort[ri]) out.parameters.back().push_back(u.resolve(p));
  }
  for (std::size_t ti = 0; ti < terminals.size(); ++ti) {
    SortPtr s = u.resolve(term_sort[ti]);
    if (s->order() > 1)
      throw ArityError("terminal '" + terminals[ti].name + "' used at higher-order sort " +
                       s->str());
    if (terminals[ti].arity >= 0 && terminals[ti].arity != s->arity())
      throw ArityError("terminal '" + terminals[ti].name + "' declared with arity " +
                       std::to_string(terminals[ti].arity) + " but used at sort " + s->str());
    terminals[ti].arity = s->arity();
    out.terminals.push_back(std::move(s));
  }
  return out;
}

SortPtr sort_of(const Scheme& scheme, const TermPtr& term) {
  switch (term->kind()) {
    case TermKind::Nonterminal:
      return scheme.sorts().nonterminals[static_cast<std::size_t>(term->index())];
    case TermKind::Terminal:
      return scheme.sorts().terminals[static_cast<std::size_t>(term->index())];
    case TermKind::Variable:
      throw SortError(term->name(), "free variable in closed term");
    case TermKind::Application: {
      SortPtr f = sort_of(scheme, term->fun());
      SortPtr a = sort_of(scheme, term->arg());
      if (f->is_ground() || !(*f->arg() == *a))
        throw SortError(term->head().name(), "ill-sorted application in '" + term->str() + "'");
      return f->result();
    }
  }
  return Sort::ground();
}

// ---------------------------------------------------------------------------
// Reduction

TermPtr instantiate(const TermPtr& body, const std::vector<TermPtr>& args) {
  switch (body->kind()) {
    case TermKind::Variable:
      return args[static_cast<std::size_t>(body->index())];
    case TermKind::Application: {
      TermPtr f = instantiate(body->fun(), args);
      TermPtr a = instantiate(body->arg(), args);
      if (f == body->fun() && a == body->arg()) return body;
      return Term::apply(std::move(f), std::move(a));
    }
    default:
      return body;
  }
}

std::pair<TermPtr, std::vector<TermPtr>> decompose(const TermPtr& term) {
  std::vector<TermPtr> args;
  TermPtr t = term;
  while (t->kind() == TermKind::Application) {
    args.push_back(t->arg());
    t = t->fun();
  }
  return {t, {args.rbegin(), args.rend()}};
}

namespace {

std::optional<TermPtr> rewrite_outermost(const Scheme& scheme, const TermPtr& term) {
  auto [head, args] = decompose(term);
  if (head->kind() == TermKind::Nonterminal) {
    const Rule& r = scheme.rule(head->index());
    if (args.size() != r.params.size()) return std::nullopt;
    return instantiate(r.body, args);
  }
  if (head->kind() != TermKind::Terminal) return std::nullopt;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (auto reduced = rewrite_outermost(scheme, args[i])) {
      args[i] = *reduced;
      return Term::apply(head, args);
    }
  }
  return std::nullopt;
}

// Reduces the head of a ground term until it is a terminal; nullopt when the
// budget runs out first.
std::optional<TermPtr> head_normalize(const Scheme& scheme, TermPtr term, int budget) {
  for (int steps = 0;; ++steps) {
    auto [head, args] = decompose(term);
    if (head->kind() == TermKind::Terminal) return term;
    if (head->kind() != TermKind::Nonterminal || steps >= budget) return std::nullopt;
    const Rule& r = scheme.rule(head->index());
    if (args.size() != r.params.size()) return std::nullopt;
    term = instantiate(r.body, args);
  }
}

TreePrefix unfold_term(const Scheme& scheme, const TermPtr& term, int level, int depth,
                       int budget) {
  if (level >= depth) return TreePrefix::bottom();
  auto hnf = head_normalize(scheme, term, budget);
  if (!hnf) return TreePrefix::bottom();
  auto [head, args] = decompose(*hnf);
  TreePrefix node;
  node.label = head->name();
  for (const auto& a : args) node.children.push_back(unfold_term(scheme, a, level + 1, depth, budget));
  return node;
}

}  // namespace

std::optional<TermPtr> reduce_step(const Scheme& scheme, const TermPtr& term) {
  return rewrite_outermost(scheme, term);
}

TreePrefix unfold(const Scheme& scheme, int depth, int step_budget) {
  const Rule& start = scheme.rule(scheme.start());
  return unfold_term(scheme, Term::nonterminal(start.head, scheme.start()), 0, depth, step_budget);
}

bool is_prefix_of(const TreePrefix& smaller, const TreePrefix& larger) {
  if (smaller.is_bottom()) return true;
  if (smaller.label != larger.label || smaller.children.size() != larger.children.size())
    return false;
  for (std::size_t i = 0; i < smaller.children.size(); ++i)
    if (!is_prefix_of(smaller.children[i], larger.children[i])) return false;
  return true;
}

int TreePrefix::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::size_t TreePrefix::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

namespace {
void render_into(const TreePrefix& t, int indent, std::ostringstream& out) {
  out << std::string(static_cast<std::size_t>(indent) * 2, ' ')
      << (t.label ? *t.label : std::string("\u22a5")) << '\n';
  for (const auto& c : t.children) render_into(c, indent + 1, out);
}
}  // namespace

std::string TreePrefix::render() const {
  std::ostringstream out;
  render_into(*this, 0, out);
  return out.str();
}

}  // namespace horsmc
