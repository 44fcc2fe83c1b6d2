#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "horsmc/errors.hpp"

namespace horsmc {

// ---------------------------------------------------------------------------
// Simple sorts
// ---------------------------------------------------------------------------

class Sort;
using SortPtr = std::shared_ptr<const Sort>;

/// Either the ground sort `o` or an arrow `arg -> result`.
class Sort {
 public:
  static SortPtr ground();
  static SortPtr arrow(SortPtr arg, SortPtr result);
  /// o -> ... -> o -> o with `arity` arrows.
  static SortPtr first_order(int arity);

  bool is_ground() const { return arg_ == nullptr; }
  const SortPtr& arg() const { return arg_; }
  const SortPtr& result() const { return result_; }

  int order() const;
  int arity() const;
  std::string str() const;

 private:
  SortPtr arg_;
  SortPtr result_;
};

bool operator==(const Sort& a, const Sort& b);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

enum class TermKind { Variable, Nonterminal, Terminal, Application };

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable applicative term. Leaves carry their name and, once resolved
/// against a scheme, an index (parameter position, rule index or terminal
/// index). Raw parser output has index -1.
class Term {
 public:
  static TermPtr variable(std::string name, int index = -1);
  static TermPtr nonterminal(std::string name, int index = -1);
  static TermPtr terminal(std::string name, int index = -1);
  static TermPtr apply(TermPtr fun, TermPtr arg);
  static TermPtr apply(TermPtr head, const std::vector<TermPtr>& args);

  TermKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int index() const { return index_; }
  const TermPtr& fun() const { return fun_; }
  const TermPtr& arg() const { return arg_; }

  /// Head symbol of the application spine.
  const Term& head() const;
  /// Arguments of the application spine, left to right.
  std::vector<TermPtr> spine_args() const;
  std::size_t size() const;

  std::string str() const;

 private:
  TermKind kind_ = TermKind::Variable;
  std::string name_;
  int index_ = -1;
  TermPtr fun_;
  TermPtr arg_;
};

bool structurally_equal(const Term& a, const Term& b);

/// Splits an application spine into its head and arguments.
std::pair<TermPtr, std::vector<TermPtr>> decompose(const TermPtr& term);

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

struct Rule {
  std::string head;
  std::vector<std::string> params;
  TermPtr body;
  SourcePos pos;
};

struct TerminalSymbol {
  std::string name;
  int arity = 0;
};

struct SortAssignment {
  std::vector<SortPtr> nonterminals;             // by rule index
  std::vector<std::vector<SortPtr>> parameters;  // by rule index, parameter index
  std::vector<SortPtr> terminals;                // by terminal index
  int order = 0;
};

/// A higher-order recursion scheme: one rule per nonterminal, a start symbol
/// (the head of the first rule) and a ranked terminal alphabet.
class Scheme {
 public:
  /// Resolves names, infers sorts and checks well-formedness. Terminal arities
  /// listed in `declared_arities` are fixed; the others are inferred.
  static Scheme build(std::vector<Rule> rules,
                      const std::map<std::string, int>& declared_arities = {});

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(int nt) const { return rules_[static_cast<std::size_t>(nt)]; }
  int num_nonterminals() const { return static_cast<int>(rules_.size()); }
  int start() const { return 0; }
  std::optional<int> find_nonterminal(const std::string& name) const;

  const std::vector<TerminalSymbol>& terminals() const { return terminals_; }
  std::optional<int> find_terminal(const std::string& name) const;
  std::map<std::string, int> alphabet() const;

  const SortAssignment& sorts() const { return sorts_; }
  int order() const { return sorts_.order; }

 private:
  std::vector<Rule> rules_;
  std::vector<TerminalSymbol> terminals_;
  SortAssignment sorts_;
};

/// Principal simple-sort assignment for the scheme's rules. Unconstrained sort
/// variables default to `o`.
SortAssignment sort_check(const std::vector<Rule>& resolved_rules,
                          std::vector<TerminalSymbol>& terminals,
                          const std::map<std::string, int>& declared_arities);

/// Sort of a closed term built from scheme symbols, or throws SortError.
SortPtr sort_of(const Scheme& scheme, const TermPtr& term);

/// Instantiates a rule body with closed argument terms.
TermPtr instantiate(const TermPtr& body, const std::vector<TermPtr>& args);

/// One outermost-leftmost nonterminal rewrite; nullopt when every frontier
/// position is headed by a terminal.
std::optional<TermPtr> reduce_step(const Scheme& scheme, const TermPtr& term);

// ---------------------------------------------------------------------------
// Finite prefixes of the value tree
// ---------------------------------------------------------------------------

/// A finite ranked tree. A node without a label is the unexpanded marker.
struct TreePrefix {
  std::optional<std::string> label;
  std::vector<TreePrefix> children;

  static TreePrefix bottom() { return {}; }
  bool is_bottom() const { return !label.has_value(); }
  int depth() const;
  std::size_t size() const;
  /// Indented rendering, one node per line, `⊥` for unexpanded nodes.
  std::string render() const;
  bool operator==(const TreePrefix&) const = default;
};

inline constexpr int kUnfoldStepBudget = 10000;

/// Value-tree prefix in which every node above `depth` is expanded.
TreePrefix unfold(const Scheme& scheme, int depth, int step_budget = kUnfoldStepBudget);

/// True when `smaller` coincides with `larger` everywhere except at ⊥ leaves.
bool is_prefix_of(const TreePrefix& smaller, const TreePrefix& larger);

}  // namespace horsmc
