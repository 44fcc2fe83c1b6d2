#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horsmc/automaton.hpp"
#include "horsmc/scheme.hpp"

namespace horsmc {

// ---------------------------------------------------------------------------
// Intersection types
// ---------------------------------------------------------------------------

/// A member of an argument intersection: a type with its priority tag.
struct TypeMember {
  int type = 0;
  int tag = 0;
  auto operator<=>(const TypeMember&) const = default;
};

using Intersection = std::vector<TypeMember>;  // sorted, duplicate-free

/// Curried form `A1 -> ... -> An -> q`; atomic types have no arguments.
struct ITypeNode {
  std::vector<Intersection> args;
  int result = 0;
  auto operator<=>(const ITypeNode&) const = default;
};

/// Interns intersection types so that equal types share an id.
class TypeTable {
 public:
  int atomic(int state);
  int arrow(std::vector<Intersection> args, int result);
  int intern(ITypeNode node);

  const ITypeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int arity(int id) const { return static_cast<int>(node(id).args.size()); }
  int result(int id) const { return node(id).result; }
  /// Type left after supplying the first `k` arguments.
  int drop(int id, int k);
  int size() const { return static_cast<int>(nodes_.size()); }

  /// `(q0 /\ q1@1) -> q0`; a tag of zero is not printed, an empty
  /// intersection prints as `top`.
  std::string str(int id, const Awt& awt) const;
  /// Whether the type refines the given simple sort.
  bool refines(int id, const Sort& sort) const;

 private:
  std::vector<ITypeNode> nodes_;
  std::map<ITypeNode, int> index_;
};

/// Sorted duplicate-free intersection.
Intersection make_intersection(std::vector<TypeMember> members);

struct Binding {
  int nonterminal = 0;
  int type = 0;
  auto operator<=>(const Binding&) const = default;
};

/// An assumed binding and the priority tag it is assumed under.
struct Assumption {
  Binding binding;
  int tag = 0;
  auto operator<=>(const Assumption&) const = default;
};

/// The nonterminal assumptions of one body typing, sorted.
using Derivation = std::vector<Assumption>;

/// Bindings in canonical (nonterminal name, type text) order.
struct Environment {
  std::vector<Binding> bindings;
  bool contains(const Binding& b) const;
};

/// Sorts and deduplicates in canonical order.
Environment make_environment(std::vector<Binding> bindings, const Scheme& scheme, const TypeTable& types,
                             const Awt& awt);

std::string binding_str(const Binding& b, const Scheme& scheme, const TypeTable& types, const Awt& awt);
/// One binding per line: `F : (q0 /\ q1@1) -> q0.`
std::string dump_environment(const Environment& env, const Scheme& scheme, const TypeTable& types,
                             const Awt& awt);

// ---------------------------------------------------------------------------
// Stage 1: expansion
// ---------------------------------------------------------------------------

struct RTerm;
using RTermPtr = std::shared_ptr<const RTerm>;

/// Runtime term: scheme symbols plus wrappers that remember which event
/// passed a subterm as which argument.
struct RTerm {
  enum class Kind { Nonterminal, Terminal, Wrap, App };
  Kind kind = Kind::Terminal;
  int symbol = 0;  // nonterminal or terminal index
  int event = -1;  // Wrap
  int arg = 0;     // Wrap, 0-based
  RTermPtr fun, operand;  // App: fun operand; Wrap: fun is the wrapped term
};

struct ConfigNode {
  enum class Kind { Pending, Reduce, Terminal };
  Kind kind = Kind::Pending;
  RTermPtr term;
  int state = 0;
  int parent = -1;
  int depth = 0;
  bool by_terminal = false;  // created by a terminal step
  /// Depth of the deepest odd-parity node created by a terminal step on the
  /// path from the root to here; -1 when there is none.
  int last_odd = -1;
  int label = -1;  // terminal symbol for Terminal nodes
  std::vector<int> children;
  /// Terminal nodes: each clause lists the indices into `children` it needs.
  std::vector<std::vector<int>> clauses;
};

/// A redex of a nonterminal, or an argument wrapper reaching head position.
struct Event {
  enum class Kind { Redex, Use };
  Kind kind = Kind::Redex;
  int nonterminal = -1;  // Redex only
  int node = 0;          // configuration where it happened
  int num_args = 0;
  /// Per argument: the use events of that argument and their tags.
  std::vector<std::vector<std::pair<int, int>>> uses;
};

struct TraceStep {
  std::string label;
  std::string state;
  auto operator<=>(const TraceStep&) const = default;
};

/// Labels and states from the root to a node whose transition is False.
struct ViolatingTrace {
  std::vector<TraceStep> steps;
  std::string str() const;  // `a@q0 b@q1`
};

struct ConfigGraph {
  std::vector<ConfigNode> nodes;
  std::vector<Event> events;
  int num_pending = 0;
};

struct ExpandResult {
  ConfigGraph graph;
  std::optional<ViolatingTrace> early_no;
  int expansions = 0;
};

/// Breadth-first expansion of at most `budget` configurations from
/// (start, initial state). Or-choices fork; a finite refutation of every
/// choice at the root gives `early_no`.
ExpandResult expand(const Scheme& scheme, const Awt& awt, int budget);

/// Three-valued value of a configuration: Accept when some choice of
/// clauses closes every branch below, Reject when none can.
RunVerdict evaluate_node(const ConfigGraph& graph, int node);

// ---------------------------------------------------------------------------
// Stage 2: candidate extraction
// ---------------------------------------------------------------------------

/// Candidates come from a few runs of the automaton over the explored tree.
/// A run resolves each Or-choice by trying the clauses from a rotation: the
/// first clause known to accept, else the first not known to reject. Runs
/// fix one rotation per (state, symbol) pair with a choice, all
/// combinations, unless those exceed this bound; then one shared rotation.
inline constexpr int kMaxRuns = 64;

Environment extract_candidates(const Scheme& scheme, const Awt& awt, const ExpandResult& result,
                               TypeTable& types);

// ---------------------------------------------------------------------------
// Stage 3: type checking
// ---------------------------------------------------------------------------

inline constexpr int kMaxDerivations = 256;

struct CheckResult {
  Environment consistent;
  std::map<Binding, std::vector<Derivation>> derivations;
  std::vector<std::string> diagnostics;
};

/// All minimal derivations of `b` whose assumptions come from `env`.
/// `capped` is set when enumeration was truncated.
std::vector<Derivation> derive(const Scheme& scheme, const Awt& awt, TypeTable& types, const Binding& b,
                               const Environment& env, bool* capped = nullptr);

/// Greatest sub-environment in which every binding has a derivation.
CheckResult type_check(const Scheme& scheme, const Awt& awt, TypeTable& types, const Environment& env);

}  // namespace horsmc
