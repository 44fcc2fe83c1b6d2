#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "horsmc/scheme.hpp"

namespace horsmc {

/// Obligation to send state `state` into child `direction` (1-based).
struct Atom {
  int direction = 1;
  int state = 0;
  auto operator<=>(const Atom&) const = default;
};

using Clause = std::vector<Atom>;  // sorted, duplicate-free conjunction

/// Positive boolean formula over atoms. Values produced by the factory
/// functions are kept in normal form: And/Or children flattened, sorted and
/// deduplicated, with True/False absorbed.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or };

  static Formula top();
  static Formula bottom();
  static Formula atom(int direction, int state);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);

  Kind kind() const { return kind_; }
  const Atom& atom_value() const { return atom_; }
  const std::vector<Formula>& children() const { return children_; }

  /// Swaps And/Or and True/False; atoms unchanged.
  Formula dual() const;
  /// Minimal disjunctive normal form: the satisfying atom sets, none a
  /// superset of another. True gives one empty clause, False none.
  std::vector<Clause> dnf() const;
  void collect_atoms(std::vector<Atom>& out) const;

  template <typename Value, typename AtomFn, typename AndFn, typename OrFn>
  Value fold(Value top_v, Value bottom_v, AtomFn&& on_atom, AndFn&& on_and, OrFn&& on_or) const {
    switch (kind_) {
      case Kind::True:
        return top_v;
      case Kind::False:
        return bottom_v;
      case Kind::Atom:
        return on_atom(atom_);
      case Kind::And:
      case Kind::Or: {
        std::vector<Value> vals;
        vals.reserve(children_.size());
        for (const auto& c : children_) vals.push_back(c.fold(top_v, bottom_v, on_atom, on_and, on_or));
        return kind_ == Kind::And ? on_and(vals) : on_or(vals);
      }
    }
    return bottom_v;
  }

  std::string str(const std::function<std::string(int)>& state_name) const;

  std::strong_ordering operator<=>(const Formula& other) const;
  bool operator==(const Formula& other) const { return (*this <=> other) == 0; }

 private:
  Kind kind_ = Kind::False;
  Atom atom_{};
  std::vector<Formula> children_;
};

/// Alternating weak tree automaton over a ranked alphabet. Priorities are kept
/// as given; only their parity matters (even = accepting).
class Awt {
 public:
  using TransitionTable = std::vector<std::vector<std::optional<Formula>>>;  // [state][symbol]

  Awt() = default;
  Awt(std::vector<std::string> states, std::vector<TerminalSymbol> alphabet, int initial,
      std::vector<int> priorities, TransitionTable delta);

  int num_states() const { return static_cast<int>(states_.size()); }
  int initial() const { return initial_; }
  const std::string& state_name(int q) const { return states_[static_cast<std::size_t>(q)]; }
  std::optional<int> find_state(const std::string& name) const;

  const std::vector<TerminalSymbol>& alphabet() const { return alphabet_; }
  std::map<std::string, int> alphabet_map() const;
  std::optional<int> find_symbol(const std::string& name) const;
  int arity(int symbol) const { return alphabet_[static_cast<std::size_t>(symbol)].arity; }

  int priority(int q) const { return priorities_[static_cast<std::size_t>(q)]; }
  /// Priority normalized to {0, 1}.
  int parity(int q) const { return priority(q) % 2; }
  bool accepting(int q) const { return parity(q) == 0; }

  bool has_transition(int q, int symbol) const;
  /// Throws MissingTransition when the pair has no entry.
  const Formula& delta(int q, int symbol) const;
  const TransitionTable& table() const { return delta_; }
  const std::vector<int>& priorities() const { return priorities_; }
  const std::vector<std::string>& states() const { return states_; }

  /// Cached minimal DNF of delta(q, symbol).
  const std::vector<Clause>& choices(int q, int symbol) const;

 private:
  std::vector<std::string> states_;
  std::vector<TerminalSymbol> alphabet_;
  int initial_ = 0;
  std::vector<int> priorities_;
  TransitionTable delta_;
  std::vector<std::vector<std::optional<std::vector<Clause>>>> dnf_cache_;
};

struct SccClass {
  std::vector<int> states;
  int priority = 0;  // parity shared by all members
  bool cyclic = false;
};

struct ValidationReport {
  std::vector<SccClass> sccs;  // reverse topological order
};

/// Checks totality, direction bounds and SCC-uniform parity.
ValidationReport validate(const Awt& awt);

/// Dual automaton: transitions dualized, every priority shifted by one.
Awt complement(const Awt& awt);

/// Every transition is False or a conjunction with exactly one atom per
/// direction and no disjunction.
bool is_deterministic(const Awt& awt);

/// No transition contains a disjunction.
bool is_choice_free(const Awt& awt);

/// Drops states unreachable from the initial state.
Awt prune_unreachable(const Awt& awt);

/// Successor relation on states (q -> q' when q' occurs in some delta(q, a)).
std::vector<std::vector<int>> state_graph(const Awt& awt);

enum class RunVerdict { Accept, Reject, Unknown };

std::string to_string(RunVerdict v);

/// Three-valued evaluation of the alternating run on a finite prefix; ⊥
/// leaves are Unknown from every state.
RunVerdict run_prefix(const Awt& awt, const TreePrefix& prefix);

/// Same evaluation started from an arbitrary state.
RunVerdict run_prefix_from(const Awt& awt, int state, const TreePrefix& prefix);

}  // namespace horsmc
