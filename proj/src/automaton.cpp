#include "horsmc/automaton.hpp"

#include <algorithm>
#include <set>

#include "horsmc/graph.hpp"

namespace horsmc {

// ---------------------------------------------------------------------------
// Formula

Formula Formula::top() {
  Formula f;
  f.kind_ = Kind::True;
  return f;
}

Formula Formula::bottom() { return Formula{}; }

Formula Formula::atom(int direction, int state) {
  Formula f;
  f.kind_ = Kind::Atom;
  f.atom_ = {direction, state};
  return f;
}

namespace {

Formula combine(Formula::Kind kind, std::vector<Formula> parts, Formula unit, Formula zero,
                Formula (*build)(Formula::Kind, std::vector<Formula>)) {
  std::vector<Formula> flat;
  for (auto& p : parts) {
    if (p == zero) return zero;
    if (p == unit) continue;
    if (p.kind() == kind) {
      for (const auto& c : p.children()) flat.push_back(c);
    } else {
      flat.push_back(std::move(p));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return unit;
  if (flat.size() == 1) return flat.front();
  return build(kind, std::move(flat));
}

}  // namespace

Formula Formula::conj(std::vector<Formula> parts) {
  return combine(Kind::And, std::move(parts), top(), bottom(), [](Kind k, std::vector<Formula> c) {
    Formula f;
    f.kind_ = k;
    f.children_ = std::move(c);
    return f;
  });
}

Formula Formula::disj(std::vector<Formula> parts) {
  return combine(Kind::Or, std::move(parts), bottom(), top(), [](Kind k, std::vector<Formula> c) {
    Formula f;
    f.kind_ = k;
    f.children_ = std::move(c);
    return f;
  });
}

Formula Formula::dual() const {
  switch (kind_) {
    case Kind::True:
      return bottom();
    case Kind::False:
      return top();
    case Kind::Atom:
      return *this;
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : children_) parts.push_back(c.dual());
      return kind_ == Kind::And ? disj(std::move(parts)) : conj(std::move(parts));
    }
  }
  return *this;
}

namespace {

std::vector<Clause> minimize(std::vector<Clause> clauses) {
  for (auto& c : clauses) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  std::vector<Clause> kept;
  for (auto& c : clauses) {
    bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!subsumed) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

std::vector<Clause> Formula::dnf() const {
  switch (kind_) {
    case Kind::True:
      return {Clause{}};
    case Kind::False:
      return {};
    case Kind::Atom:
      return {Clause{atom_}};
    case Kind::Or: {
      std::vector<Clause> out;
      for (const auto& c : children_) {
        auto sub = c.dnf();
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return minimize(std::move(out));
    }
    case Kind::And: {
      std::vector<Clause> acc{Clause{}};
      for (const auto& c : children_) {
        auto sub = c.dnf();
        std::vector<Clause> next;
        for (const auto& a : acc)
          for (const auto& b : sub) {
            Clause m = a;
            m.insert(m.end(), b.begin(), b.end());
            next.push_back(std::move(m));
          }
        acc = minimize(std::move(next));
        if (acc.empty()) break;
      }
      return acc;
    }
  }
  return {};
}

void Formula::collect_atoms(std::vector<Atom>& out) const {
  if (kind_ == Kind::Atom) out.push_back(atom_);
  for (const auto& c : children_) c.collect_atoms(out);
}

std::string Formula::str(const std::function<std::string(int)>& state_name) const {
  switch (kind_) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Atom:
      return "(" + std::to_string(atom_.direction) + "," + state_name(atom_.state) + ")";
    case Kind::And:
    case Kind::Or: {
      std::string out;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) out += kind_ == Kind::And ? " /\\ " : " \\/ ";
        std::string part = children_[i].str(state_name);
        if (children_[i].kind_ == Kind::And || children_[i].kind_ == Kind::Or) part = "(" + part + ")";
        out += part;
      }
      return out;
    }
  }
  return {};
}

std::strong_ordering Formula::operator<=>(const Formula& other) const {
  if (auto c = kind_ <=> other.kind_; c != 0) return c;
  if (kind_ == Kind::Atom) return atom_ <=> other.atom_;
  const std::size_t n = std::min(children_.size(), other.children_.size());
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = children_[i] <=> other.children_[i]; c != 0) return c;
  return children_.size() <=> other.children_.size();
}

// ---------------------------------------------------------------------------
// Awt

Awt::Awt(std::vector<std::string> states, std::vector<TerminalSymbol> alphabet, int initial,
         std::vector<int> priorities, TransitionTable delta)
    : states_(std::move(states)),
      alphabet_(std::move(alphabet)),
      initial_(initial),
      priorities_(std::move(priorities)),
      delta_(std::move(delta)) {
  delta_.resize(states_.size());
  for (auto& row : delta_) row.resize(alphabet_.size());
  priorities_.resize(states_.size(), 0);
  dnf_cache_.assign(states_.size(), std::vector<std::optional<std::vector<Clause>>>(alphabet_.size()));
  for (std::size_t q = 0; q < states_.size(); ++q)
    for (std::size_t a = 0; a < alphabet_.size(); ++a)
      if (delta_[q][a]) dnf_cache_[q][a] = delta_[q][a]->dnf();
}

std::optional<int> Awt::find_state(const std::string& name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::map<std::string, int> Awt::alphabet_map() const {
  std::map<std::string, int> out;
  for (const auto& a : alphabet_) out[a.name] = a.arity;
  return out;
}

std::optional<int> Awt::find_symbol(const std::string& name) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

bool Awt::has_transition(int q, int symbol) const {
  return delta_[static_cast<std::size_t>(q)][static_cast<std::size_t>(symbol)].has_value();
}

const Formula& Awt::delta(int q, int symbol) const {
  const auto& f = delta_[static_cast<std::size_t>(q)][static_cast<std::size_t>(symbol)];
  if (!f) throw MissingTransition(state_name(q), alphabet_[static_cast<std::size_t>(symbol)].name);
  return *f;
}

const std::vector<Clause>& Awt::choices(int q, int symbol) const {
  const auto& slot = dnf_cache_[static_cast<std::size_t>(q)][static_cast<std::size_t>(symbol)];
  if (!slot) throw MissingTransition(state_name(q), alphabet_[static_cast<std::size_t>(symbol)].name);
  return *slot;
}

// ---------------------------------------------------------------------------
// Structural operations

std::vector<std::vector<int>> state_graph(const Awt& awt) {
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(awt.num_states()));
  for (int q = 0; q < awt.num_states(); ++q) {
    std::set<int> targets;
    for (const auto& f : awt.table()[static_cast<std::size_t>(q)]) {
      if (!f) continue;
      std::vector<Atom> atoms;
      f->collect_atoms(atoms);
      for (const auto& a : atoms) targets.insert(a.state);
    }
    succ[static_cast<std::size_t>(q)].assign(targets.begin(), targets.end());
  }
  return succ;
}

ValidationReport validate(const Awt& awt) {
  if (awt.num_states() == 0) throw Error("automaton has no states");
  if (awt.initial() < 0 || awt.initial() >= awt.num_states())
    throw Error("initial state out of range");
  for (int q = 0; q < awt.num_states(); ++q) {
    if (awt.priority(q) < 0)
      throw Error("negative priority for state '" + awt.state_name(q) + "'");
    for (int a = 0; a < static_cast<int>(awt.alphabet().size()); ++a) {
      const Formula& f = awt.delta(q, a);
      std::vector<Atom> atoms;
      f.collect_atoms(atoms);
      for (const auto& atom : atoms) {
        if (atom.direction < 1 || atom.direction > awt.arity(a))
          throw ArityError("direction " + std::to_string(atom.direction) + " out of range for '" +
                           awt.alphabet()[static_cast<std::size_t>(a)].name + "' of arity " +
                           std::to_string(awt.arity(a)) + " in state '" + awt.state_name(q) + "'");
        if (atom.state < 0 || atom.state >= awt.num_states())
          throw Error("transition of '" + awt.state_name(q) + "' targets an unknown state");
      }
    }
  }

  auto scc = strongly_connected_components(state_graph(awt));
  ValidationReport report;
  for (int c = 0; c < scc.count(); ++c) {
    const auto& members = scc.members[static_cast<std::size_t>(c)];
    SccClass cls{members, awt.parity(members.front()), scc.cyclic[static_cast<std::size_t>(c)]};
    for (int q : members) {
      if (awt.parity(q) != cls.priority) {
        std::string names;
        for (int m : members) names += (names.empty() ? "" : ", ") + awt.state_name(m);
        throw WeaknessViolation("strongly connected component {" + names +
                                "} mixes accepting and rejecting priorities");
      }
    }
    report.sccs.push_back(std::move(cls));
  }
  return report;
}

Awt complement(const Awt& awt) {
  Awt::TransitionTable table = awt.table();
  for (auto& row : table)
    for (auto& f : row)
      if (f) f = f->dual();
  std::vector<int> priorities = awt.priorities();
  for (auto& p : priorities) ++p;
  return Awt(awt.states(), awt.alphabet(), awt.initial(), std::move(priorities), std::move(table));
}

namespace {
bool has_or(const Formula& f) {
  if (f.kind() == Formula::Kind::Or) return true;
  return std::any_of(f.children().begin(), f.children().end(), has_or);
}
}  // namespace

bool is_deterministic(const Awt& awt) {
  for (int q = 0; q < awt.num_states(); ++q) {
    for (int a = 0; a < static_cast<int>(awt.alphabet().size()); ++a) {
      const Formula& f = awt.delta(q, a);
      if (f.kind() == Formula::Kind::False) continue;
      if (has_or(f)) return false;
      std::vector<Atom> atoms;
      f.collect_atoms(atoms);
      std::vector<int> per_direction(static_cast<std::size_t>(awt.arity(a)) + 1, 0);
      for (const auto& atom : atoms) ++per_direction[static_cast<std::size_t>(atom.direction)];
      for (int d = 1; d <= awt.arity(a); ++d)
        if (per_direction[static_cast<std::size_t>(d)] != 1) return false;
    }
  }
  return true;
}

bool is_choice_free(const Awt& awt) {
  for (int q = 0; q < awt.num_states(); ++q)
    for (int a = 0; a < static_cast<int>(awt.alphabet().size()); ++a)
      if (awt.choices(q, a).size() > 1) return false;
  return true;
}

Awt prune_unreachable(const Awt& awt) {
  auto succ = state_graph(awt);
  std::vector<int> remap(static_cast<std::size_t>(awt.num_states()), -1);
  std::vector<int> order{awt.initial()};
  remap[static_cast<std::size_t>(awt.initial())] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int t : succ[static_cast<std::size_t>(order[i])])
      if (remap[static_cast<std::size_t>(t)] < 0) {
        remap[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
      }
  std::sort(order.begin() + 1, order.end());
  for (std::size_t i = 0; i < order.size(); ++i) remap[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  std::function<Formula(const Formula&)> rename = [&](const Formula& f) -> Formula {
    switch (f.kind()) {
      case Formula::Kind::Atom:
        return Formula::atom(f.atom_value().direction, remap[static_cast<std::size_t>(f.atom_value().state)]);
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) parts.push_back(rename(c));
        return f.kind() == Formula::Kind::And ? Formula::conj(parts) : Formula::disj(parts);
      }
      default:
        return f;
    }
  };

  std::vector<std::string> names;
  std::vector<int> priorities;
  Awt::TransitionTable table;
  for (int q : order) {
    names.push_back(awt.state_name(q));
    priorities.push_back(awt.priority(q));
    table.emplace_back();
    for (const auto& f : awt.table()[static_cast<std::size_t>(q)])
      table.back().push_back(f ? std::optional<Formula>(rename(*f)) : std::nullopt);
  }
  return Awt(std::move(names), awt.alphabet(), 0, std::move(priorities), std::move(table));
}

// ---------------------------------------------------------------------------
// Finite-prefix runs

std::string to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::Accept:
      return "accept";
    case RunVerdict::Reject:
      return "reject";
    case RunVerdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

RunVerdict run_prefix_from(const Awt& awt, int state, const TreePrefix& node) {
  if (node.is_bottom()) return RunVerdict::Unknown;
  auto symbol = awt.find_symbol(*node.label);
  if (!symbol) throw UnknownSymbol(*node.label);
  if (static_cast<int>(node.children.size()) != awt.arity(*symbol))
    throw ArityError("node '" + *node.label + "' has " + std::to_string(node.children.size()) +
                     " children but arity " + std::to_string(awt.arity(*symbol)));
  return awt.delta(state, *symbol)
      .fold(
          RunVerdict::Accept, RunVerdict::Reject,
          [&](const Atom& a) {
            return run_prefix_from(awt, a.state, node.children[static_cast<std::size_t>(a.direction - 1)]);
          },
          [](const std::vector<RunVerdict>& vs) {
            if (std::find(vs.begin(), vs.end(), RunVerdict::Reject) != vs.end()) return RunVerdict::Reject;
            if (std::find(vs.begin(), vs.end(), RunVerdict::Unknown) != vs.end()) return RunVerdict::Unknown;
            return RunVerdict::Accept;
          },
          [](const std::vector<RunVerdict>& vs) {
            if (std::find(vs.begin(), vs.end(), RunVerdict::Accept) != vs.end()) return RunVerdict::Accept;
            if (std::find(vs.begin(), vs.end(), RunVerdict::Unknown) != vs.end()) return RunVerdict::Unknown;
            return RunVerdict::Reject;
          });
}

RunVerdict run_prefix(const Awt& awt, const TreePrefix& prefix) {
  return run_prefix_from(awt, awt.initial(), prefix);
}

}  // namespace horsmc
