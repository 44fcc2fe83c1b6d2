#pragma once

#include <random>
#include <string>
#include <vector>

#include "horsmc/typing.hpp"

namespace horsmc {

enum class Player { Verifier, Refuter };

std::string to_string(Player p);

/// Two-player game with node priorities in {0, 1}. Every strongly connected
/// component has a single priority; a play that gets stuck loses for the
/// owner of the last node.
class Game {
 public:
  Game() = default;
  /// Throws WeaknessViolation when some SCC mixes priorities.
  Game(std::vector<Player> owner, std::vector<int> priority, std::vector<std::vector<int>> successors,
       int initial, std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(owner_.size()); }
  int initial() const { return initial_; }
  Player owner(int v) const { return owner_[static_cast<std::size_t>(v)]; }
  int priority(int v) const { return priority_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& successors(int v) const { return succ_[static_cast<std::size_t>(v)]; }
  const std::vector<std::vector<int>>& successors() const { return succ_; }
  const std::string& label(int v) const { return labels_[static_cast<std::size_t>(v)]; }
  int num_edges() const;

  /// Weakness certificate: SCC of every node (reverse topological
  /// numbering, sinks first) and the priority shared by each SCC.
  const std::vector<int>& scc_of() const { return scc_; }
  const std::vector<int>& scc_priority() const { return scc_priority_; }
  int num_sccs() const { return static_cast<int>(scc_priority_.size()); }

  /// SCCs whose priorities were lifted to 1 when building from derivations.
  int normalized_sccs = 0;

 private:
  std::vector<Player> owner_;
  std::vector<int> priority_;
  std::vector<std::vector<int>> succ_;
  int initial_ = 0;
  std::vector<std::string> labels_;
  std::vector<int> scc_;
  std::vector<int> scc_priority_;
};

struct Solution {
  std::vector<Player> winner;
  /// Chosen successor for nodes owned by their winner; -1 elsewhere.
  std::vector<int> strategy;
  Player winner_of(int v) const { return winner[static_cast<std::size_t>(v)]; }
};

/// Binding nodes (Verifier) choose a derivation; derivation nodes (Refuter)
/// choose an assumption. A binding node is split by the tag under which it
/// is assumed and carries that tag as priority; derivation nodes inherit it.
/// Mixed-priority SCCs are lifted to priority 1.
Game build_game(const Scheme& scheme, const Awt& awt, const TypeTable& types, const CheckResult& check,
                const Binding& target);

/// SCC sweep, sinks first, with attractors inside each component.
Solution solve(const Game& game);

/// Nested fixpoint on node sets; winners only, no strategy.
Solution naive_solve(const Game& game);

/// Random game with 1 to `max_nodes` nodes, up to three successors per node
/// and one random priority per SCC.
Game random_game(std::mt19937_64& rng, int max_nodes);

/// DOT text: boxes for Verifier nodes, diamonds for Refuter nodes.
std::string to_dot(const Game& game, const Solution* solution = nullptr);

}  // namespace horsmc
