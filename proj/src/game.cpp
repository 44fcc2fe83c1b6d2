#include "horsmc/game.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>

#include "horsmc/graph.hpp"

namespace horsmc {

std::string to_string(Player p) { return p == Player::Verifier ? "verifier" : "refuter"; }

Game::Game(std::vector<Player> owner, std::vector<int> priority, std::vector<std::vector<int>> successors,
           int initial, std::vector<std::string> labels)
    : owner_(std::move(owner)),
      priority_(std::move(priority)),
      succ_(std::move(successors)),
      initial_(initial),
      labels_(std::move(labels)) {
  const std::size_t n = owner_.size();
  if (priority_.size() != n || succ_.size() != n) throw Error("game arrays differ in length");
  if (n > 0 && (initial_ < 0 || initial_ >= static_cast<int>(n))) throw Error("game initial node out of range");
  for (const auto& s : succ_)
    for (int w : s)
      if (w < 0 || w >= static_cast<int>(n)) throw Error("game edge target out of range");
  for (int p : priority_)
    if (p != 0 && p != 1) throw Error("game priorities must be 0 or 1");
  if (labels_.size() != n) {
    labels_.resize(n);
    for (std::size_t v = 0; v < n; ++v) labels_[v] = std::to_string(v);
  }
  SccDecomposition sccs = strongly_connected_components(succ_);
  scc_ = sccs.component;
  scc_priority_.assign(static_cast<std::size_t>(sccs.count()), -1);
  for (std::size_t v = 0; v < n; ++v) {
    int& p = scc_priority_[static_cast<std::size_t>(scc_[v])];
    if (p == -1) p = priority_[v];
    if (p != priority_[v])
      throw WeaknessViolation("game component containing node " + labels_[v] + " mixes priorities");
  }
}

int Game::num_edges() const {
  int e = 0;
  for (const auto& s : succ_) e += static_cast<int>(s.size());
  return e;
}

// ---------------------------------------------------------------------------

Game build_game(const Scheme& scheme, const Awt& awt, const TypeTable& types, const CheckResult& check,
                const Binding& target) {
  if (!check.consistent.contains(target))
    throw TargetNotConsistent(binding_str(target, scheme, types, awt) + " is not in the consistent environment");
  std::map<Binding, int> order;
  for (std::size_t i = 0; i < check.consistent.bindings.size(); ++i)
    order[check.consistent.bindings[i]] = static_cast<int>(i);

  // Key: (binding order, tag, derivation index or -1).
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::vector<Key>> edges;
  std::deque<Key> work;
  Key start{order.at(target), awt.parity(types.result(target.type)), -1};
  edges[start];
  work.push_back(start);
  while (!work.empty()) {
    Key k = work.front();
    work.pop_front();
    auto [b, tag, d] = k;
    const Binding& binding = check.consistent.bindings[static_cast<std::size_t>(b)];
    const auto& ders = check.derivations.at(binding);
    std::vector<Key> next;
    if (d < 0) {
      for (std::size_t i = 0; i < ders.size(); ++i) next.push_back({b, tag, static_cast<int>(i)});
    } else {
      for (const Assumption& a : ders[static_cast<std::size_t>(d)]) next.push_back({order.at(a.binding), a.tag, -1});
    }
    edges[k] = next;
    for (const Key& n : next)
      if (!edges.count(n)) {
        edges[n];
        work.push_back(n);
      }
  }

  std::map<Key, int> id;
  for (const auto& [k, _] : edges) id.emplace(k, static_cast<int>(id.size()));
  std::vector<Player> owner;
  std::vector<int> priority;
  std::vector<std::vector<int>> succ;
  std::vector<std::string> labels;
  for (const auto& [k, out] : edges) {
    auto [b, tag, d] = k;
    owner.push_back(d < 0 ? Player::Verifier : Player::Refuter);
    priority.push_back(tag);
    std::vector<int> s;
    for (const Key& n : out) s.push_back(id.at(n));
    succ.push_back(std::move(s));
    std::string l = binding_str(check.consistent.bindings[static_cast<std::size_t>(b)], scheme, types, awt) +
                    " @" + std::to_string(tag);
    if (d >= 0) l += " #" + std::to_string(d);
    labels.push_back(std::move(l));
  }

  // Lift mixed components to the rejecting priority.
  SccDecomposition sccs = strongly_connected_components(succ);
  int lifted = 0;
  for (const auto& members : sccs.members) {
    bool mixed = std::any_of(members.begin(), members.end(), [&](int v) { return priority[static_cast<std::size_t>(v)] != priority[static_cast<std::size_t>(members.front())]; });
    if (!mixed) continue;
    ++lifted;
    for (int v : members) priority[static_cast<std::size_t>(v)] = 1;
  }
  Game g(std::move(owner), std::move(priority), std::move(succ), id.at(start), std::move(labels));
  g.normalized_sccs = lifted;
  return g;
}

// ---------------------------------------------------------------------------

namespace {

// Attractor for `player` inside `members` towards nodes already marked in
// `target`. Returns, for attracted nodes of `player`, the successor used.
void attract(const Game& g, const std::vector<int>& members, const std::vector<int>& in_scc, int scc,
             Player player, std::vector<bool>& target, std::vector<int>& via) {
  std::vector<int> remaining(static_cast<std::size_t>(g.size()), 0);
  std::deque<int> queue;
  // Each edge v -> w with w in the target is seen exactly once.
  auto join = [&](int v, int w) {
    if (target[static_cast<std::size_t>(v)]) return;
    if (g.owner(v) == player) {
      via[static_cast<std::size_t>(v)] = w;
    } else if (--remaining[static_cast<std::size_t>(v)] > 0) {
      return;
    }
    target[static_cast<std::size_t>(v)] = true;
    queue.push_back(v);
  };
  for (int v : members) {
    remaining[static_cast<std::size_t>(v)] = static_cast<int>(g.successors(v).size());
    if (g.owner(v) != player && g.successors(v).empty()) {
      target[static_cast<std::size_t>(v)] = true;
      queue.push_back(v);
    }
  }
  for (int v : members)
    for (int w : g.successors(v))
      if (in_scc[static_cast<std::size_t>(w)] != scc && target[static_cast<std::size_t>(w)]) join(v, w);
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(g.size()));
  for (int v : members)
    for (int w : g.successors(v))
      if (in_scc[static_cast<std::size_t>(w)] == scc) pred[static_cast<std::size_t>(w)].push_back(v);
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int v : pred[static_cast<std::size_t>(w)]) join(v, w);
  }
}

}  // namespace

Solution solve(const Game& g) {
  const int n = g.size();
  Solution sol;
  sol.winner.assign(static_cast<std::size_t>(n), Player::Refuter);
  sol.strategy.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(g.num_sccs()));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(g.scc_of()[static_cast<std::size_t>(v)])].push_back(v);

  std::vector<bool> won_v(static_cast<std::size_t>(n), false), won_r(static_cast<std::size_t>(n), false);
  std::vector<int> via(static_cast<std::size_t>(n), -1);
  for (int c = 0; c < g.num_sccs(); ++c) {
    const auto& m = members[static_cast<std::size_t>(c)];
    if (g.scc_priority()[static_cast<std::size_t>(c)] == 0) {
      // Refuter must force an exit into its region or a stuck Verifier node.
      attract(g, m, g.scc_of(), c, Player::Refuter, won_r, via);
      for (int v : m) {
        if (won_r[static_cast<std::size_t>(v)]) {
          sol.winner[static_cast<std::size_t>(v)] = Player::Refuter;
          if (g.owner(v) == Player::Refuter) sol.strategy[static_cast<std::size_t>(v)] = via[static_cast<std::size_t>(v)];
        } else {
          won_v[static_cast<std::size_t>(v)] = true;
          sol.winner[static_cast<std::size_t>(v)] = Player::Verifier;
        }
      }
      for (int v : m)
        if (won_v[static_cast<std::size_t>(v)] && g.owner(v) == Player::Verifier)
          for (int w : g.successors(v))
            if (won_v[static_cast<std::size_t>(w)]) {
              sol.strategy[static_cast<std::size_t>(v)] = w;
              break;
            }
    } else {
      // Verifier must force an exit into its region or a stuck Refuter node.
      attract(g, m, g.scc_of(), c, Player::Verifier, won_v, via);
      for (int v : m) {
        if (won_v[static_cast<std::size_t>(v)]) {
          sol.winner[static_cast<std::size_t>(v)] = Player::Verifier;
          if (g.owner(v) == Player::Verifier) sol.strategy[static_cast<std::size_t>(v)] = via[static_cast<std::size_t>(v)];
        } else {
          won_r[static_cast<std::size_t>(v)] = true;
          sol.winner[static_cast<std::size_t>(v)] = Player::Refuter;
        }
      }
      for (int v : m)
        if (won_r[static_cast<std::size_t>(v)] && g.owner(v) == Player::Refuter)
          for (int w : g.successors(v))
            if (won_r[static_cast<std::size_t>(w)]) {
              sol.strategy[static_cast<std::size_t>(v)] = w;
              break;
            }
    }
  }
  return sol;
}

Solution naive_solve(const Game& g) {
  const int n = g.size();
  using Set = std::vector<bool>;
  auto cpre = [&](const Set& s) {
    Set out(static_cast<std::size_t>(n), false);
    for (int v = 0; v < n; ++v) {
      const auto& succ = g.successors(v);
      if (g.owner(v) == Player::Verifier)
        out[static_cast<std::size_t>(v)] = std::any_of(succ.begin(), succ.end(), [&](int w) { return s[static_cast<std::size_t>(w)]; });
      else
        out[static_cast<std::size_t>(v)] = std::all_of(succ.begin(), succ.end(), [&](int w) { return s[static_cast<std::size_t>(w)]; });
    }
    return out;
  };
  // mu Y. nu Z. CPre(Y) | (P0 & CPre(Z))
  Set y(static_cast<std::size_t>(n), false);
  for (;;) {
    Set pre_y = cpre(y);
    Set z(static_cast<std::size_t>(n), true);
    for (;;) {
      Set pre_z = cpre(z);
      Set next(static_cast<std::size_t>(n), false);
      for (int v = 0; v < n; ++v)
        next[static_cast<std::size_t>(v)] = pre_y[static_cast<std::size_t>(v)] || (g.priority(v) == 0 && pre_z[static_cast<std::size_t>(v)]);
      if (next == z) break;
      z = std::move(next);
    }
    if (z == y) break;
    y = std::move(z);
  }
  Solution sol;
  sol.strategy.assign(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) sol.winner.push_back(y[static_cast<std::size_t>(v)] ? Player::Verifier : Player::Refuter);
  return sol;
}

std::string to_dot(const Game& g, const Solution* solution) {
  std::ostringstream out;
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  out << "digraph game {\n";
  for (int v = 0; v < g.size(); ++v) {
    out << "  n" << v << " [label=\"" << escape(g.label(v)) << "\\np=" << g.priority(v) << "\", shape="
        << (g.owner(v) == Player::Verifier ? "box" : "diamond");
    if (v == g.initial()) out << ", penwidth=2";
    if (solution) out << ", color=" << (solution->winner_of(v) == Player::Verifier ? "darkgreen" : "red");
    out << "];\n";
  }
  for (int v = 0; v < g.size(); ++v)
    for (int w : g.successors(v)) {
      out << "  n" << v << " -> n" << w;
      if (solution && solution->strategy[static_cast<std::size_t>(v)] == w) out << " [style=bold]";
      out << ";\n";
    }
  out << "}\n";
  return out.str();
}

Game random_game(std::mt19937_64& rng, int max_nodes) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = pick(1, std::max(1, max_nodes));
  std::vector<Player> owner(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    owner[static_cast<std::size_t>(v)] = pick(0, 1) ? Player::Refuter : Player::Verifier;
    int k = pick(0, 3);
    for (int i = 0; i < k; ++i) succ[static_cast<std::size_t>(v)].push_back(pick(0, n - 1));
    auto& s = succ[static_cast<std::size_t>(v)];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  SccDecomposition sccs = strongly_connected_components(succ);
  std::vector<int> scc_priority(static_cast<std::size_t>(sccs.count()));
  for (int& p : scc_priority) p = pick(0, 1);
  std::vector<int> priority(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    priority[static_cast<std::size_t>(v)] = scc_priority[static_cast<std::size_t>(sccs.component[static_cast<std::size_t>(v)])];
  return Game(std::move(owner), std::move(priority), std::move(succ), pick(0, n - 1));
}

}  // namespace horsmc
