#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <unordered_set>

#include "horsmc/typing.hpp"

namespace horsmc {

std::string ViolatingTrace::str() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) out += (i ? " " : "") + steps[i].label + "@" + steps[i].state;
  return out;
}

namespace {

RTermPtr make_app(RTermPtr fun, RTermPtr operand) {
  auto t = std::make_shared<RTerm>();
  t->kind = RTerm::Kind::App;
  t->fun = std::move(fun);
  t->operand = std::move(operand);
  return t;
}

RTermPtr make_wrap(int event, int arg, RTermPtr inner) {
  auto t = std::make_shared<RTerm>();
  t->kind = RTerm::Kind::Wrap;
  t->event = event;
  t->arg = arg;
  t->fun = std::move(inner);
  return t;
}

std::pair<RTermPtr, std::vector<RTermPtr>> spine(const RTermPtr& term) {
  std::vector<RTermPtr> args;
  RTermPtr h = term;
  while (h->kind == RTerm::Kind::App) {
    args.push_back(h->operand);
    h = h->fun;
  }
  std::reverse(args.begin(), args.end());
  return {h, std::move(args)};
}

class Expander {
 public:
  Expander(const Scheme& scheme, const Awt& awt) : scheme_(scheme), awt_(awt) {
    for (int i = 0; i < scheme.num_nonterminals(); ++i) {
      auto t = std::make_shared<RTerm>();
      t->kind = RTerm::Kind::Nonterminal;
      t->symbol = i;
      nt_leaf_.push_back(t);
    }
    for (std::size_t i = 0; i < scheme.terminals().size(); ++i) {
      auto t = std::make_shared<RTerm>();
      t->kind = RTerm::Kind::Terminal;
      t->symbol = static_cast<int>(i);
      t_leaf_.push_back(t);
      auto s = awt.find_symbol(scheme.terminals()[i].name);
      if (!s) throw AlphabetMismatch("terminal '" + scheme.terminals()[i].name + "' is not in the automaton alphabet");
      if (awt.arity(*s) != scheme.terminals()[i].arity)
        throw AlphabetMismatch("terminal '" + scheme.terminals()[i].name + "' has arity " +
                               std::to_string(scheme.terminals()[i].arity) + " in the scheme but " +
                               std::to_string(awt.arity(*s)) + " in the automaton");
      symbol_of_.push_back(*s);
    }
  }

  ExpandResult run(int budget) {
    ExpandResult r;
    ConfigNode root;
    root.term = nt_leaf_[static_cast<std::size_t>(scheme_.start())];
    root.state = awt_.initial();
    graph_.nodes.push_back(root);
    queue_.push_back(0);
    while (!queue_.empty() && r.expansions < budget) {
      int n = queue_.front();
      queue_.pop_front();
      step(n);
      ++r.expansions;
    }
    graph_.num_pending = static_cast<int>(queue_.size());
    r.graph = std::move(graph_);
    if (evaluate_node(r.graph, 0) == RunVerdict::Reject) r.early_no = trace(r.graph);
    return r;
  }

 private:
  int tag_between(int from, int to) const {
    const ConfigNode& t = graph_.nodes[static_cast<std::size_t>(to)];
    int tag = awt_.parity(t.state);
    if (t.last_odd > graph_.nodes[static_cast<std::size_t>(from)].depth) tag = 1;
    return tag;
  }

  RTermPtr instantiate(const TermPtr& t, const std::vector<RTermPtr>& args) const {
    switch (t->kind()) {
      case TermKind::Variable: return args[static_cast<std::size_t>(t->index())];
      case TermKind::Nonterminal: return nt_leaf_[static_cast<std::size_t>(t->index())];
      case TermKind::Terminal: return t_leaf_[static_cast<std::size_t>(t->index())];
      case TermKind::Application: return make_app(instantiate(t->fun(), args), instantiate(t->arg(), args));
    }
    return nullptr;
  }

  int new_event(Event::Kind kind, int node, int num_args) {
    Event e;
    e.kind = kind;
    e.node = node;
    e.num_args = num_args;
    e.uses.resize(static_cast<std::size_t>(num_args));
    graph_.events.push_back(std::move(e));
    return static_cast<int>(graph_.events.size()) - 1;
  }

  int add_child(int parent, RTermPtr term, int state, bool by_terminal) {
    const ConfigNode& p = graph_.nodes[static_cast<std::size_t>(parent)];
    ConfigNode c;
    c.term = std::move(term);
    c.state = state;
    c.parent = parent;
    c.depth = p.depth + 1;
    c.by_terminal = by_terminal;
    c.last_odd = by_terminal && awt_.parity(state) == 1 ? c.depth : p.last_odd;
    graph_.nodes.push_back(std::move(c));
    int id = static_cast<int>(graph_.nodes.size()) - 1;
    graph_.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    queue_.push_back(id);
    return id;
  }

  void step(int n) {
    RTermPtr term = graph_.nodes[static_cast<std::size_t>(n)].term;
    const int q = graph_.nodes[static_cast<std::size_t>(n)].state;
    for (;;) {
      auto [head, args] = spine(term);
      if (head->kind == RTerm::Kind::Wrap) {
        // An argument reached head position: one use event, observed by
        // every event whose wrapper it carries.
        int use = new_event(Event::Kind::Use, n, static_cast<int>(args.size()));
        RTermPtr inner = head;
        while (inner->kind == RTerm::Kind::Wrap) {
          Event& owner = graph_.events[static_cast<std::size_t>(inner->event)];
          owner.uses[static_cast<std::size_t>(inner->arg)].push_back({use, tag_between(owner.node, n)});
          inner = inner->fun;
        }
        term = inner;
        for (std::size_t i = 0; i < args.size(); ++i)
          term = make_app(term, make_wrap(use, static_cast<int>(i), args[i]));
        continue;
      }
      ConfigNode& node = graph_.nodes[static_cast<std::size_t>(n)];
      if (head->kind == RTerm::Kind::Nonterminal) {
        node.kind = ConfigNode::Kind::Reduce;
        const Rule& rule = scheme_.rule(head->symbol);
        int e = new_event(Event::Kind::Redex, n, static_cast<int>(args.size()));
        graph_.events[static_cast<std::size_t>(e)].nonterminal = head->symbol;
        std::vector<RTermPtr> wrapped;
        for (std::size_t i = 0; i < args.size(); ++i) wrapped.push_back(make_wrap(e, static_cast<int>(i), args[i]));
        RTermPtr next = instantiate(rule.body, wrapped);
        for (std::size_t i = rule.params.size(); i < wrapped.size(); ++i) next = make_app(next, wrapped[i]);
        add_child(n, std::move(next), q, false);
        return;
      }
      // Terminal: fork once per distinct atom over all clauses.
      node.kind = ConfigNode::Kind::Terminal;
      node.label = head->symbol;
      int sym = symbol_of_[static_cast<std::size_t>(head->symbol)];
      std::map<Atom, int> child_of;
      std::vector<std::vector<int>> clauses;
      for (const Clause& c : awt_.choices(q, sym)) {
        std::vector<int> idx;
        for (const Atom& a : c) {
          auto it = child_of.find(a);
          if (it == child_of.end()) {
            int pos = static_cast<int>(graph_.nodes[static_cast<std::size_t>(n)].children.size());
            add_child(n, args[static_cast<std::size_t>(a.direction - 1)], a.state, true);
            it = child_of.emplace(a, pos).first;
          }
          idx.push_back(it->second);
        }
        clauses.push_back(std::move(idx));
      }
      graph_.nodes[static_cast<std::size_t>(n)].clauses = std::move(clauses);
      return;
    }
  }

  ViolatingTrace trace(const ConfigGraph& g) const {
    std::vector<RunVerdict> val = values(g);
    ViolatingTrace t;
    int n = 0;
    for (;;) {
      const ConfigNode& node = g.nodes[static_cast<std::size_t>(n)];
      if (node.kind == ConfigNode::Kind::Reduce) {
        n = node.children.front();
        continue;
      }
      if (node.kind != ConfigNode::Kind::Terminal) break;
      t.steps.push_back({scheme_.terminals()[static_cast<std::size_t>(node.label)].name, awt_.state_name(node.state)});
      if (node.clauses.empty()) break;
      int next = -1;
      for (int i : node.clauses.front())
        if (val[static_cast<std::size_t>(node.children[static_cast<std::size_t>(i)])] == RunVerdict::Reject) {
          next = node.children[static_cast<std::size_t>(i)];
          break;
        }
      if (next < 0) break;
      n = next;
    }
    return t;
  }

 public:
  static std::vector<RunVerdict> values(const ConfigGraph& g) {
    std::vector<RunVerdict> val(g.nodes.size(), RunVerdict::Unknown);
    for (std::size_t k = g.nodes.size(); k-- > 0;) {
      const ConfigNode& node = g.nodes[k];
      switch (node.kind) {
        case ConfigNode::Kind::Pending:
          val[k] = RunVerdict::Unknown;
          break;
        case ConfigNode::Kind::Reduce:
          val[k] = val[static_cast<std::size_t>(node.children.front())];
          break;
        case ConfigNode::Kind::Terminal: {
          RunVerdict any = RunVerdict::Reject;
          for (const auto& clause : node.clauses) {
            RunVerdict all = RunVerdict::Accept;
            for (int i : clause) {
              RunVerdict v = val[static_cast<std::size_t>(node.children[static_cast<std::size_t>(i)])];
              if (v == RunVerdict::Reject) {
                all = RunVerdict::Reject;
                break;
              }
              if (v == RunVerdict::Unknown) all = RunVerdict::Unknown;
            }
            if (all == RunVerdict::Accept) {
              any = RunVerdict::Accept;
              break;
            }
            if (all == RunVerdict::Unknown) any = RunVerdict::Unknown;
          }
          val[k] = any;
          break;
        }
      }
    }
    return val;
  }

 private:
  const Scheme& scheme_;
  const Awt& awt_;
  std::vector<RTermPtr> nt_leaf_, t_leaf_;
  std::vector<int> symbol_of_;
  ConfigGraph graph_;
  std::deque<int> queue_;
};

}  // namespace

ExpandResult expand(const Scheme& scheme, const Awt& awt, int budget) {
  return Expander(scheme, awt).run(budget);
}

RunVerdict evaluate_node(const ConfigGraph& graph, int node) {
  return Expander::values(graph)[static_cast<std::size_t>(node)];
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

// Types of one run: `active` nodes carry the run, every event on them gets
// one type or is unreliable.
void extract_run(const ConfigGraph& g, const std::vector<bool>& active, TypeTable& types,
                 std::vector<Binding>& bindings) {
  // Arguments still wrapped inside unexpanded terms may be used later.
  std::vector<std::vector<bool>> open(g.events.size());
  for (std::size_t e = 0; e < g.events.size(); ++e) open[e].assign(static_cast<std::size_t>(g.events[e].num_args), false);
  std::unordered_set<const RTerm*> seen;
  std::vector<const RTerm*> stack;
  int horizon = std::numeric_limits<int>::max();
  for (std::size_t k = 0; k < g.nodes.size(); ++k)
    if (active[k] && g.nodes[k].kind == ConfigNode::Kind::Pending) {
      stack.push_back(g.nodes[k].term.get());
      horizon = std::min(horizon, g.nodes[k].depth);
    }
  while (!stack.empty()) {
    const RTerm* t = stack.back();
    stack.pop_back();
    if (!t || !seen.insert(t).second) continue;
    if (t->kind == RTerm::Kind::Wrap) open[static_cast<std::size_t>(t->event)][static_cast<std::size_t>(t->arg)] = true;
    stack.push_back(t->fun.get());
    stack.push_back(t->operand.get());
  }

  // An argument that is still open and has not been used yet says nothing
  // about its type, unless the exploration already reaches twice as deep as
  // the event; then it is taken to be unused. Otherwise the event is
  // unreliable and the events observing it ignore that use.
  std::vector<int> type_of(g.events.size(), -1);
  for (std::size_t e = g.events.size(); e-- > 0;) {
    const Event& ev = g.events[e];
    if (!active[static_cast<std::size_t>(ev.node)]) continue;
    const int depth = g.nodes[static_cast<std::size_t>(ev.node)].depth;
    std::vector<Intersection> args(static_cast<std::size_t>(ev.num_args));
    bool complete = true;
    for (int j = 0; j < ev.num_args && complete; ++j) {
      bool observed = false;
      for (const auto& [use, tag] : ev.uses[static_cast<std::size_t>(j)]) {
        int t = type_of[static_cast<std::size_t>(use)];
        if (t < 0) continue;
        observed = true;
        args[static_cast<std::size_t>(j)].push_back({t, tag});
      }
      if (!observed && open[e][static_cast<std::size_t>(j)] && 2 * depth > horizon) complete = false;
    }
    if (!complete) continue;
    type_of[e] = types.arrow(std::move(args), g.nodes[static_cast<std::size_t>(ev.node)].state);
    if (ev.kind == Event::Kind::Redex) bindings.push_back({ev.nonterminal, type_of[e]});
  }
}

}  // namespace

Environment extract_candidates(const Scheme& scheme, const Awt& awt, const ExpandResult& result,
                               TypeTable& types) {
  const ConfigGraph& g = result.graph;
  std::vector<RunVerdict> val = Expander::values(g);
  // Or-choices met so far, by (state, symbol); a run fixes a rotation for
  // each of them, or one rotation for all when there are too many runs.
  std::map<std::pair<int, int>, std::size_t> choice_width;
  for (const ConfigNode& node : g.nodes)
    if (node.kind == ConfigNode::Kind::Terminal && node.clauses.size() > 1) {
      auto& w = choice_width[{node.state, node.label}];
      w = std::max(w, node.clauses.size());
    }
  std::map<std::pair<int, int>, int> choice_index;
  std::vector<std::size_t> radix;
  std::size_t product = 1, widest = 1;
  for (const auto& [key, w] : choice_width) {
    choice_index[key] = static_cast<int>(radix.size());
    radix.push_back(w);
    widest = std::max(widest, w);
    product = std::min<std::size_t>(product * w, kMaxRuns + 1);
  }
  const bool mixed = product <= static_cast<std::size_t>(kMaxRuns);
  const int runs = static_cast<int>(mixed ? product : std::min<std::size_t>(widest, kMaxRuns));
  auto rotation = [&](int r, const ConfigNode& node) -> std::size_t {
    if (!mixed) return static_cast<std::size_t>(r);
    std::size_t digit = static_cast<std::size_t>(r);
    int idx = choice_index.at({node.state, node.label});
    for (int i = 0; i < idx; ++i) digit /= radix[static_cast<std::size_t>(i)];
    return digit % radix[static_cast<std::size_t>(idx)];
  };

  std::vector<Binding> bindings{{scheme.start(), types.atomic(awt.initial())}};
  for (int r = 0; r < runs; ++r) {
    // Nodes are created after their parents, so one forward pass suffices.
    std::vector<bool> active(g.nodes.size(), false);
    active[0] = true;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const ConfigNode& node = g.nodes[k];
      if (!active[k]) continue;
      if (node.kind == ConfigNode::Kind::Reduce) {
        active[static_cast<std::size_t>(node.children.front())] = true;
        continue;
      }
      if (node.kind != ConfigNode::Kind::Terminal || node.clauses.empty()) continue;
      auto clause_value = [&](const std::vector<int>& clause) {
        RunVerdict all = RunVerdict::Accept;
        for (int i : clause) {
          RunVerdict v = val[static_cast<std::size_t>(node.children[static_cast<std::size_t>(i)])];
          if (v == RunVerdict::Reject) return RunVerdict::Reject;
          if (v == RunVerdict::Unknown) all = RunVerdict::Unknown;
        }
        return all;
      };
      const std::size_t n = node.clauses.size();
      const std::size_t rot = n > 1 ? rotation(r, node) : 0;
      std::size_t pick = rot % n;
      bool found = false;
      for (RunVerdict want : {RunVerdict::Accept, RunVerdict::Unknown}) {
        for (std::size_t s = 0; s < n && !found; ++s) {
          std::size_t c = (rot + s) % n;
          if (clause_value(node.clauses[c]) == want) {
            pick = c;
            found = true;
          }
        }
      }
      for (int i : node.clauses[pick]) active[static_cast<std::size_t>(node.children[static_cast<std::size_t>(i)])] = true;
    }
    extract_run(g, active, types, bindings);
  }
  return make_environment(std::move(bindings), scheme, types, awt);
}

}  // namespace horsmc
