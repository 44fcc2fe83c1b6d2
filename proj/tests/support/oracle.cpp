#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace oracle {

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string nt_name(int i) { return i == 0 ? "S" : "F" + std::to_string(i); }
std::string param_name(int i) { return i == 0 ? "x" : "y"; }

void render(const OTerm& t, std::ostream& out, bool nested) {
  std::string head;
  switch (t.kind) {
    case OTerm::Param: head = param_name(t.id); break;
    case OTerm::Nonterminal: head = nt_name(t.id); break;
    case OTerm::Terminal: head = kAlphabet[static_cast<std::size_t>(t.id)].first; break;
  }
  if (t.args.empty()) {
    out << head;
    return;
  }
  if (nested) out << "(";
  out << head;
  for (const auto& a : t.args) {
    out << " ";
    render(a, out, true);
  }
  if (nested) out << ")";
}

void render(const OFormula& f, std::ostream& out) {
  switch (f.kind) {
    case OFormula::True: out << "true"; return;
    case OFormula::False: out << "false"; return;
    case OFormula::Atom: out << "(" << f.direction << ",q" << f.state << ")"; return;
    case OFormula::And:
    case OFormula::Or:
      out << "(";
      for (std::size_t i = 0; i < f.parts.size(); ++i) {
        if (i) out << (f.kind == OFormula::And ? " /\\ " : " \\/ ");
        render(f.parts[i], out);
      }
      out << ")";
      return;
  }
}

OTerm gen_body(std::mt19937_64& rng, const std::vector<int>& arity, int params, int depth) {
  // Leaves: end, a parameter, or a nonterminal without parameters.
  std::vector<int> constants;
  for (std::size_t i = 0; i < arity.size(); ++i)
    if (arity[i] == 0) constants.push_back(static_cast<int>(i));
  auto leaf = [&]() {
    int options = 1 + params + static_cast<int>(constants.size());
    int c = pick(rng, 0, options - 1);
    if (c == 0) return OTerm{OTerm::Terminal, 3, {}};
    if (c <= params) return OTerm{OTerm::Param, c - 1, {}};
    return OTerm{OTerm::Nonterminal, constants[static_cast<std::size_t>(c - 1 - params)], {}};
  };
  if (depth == 0) return leaf();
  int c = pick(rng, 0, 9);
  if (c <= 1) return leaf();
  if (c <= 5) {
    int sym = pick(rng, 0, 2);
    OTerm t{OTerm::Terminal, sym, {}};
    for (int i = 0; i < kAlphabet[static_cast<std::size_t>(sym)].second; ++i)
      t.args.push_back(gen_body(rng, arity, params, depth - 1));
    return t;
  }
  int f = pick(rng, 0, static_cast<int>(arity.size()) - 1);
  OTerm t{OTerm::Nonterminal, f, {}};
  for (int i = 0; i < arity[static_cast<std::size_t>(f)]; ++i) t.args.push_back(gen_body(rng, arity, params, depth - 1));
  return t;
}

OFormula gen_formula(std::mt19937_64& rng, int arity, int states, int depth) {
  int c = pick(rng, 0, 9);
  if (arity == 0 || depth == 0 || c <= 1) {
    if (arity == 0 || c == 0) return OFormula{pick(rng, 0, 3) == 0 ? OFormula::False : OFormula::True, 0, 0, {}};
    return OFormula{OFormula::Atom, pick(rng, 1, arity), pick(rng, 0, states - 1), {}};
  }
  if (c <= 5) return OFormula{OFormula::Atom, pick(rng, 1, arity), pick(rng, 0, states - 1), {}};
  OFormula f{c <= 7 ? OFormula::And : OFormula::Or, 0, 0, {}};
  int n = pick(rng, 2, 3);
  for (int i = 0; i < n; ++i) f.parts.push_back(gen_formula(rng, arity, states, depth - 1));
  return f;
}

void collect_states(const OFormula& f, std::vector<int>& out) {
  if (f.kind == OFormula::Atom) out.push_back(f.state);
  for (const auto& p : f.parts) collect_states(p, out);
}

}  // namespace

std::string OScheme::text() const {
  std::ostringstream out;
  out << "%BEGING\n";
  for (std::size_t i = 0; i < body.size(); ++i) {
    out << nt_name(static_cast<int>(i));
    for (int p = 0; p < arity[i]; ++p) out << " " << param_name(p);
    out << " -> ";
    render(body[i], out, false);
    out << ".\n";
  }
  out << "%ENDG\n";
  return out.str();
}

std::string OAutomaton::text() const {
  std::ostringstream out;
  out << "%BEGINA\ninit q" << initial << ".\n";
  for (const auto& [name, ar] : kAlphabet) out << "arity " << name << " = " << ar << ".\n";
  for (std::size_t q = 0; q < priority.size(); ++q) out << "priority q" << q << " = " << priority[q] << ".\n";
  for (std::size_t q = 0; q < delta.size(); ++q)
    for (std::size_t a = 0; a < kAlphabet.size(); ++a) {
      out << "q" << q << " " << kAlphabet[a].first << " -> ";
      render(delta[q][a], out);
      out << ".\n";
    }
  out << "%ENDA\n";
  return out.str();
}

std::string problem_text(const OScheme& scheme, const OAutomaton& awt) { return scheme.text() + awt.text(); }

OScheme random_scheme(std::mt19937_64& rng, int order, int max_nonterminals) {
  OScheme s;
  int n = pick(rng, 1, max_nonterminals);
  s.arity.assign(static_cast<std::size_t>(n), 0);
  if (order >= 1) {
    for (int i = 1; i < n; ++i) s.arity[static_cast<std::size_t>(i)] = pick(rng, 0, 2);
    if (n == 1) s.arity.push_back(1);
    if (std::all_of(s.arity.begin() + 1, s.arity.end(), [](int a) { return a == 0; })) s.arity.back() = 1;
    n = static_cast<int>(s.arity.size());
  }
  for (int i = 0; i < n; ++i) {
    int params = s.arity[static_cast<std::size_t>(i)];
    OTerm b = gen_body(rng, s.arity, params, pick(rng, 1, 3));
    // Keep order 1 honest: a parameterised rule uses its first parameter.
    if (params > 0 && b.kind != OTerm::Param) {
      OTerm wrapper{OTerm::Terminal, 2, {b, OTerm{OTerm::Param, 0, {}}}};
      b = wrapper;
    }
    s.body.push_back(std::move(b));
  }
  return s;
}

OAutomaton random_automaton(std::mt19937_64& rng, int max_states) {
  OAutomaton m;
  int n = pick(rng, 1, max_states);
  m.delta.resize(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q)
    for (const auto& [name, ar] : kAlphabet) m.delta[static_cast<std::size_t>(q)].push_back(gen_formula(rng, ar, n, 2));
  // Reachability closure; mutually reachable states share a priority.
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int q = 0; q < n; ++q) {
    reach[static_cast<std::size_t>(q)][static_cast<std::size_t>(q)] = true;
    std::vector<int> succ;
    for (const auto& f : m.delta[static_cast<std::size_t>(q)]) collect_states(f, succ);
    for (int r : succ) reach[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] && reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
  m.priority.assign(static_cast<std::size_t>(n), -1);
  for (int q = 0; q < n; ++q) {
    if (m.priority[static_cast<std::size_t>(q)] >= 0) continue;
    int p = pick(rng, 0, 1);
    for (int r = 0; r < n; ++r)
      if (reach[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] && reach[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)])
        m.priority[static_cast<std::size_t>(r)] = p;
  }
  m.initial = 0;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

// Closed ground terms, hash-consed.
struct Closed {
  bool nonterminal = false;
  int id = 0;
  std::vector<int> args;
  auto operator<=>(const Closed&) const = default;
};

class Product {
 public:
  Product(const OScheme& s, const OAutomaton& m, int max_configs, int max_term_size)
      : s_(s), m_(m), max_configs_(max_configs), max_size_(max_term_size) {}

  Outcome run() {
    int root_term = intern({true, 0, {}});
    int root = config(root_term, m_.initial);
    while (!work_.empty() && !too_large_) {
      auto [node, term, q] = work_.back();
      work_.pop_back();
      expand(node, term, q);
    }
    if (too_large_) return Outcome::TooLarge;
    return refuter_region()[static_cast<std::size_t>(root)] ? Outcome::Reject : Outcome::Accept;
  }

 private:
  int intern(Closed c) {
    auto it = ids_.find(c);
    if (it != ids_.end()) return it->second;
    int size = 1;
    for (int a : c.args) size += sizes_[static_cast<std::size_t>(a)];
    if (size > max_size_) too_large_ = true;
    int id = static_cast<int>(terms_.size());
    terms_.push_back(c);
    sizes_.push_back(size);
    ids_.emplace(std::move(c), id);
    return id;
  }

  int instantiate(const OTerm& t, const std::vector<int>& params) {
    if (t.kind == OTerm::Param) return params[static_cast<std::size_t>(t.id)];
    Closed c{t.kind == OTerm::Nonterminal, t.id, {}};
    for (const auto& a : t.args) c.args.push_back(instantiate(a, params));
    return intern(std::move(c));
  }

  int new_node(bool verifier, int parity) {
    verifier_.push_back(verifier);
    odd_.push_back(parity == 1);
    succ_.emplace_back();
    return static_cast<int>(succ_.size()) - 1;
  }

  int config(int term, int q) {
    auto key = std::make_pair(term, q);
    auto it = configs_.find(key);
    if (it != configs_.end()) return it->second;
    if (static_cast<int>(configs_.size()) >= max_configs_) too_large_ = true;
    int node = new_node(true, m_.priority[static_cast<std::size_t>(q)] % 2);
    configs_.emplace(key, node);
    work_.push_back({node, term, q});
    return node;
  }

  int formula_node(const OFormula& f, const Closed& t, int q) {
    int parity = m_.priority[static_cast<std::size_t>(q)] % 2;
    switch (f.kind) {
      case OFormula::True: return new_node(false, parity);
      case OFormula::False: return new_node(true, parity);
      case OFormula::Atom: return config(t.args[static_cast<std::size_t>(f.direction - 1)], f.state);
      case OFormula::And:
      case OFormula::Or: {
        int node = new_node(f.kind == OFormula::Or, parity);
        for (const auto& p : f.parts) {
          int child = formula_node(p, t, q);
          succ_[static_cast<std::size_t>(node)].push_back(child);
        }
        return node;
      }
    }
    return -1;
  }

  void expand(int node, int term, int q) {
    Closed t = terms_[static_cast<std::size_t>(term)];
    int next;
    if (t.nonterminal) {
      next = config(instantiate(s_.body[static_cast<std::size_t>(t.id)], t.args), q);
    } else {
      next = formula_node(m_.delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(t.id)], t, q);
    }
    succ_[static_cast<std::size_t>(node)].push_back(next);
  }

  // Refuter wins when it can visit odd nodes forever or strand the verifier:
  // nu Z. mu Y. (Odd & Pre(Z)) | Pre(Y), Pre the refuter's controllable
  // predecessor.
  std::vector<bool> refuter_region() const {
    const std::size_t n = succ_.size();
    auto pre = [&](const std::vector<bool>& x) {
      std::vector<bool> out(n, false);
      for (std::size_t v = 0; v < n; ++v) {
        const auto& s = succ_[v];
        bool some = std::any_of(s.begin(), s.end(), [&](int w) { return x[static_cast<std::size_t>(w)]; });
        bool all = std::all_of(s.begin(), s.end(), [&](int w) { return x[static_cast<std::size_t>(w)]; });
        out[v] = verifier_[v] ? all : some;
      }
      return out;
    };
    std::vector<bool> z(n, true);
    for (;;) {
      std::vector<bool> pre_z = pre(z);
      std::vector<bool> y(n, false);
      for (;;) {
        std::vector<bool> pre_y = pre(y);
        std::vector<bool> next(n);
        for (std::size_t v = 0; v < n; ++v) next[v] = (odd_[v] && pre_z[v]) || pre_y[v];
        if (next == y) break;
        y = std::move(next);
      }
      if (y == z) return z;
      z = std::move(y);
    }
  }

  struct Work {
    int node, term, q;
  };

  const OScheme& s_;
  const OAutomaton& m_;
  int max_configs_;
  int max_size_;
  bool too_large_ = false;
  std::vector<Closed> terms_;
  std::vector<int> sizes_;
  std::map<Closed, int> ids_;
  std::map<std::pair<int, int>, int> configs_;
  std::vector<Work> work_;
  std::vector<bool> verifier_, odd_;
  std::vector<std::vector<int>> succ_;
};

}  // namespace

Outcome decide(const OScheme& scheme, const OAutomaton& awt, int max_configs, int max_term_size) {
  return Product(scheme, awt, max_configs, max_term_size).run();
}

}  // namespace oracle
