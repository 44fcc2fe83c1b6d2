#include <algorithm>
#include <set>

#include "horsmc/typing.hpp"

namespace horsmc {

namespace {

// Bound on intermediate typings of one subterm.
constexpr std::size_t kIntermediateCap = 4096;

// An occurrence used by a body typing: a parameter (var) or a nonterminal.
struct Use {
  bool nonterminal = false;
  int index = 0;
  int type = 0;
  int tag = 0;
  auto operator<=>(const Use&) const = default;
};

using Uses = std::vector<Use>;  // sorted, duplicate-free

void normalize(Uses& u) {
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
}

class BodyChecker {
 public:
  BodyChecker(const Scheme& scheme, const Awt& awt, TypeTable& types, const Environment& env)
      : scheme_(scheme), awt_(awt), types_(types), env_types_(static_cast<std::size_t>(scheme.num_nonterminals())) {
    for (const auto& b : env.bindings) env_types_[static_cast<std::size_t>(b.nonterminal)].push_back(b.type);
    for (std::size_t i = 0; i < scheme.terminals().size(); ++i)
      symbol_of_.push_back(*awt.find_symbol(scheme.terminals()[i].name));
  }

  std::vector<Derivation> derive(const Binding& b, bool& capped) {
    const Rule& rule = scheme_.rule(b.nonterminal);
    const int np = static_cast<int>(rule.params.size());
    if (types_.arity(b.type) < np) return {};
    declared_.assign(rule.params.size(), {});
    var_types_.assign(rule.params.size(), {});
    for (int j = 0; j < np; ++j) {
      declared_[static_cast<std::size_t>(j)] = types_.node(b.type).args[static_cast<std::size_t>(j)];
      for (const auto& m : declared_[static_cast<std::size_t>(j)]) {
        auto& vt = var_types_[static_cast<std::size_t>(j)];
        if (std::find(vt.begin(), vt.end(), m.type) == vt.end()) vt.push_back(m.type);
      }
    }
    memo_.clear();
    capped_ = false;
    std::vector<Uses> typings = check(rule.body, types_.drop(b.type, np));

    std::vector<Derivation> out;
    for (const Uses& u : typings) {
      std::vector<Intersection> seen(static_cast<std::size_t>(np));
      Derivation d;
      for (const Use& x : u) {
        if (x.nonterminal)
          d.push_back({{x.index, x.type}, x.tag});
        else
          seen[static_cast<std::size_t>(x.index)].push_back({x.type, x.tag});
      }
      bool exact = true;
      for (int j = 0; j < np && exact; ++j)
        exact = make_intersection(seen[static_cast<std::size_t>(j)]) == declared_[static_cast<std::size_t>(j)];
      if (!exact) continue;
      std::sort(d.begin(), d.end());
      out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(), [](const Derivation& x, const Derivation& y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<Derivation> minimal;
    for (auto& d : out) {
      bool dominated = std::any_of(minimal.begin(), minimal.end(), [&](const Derivation& m) {
        return std::includes(d.begin(), d.end(), m.begin(), m.end());
      });
      if (!dominated) minimal.push_back(std::move(d));
    }
    if (minimal.size() > static_cast<std::size_t>(kMaxDerivations)) {
      minimal.resize(static_cast<std::size_t>(kMaxDerivations));
      capped_ = true;
    }
    capped = capped_;
    return minimal;
  }

 private:
  static std::vector<Uses> raise(std::vector<Uses> in, int m) {
    if (m == 0) return in;
    for (auto& u : in) {
      for (auto& x : u) x.tag = std::max(x.tag, m);
      normalize(u);
    }
    return in;
  }

  // A use that can no longer match its parameter's declared members.
  bool impossible(const Use& x) const {
    if (x.nonterminal || x.tag == 0) return false;
    const auto& decl = declared_[static_cast<std::size_t>(x.index)];
    return !std::binary_search(decl.begin(), decl.end(), TypeMember{x.type, x.tag});
  }

  // Deduplicates and drops typings that another typing with the same
  // parameter uses improves on.
  void prune(std::vector<Uses>& v) {
    v.erase(std::remove_if(v.begin(), v.end(),
                           [&](const Uses& u) { return std::any_of(u.begin(), u.end(), [&](const Use& x) { return impossible(x); }); }),
            v.end());
    std::sort(v.begin(), v.end(), [](const Uses& x, const Uses& y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    v.erase(std::unique(v.begin(), v.end()), v.end());
    auto split = [](const Uses& u) {
      std::pair<Uses, Uses> p;
      for (const Use& x : u) (x.nonterminal ? p.second : p.first).push_back(x);
      return p;
    };
    std::vector<std::pair<Uses, Uses>> kept;
    std::vector<Uses> out;
    for (auto& u : v) {
      auto p = split(u);
      bool dominated = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
        return k.first == p.first && std::includes(p.second.begin(), p.second.end(), k.second.begin(), k.second.end());
      });
      if (dominated) continue;
      kept.push_back(std::move(p));
      out.push_back(std::move(u));
      if (out.size() >= kIntermediateCap) {
        capped_ = true;
        break;
      }
    }
    v = std::move(out);
  }

  void product(std::vector<Uses>& acc, const std::vector<Uses>& next) {
    std::vector<Uses> out;
    for (const auto& a : acc)
      for (const auto& b : next) {
        Uses u = a;
        u.insert(u.end(), b.begin(), b.end());
        normalize(u);
        out.push_back(std::move(u));
      }
    prune(out);
    acc = std::move(out);
  }

  // Typings of `t` at `theta` as sets of occurrence uses.
  std::vector<Uses> check(const TermPtr& t, int theta) {
    auto key = std::make_pair(t.get(), theta);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    auto [head, args] = decompose(t);
    const int k = static_cast<int>(args.size());
    std::vector<Uses> results;

    if (head->kind() == TermKind::Terminal) {
      int sym = symbol_of_[static_cast<std::size_t>(head->index())];
      int ar = awt_.arity(sym);
      if (k <= ar && types_.arity(theta) == ar - k) {
        int q = types_.result(theta);
        for (const Clause& c : awt_.choices(q, sym)) {
          bool ok = true;
          for (int i = k + 1; i <= ar && ok; ++i) {
            std::vector<TypeMember> expected;
            for (const Atom& a : c)
              if (a.direction == i) expected.push_back({types_.atomic(a.state), awt_.parity(a.state)});
            ok = make_intersection(std::move(expected)) == types_.node(theta).args[static_cast<std::size_t>(i - k - 1)];
          }
          if (!ok) continue;
          std::vector<Uses> acc{Uses{}};
          for (const Atom& a : c) {
            if (a.direction > k) continue;
            auto sub = raise(check(args[static_cast<std::size_t>(a.direction - 1)], types_.atomic(a.state)),
                             awt_.parity(a.state));
            product(acc, sub);
            if (acc.empty()) break;
          }
          results.insert(results.end(), acc.begin(), acc.end());
        }
      }
    } else {
      bool nt = head->kind() == TermKind::Nonterminal;
      const auto& candidates = nt ? env_types_[static_cast<std::size_t>(head->index())]
                                  : var_types_[static_cast<std::size_t>(head->index())];
      for (int sigma : candidates) {
        if (types_.arity(sigma) != k + types_.arity(theta) || types_.drop(sigma, k) != theta) continue;
        std::vector<Uses> acc{Uses{{nt, head->index(), sigma, awt_.parity(types_.result(sigma))}}};
        for (int i = 0; i < k && !acc.empty(); ++i)
          for (const TypeMember& m : types_.node(sigma).args[static_cast<std::size_t>(i)]) {
            product(acc, raise(check(args[static_cast<std::size_t>(i)], m.type), m.tag));
            if (acc.empty()) break;
          }
        results.insert(results.end(), acc.begin(), acc.end());
      }
    }
    prune(results);
    memo_.emplace(key, results);
    return results;
  }

  const Scheme& scheme_;
  const Awt& awt_;
  TypeTable& types_;
  std::vector<std::vector<int>> env_types_;
  std::vector<int> symbol_of_;
  std::vector<Intersection> declared_;
  std::vector<std::vector<int>> var_types_;
  std::map<std::pair<const Term*, int>, std::vector<Uses>> memo_;
  bool capped_ = false;
};

}  // namespace

std::vector<Derivation> derive(const Scheme& scheme, const Awt& awt, TypeTable& types, const Binding& b,
                               const Environment& env, bool* capped) {
  bool c = false;
  auto out = BodyChecker(scheme, awt, types, env).derive(b, c);
  if (capped) *capped = c;
  return out;
}

CheckResult type_check(const Scheme& scheme, const Awt& awt, TypeTable& types, const Environment& env) {
  std::set<Binding> alive(env.bindings.begin(), env.bindings.end());
  auto alive_env = [&] {
    Environment e;
    for (const auto& b : env.bindings)
      if (alive.count(b)) e.bindings.push_back(b);
    return e;
  };
  std::map<Binding, std::vector<Derivation>> cached;
  std::map<Binding, bool> was_capped;
  auto supported = [&](const Derivation& d) {
    return std::all_of(d.begin(), d.end(), [&](const Assumption& a) { return alive.count(a.binding) > 0; });
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& b : env.bindings) {
      if (!alive.count(b)) continue;
      auto it = cached.find(b);
      if (it != cached.end()) {
        auto& ds = it->second;
        ds.erase(std::remove_if(ds.begin(), ds.end(), [&](const Derivation& d) { return !supported(d); }), ds.end());
        if (!ds.empty()) continue;
        if (!was_capped[b]) {
          alive.erase(b);
          changed = true;
          continue;
        }
      }
      bool capped = false;
      auto ds = derive(scheme, awt, types, b, alive_env(), &capped);
      if (ds.empty()) {
        alive.erase(b);
        changed = true;
        continue;
      }
      cached[b] = std::move(ds);
      was_capped[b] = capped;
    }
  }

  // Final derivation sets against the surviving environment.
  CheckResult out;
  changed = true;
  while (changed) {
    changed = false;
    out.derivations.clear();
    out.diagnostics.clear();
    Environment current = alive_env();
    for (const auto& b : current.bindings) {
      bool capped = false;
      auto ds = derive(scheme, awt, types, b, current, &capped);
      if (ds.empty()) {
        alive.erase(b);
        changed = true;
        continue;
      }
      if (capped)
        out.diagnostics.push_back("derivations of " + binding_str(b, scheme, types, awt) + " truncated at " +
                                  std::to_string(kMaxDerivations));
      out.derivations.emplace(b, std::move(ds));
    }
  }
  out.consistent = alive_env();
  return out;
}

}  // namespace horsmc
