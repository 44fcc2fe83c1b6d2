#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "horsmc/ctl.hpp"
#include "horsmc/driver.hpp"
#include "horsmc/format.hpp"
#include "oracle.hpp"

using namespace horsmc;

namespace {

std::map<std::string, int> support_alphabet() {
  std::map<std::string, int> out;
  for (const auto& [name, arity] : oracle::kAlphabet) out[name] = arity;
  return out;
}

std::string fixture_text(const std::string& name) { return read_file(std::string(HORSMC_FIXTURES) + "/" + name); }

// The value tree of an order-0 scheme is the unfolding of a finite graph
// whose nodes are the terminal-headed subterms of rule bodies.
struct TreeGraph {
  std::vector<std::string> label;
  std::vector<std::vector<int>> succ;
  int root = -1;
};

std::optional<TreeGraph> tree_graph(const oracle::OScheme& s) {
  TreeGraph g;
  std::map<const oracle::OTerm*, int> ids;
  bool productive = true;
  std::function<int(const oracle::OTerm&)> node_of = [&](const oracle::OTerm& t0) -> int {
    const oracle::OTerm* t = &t0;
    std::vector<bool> seen(s.body.size(), false);
    while (t->kind == oracle::OTerm::Nonterminal) {
      if (seen[static_cast<std::size_t>(t->id)]) {
        productive = false;
        return -1;
      }
      seen[static_cast<std::size_t>(t->id)] = true;
      t = &s.body[static_cast<std::size_t>(t->id)];
    }
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(g.label.size());
    ids[t] = id;
    g.label.push_back(oracle::kAlphabet[static_cast<std::size_t>(t->id)].first);
    g.succ.emplace_back();
    for (const auto& a : t->args) {
      int c = node_of(a);
      g.succ[static_cast<std::size_t>(id)].push_back(c);
    }
    return id;
  };
  oracle::OTerm start{oracle::OTerm::Nonterminal, 0, {}};
  g.root = node_of(start);
  if (!productive) return std::nullopt;
  return g;
}

// CTL over the maximal paths of the tree: a leaf ends every path through it.
using Set = std::vector<bool>;

Set holds(const TreeGraph& g, const CtlFormula& f) {
  const std::size_t n = g.label.size();
  auto all_succ = [&](const Set& z, std::size_t v) {
    for (int w : g.succ[v])
      if (!z[static_cast<std::size_t>(w)]) return false;
    return true;
  };
  auto some_succ = [&](const Set& z, std::size_t v) {
    for (int w : g.succ[v])
      if (z[static_cast<std::size_t>(w)]) return true;
    return false;
  };
  auto leaf = [&](std::size_t v) { return g.succ[v].empty(); };
  auto lfp = [&](const std::function<bool(const Set&, std::size_t)>& step) {
    Set z(n, false);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v)
        if (!z[v] && step(z, v)) z[v] = changed = true;
    }
    return z;
  };
  auto gfp = [&](const std::function<bool(const Set&, std::size_t)>& step) {
    Set z(n, true);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v)
        if (z[v] && !step(z, v)) {
          z[v] = false;
          changed = true;
        }
    }
    return z;
  };
  auto neg = [](Set s) {
    s.flip();
    return s;
  };
  using K = CtlFormula::Kind;
  switch (f.kind()) {
    case K::True: return Set(n, true);
    case K::False: return Set(n, false);
    case K::Atom:
    case K::NotAtom: {
      Set s(n);
      for (std::size_t v = 0; v < n; ++v) s[v] = (g.label[v] == f.name()) != (f.kind() == K::NotAtom);
      return s;
    }
    default: break;
  }
  Set a = holds(g, f.child(0));
  Set b = f.children().size() > 1 ? holds(g, f.child(1)) : Set{};
  Set out(n);
  switch (f.kind()) {
    case K::And:
      for (std::size_t v = 0; v < n; ++v) out[v] = a[v] && b[v];
      return out;
    case K::Or:
      for (std::size_t v = 0; v < n; ++v) out[v] = a[v] || b[v];
      return out;
    case K::Implies:
      for (std::size_t v = 0; v < n; ++v) out[v] = !a[v] || b[v];
      return out;
    case K::AX:
      for (std::size_t v = 0; v < n; ++v) out[v] = all_succ(a, v);
      return out;
    case K::EX:
      for (std::size_t v = 0; v < n; ++v) out[v] = some_succ(a, v);
      return out;
    case K::AF: return lfp([&](const Set& z, std::size_t v) { return a[v] || (!leaf(v) && all_succ(z, v)); });
    case K::EF: return lfp([&](const Set& z, std::size_t v) { return a[v] || some_succ(z, v); });
    case K::AG: return gfp([&](const Set& z, std::size_t v) { return a[v] && all_succ(z, v); });
    case K::EG: return gfp([&](const Set& z, std::size_t v) { return a[v] && (leaf(v) || some_succ(z, v)); });
    case K::AU:
      return lfp([&](const Set& z, std::size_t v) { return b[v] || (a[v] && !leaf(v) && all_succ(z, v)); });
    case K::EU: return lfp([&](const Set& z, std::size_t v) { return b[v] || (a[v] && some_succ(z, v)); });
    case K::AR: {
      // A(f R g) = !E(!f U !g)
      Set na = neg(a), nb = neg(b);
      return neg(lfp([&](const Set& z, std::size_t v) { return nb[v] || (na[v] && some_succ(z, v)); }));
    }
    case K::ER: {
      Set na = neg(a), nb = neg(b);
      return neg(lfp([&](const Set& z, std::size_t v) { return nb[v] || (na[v] && !leaf(v) && all_succ(z, v)); }));
    }
    default: break;
  }
  return out;
}

CtlFormula random_ctl(std::mt19937_64& rng, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  using K = CtlFormula::Kind;
  if (depth == 0 || pick(0, 5) == 0) {
    int c = pick(0, 5);
    if (c == 5) return CtlFormula::truth(pick(0, 1) == 0);
    return CtlFormula::atom(oracle::kAlphabet[static_cast<std::size_t>(c % 4)].first, c == 4);
  }
  static const K unary[] = {K::AX, K::EX, K::AF, K::EF, K::AG, K::EG};
  static const K binary[] = {K::And, K::Or, K::Implies, K::AU, K::EU};
  if (pick(0, 1) == 0) return CtlFormula::unary(unary[pick(0, 5)], random_ctl(rng, depth - 1));
  return CtlFormula::binary(binary[pick(0, 4)], random_ctl(rng, depth - 1), random_ctl(rng, depth - 1));
}

// Divergent trees have no CTL meaning, so semantic properties are drawn
// from schemes whose whole value tree is productive.
oracle::OScheme productive_scheme(std::mt19937_64& rng) {
  for (;;) {
    oracle::OScheme s = oracle::random_scheme(rng, 0, 5);
    if (tree_graph(s)) return s;
  }
}

Scheme to_scheme(const oracle::OScheme& s) {
  return Scheme::build(parse_rules(s.text()), support_alphabet());
}

}  // namespace

TEST_CASE("parse the intercept property") {
  CHECK(parse_ctl("AG (closein => AF closeout)").ast() == "AG(Implies(Atom closein, AF(Atom closeout)))");
}

TEST_CASE("parse the unbounded file property") {
  CtlFormula f = parse_ctl("AG (newr => AX (A (read U close)))");
  CHECK(f.ast() == "AG(Implies(Atom newr, AX(AU(Atom read, Atom close))))");
  CHECK(parse_ctl(f.str()) == f);
}

TEST_CASE("constants and spellings") {
  CHECK(parse_ctl("true").kind() == CtlFormula::Kind::True);
  CHECK(parse_ctl("a /\\ b \\/ c") == parse_ctl("(a & b) | c"));
  CHECK(parse_ctl("a => b => c") == parse_ctl("a -> (b -> c)"));
  CHECK(parse_ctl("E [a U b]") == parse_ctl("E (a U b)"));
  CHECK(parse_ctl("not a && b") == parse_ctl("(!a) /\\ b"));
}

TEST_CASE("negation is pushed to the atoms") {
  CHECK(parse_ctl("!(AG a)") == parse_ctl("EF !a"));
  CHECK(parse_ctl("!(A (a U b))") == parse_ctl("E (!a R !b)"));
  CHECK(parse_ctl("!(a => b)") == parse_ctl("a /\\ !b"));
  CHECK(parse_ctl("!!a") == parse_ctl("a"));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_ctl("AG ("), ParseError);
  CHECK_THROWS_AS(parse_ctl("a U b"), ParseError);
  CHECK_THROWS_AS(parse_ctl("AG Close"), ParseError);
  try {
    parse_ctl("AG (a => )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos().column > 1);
  }
}

TEST_CASE("AG true has one accepting state that descends everywhere") {
  Awt a = compile_to_awt(parse_ctl("AG true"), support_alphabet());
  REQUIRE(a.num_states() == 1);
  CHECK(a.parity(0) == 0);
  for (int s = 0; s < static_cast<int>(a.alphabet().size()); ++s) {
    std::vector<Formula> atoms;
    for (int i = 1; i <= a.arity(s); ++i) atoms.push_back(Formula::atom(i, 0));
    CHECK(a.delta(0, s) == Formula::conj(atoms));
  }
}

TEST_CASE("property automaton sizes for the fixtures") {
  ProblemFile intercept = parse_problem(fixture_text("intercept.hors"));
  Awt a = compile_to_awt(parse_ctl(intercept.property->formula), intercept.scheme.terminals(), {});
  CHECK(a.num_states() == 2);
  ProblemFile file = parse_problem(fixture_text("unbounded_file.hors"));
  Awt b = compile_to_awt(parse_ctl(file.property->formula), file.scheme.terminals(),
                         {file.property->fair, file.property->branch});
  CHECK(b.num_states() == 3);
}

TEST_CASE("unknown atoms") {
  CHECK_THROWS_AS(compile_to_awt(parse_ctl("AF nothere"), support_alphabet()), UnknownAtom);
  CHECK_THROWS_AS(compile_to_awt(parse_ctl("AF a"), support_alphabet(), {{"nothere"}, {}}), UnknownAtom);
  CHECK_THROWS_AS(compile_to_awt(parse_ctl("AF a"), support_alphabet(), {{}, {"nothere"}}), UnknownSymbol);
}

TEST_CASE("AF end on finite and infinite branching") {
  Awt af = compile_to_awt(parse_ctl("AF end"), std::map<std::string, int>{{"br", 2}, {"end", 0}});
  Scheme finite = Scheme::build(parse_rules("S -> br end end."), af.alphabet_map());
  Scheme infinite = Scheme::build(parse_rules("S -> br S S."), af.alphabet_map());
  CHECK(check(finite, af).kind == VerdictKind::Yes);
  CHECK(check(infinite, af).kind == VerdictKind::No);

  // Same through the product oracle, with AF end written by hand.
  oracle::OAutomaton m;
  m.priority = {1};
  m.delta = {{{oracle::OFormula::False, 0, 0, {}}, {oracle::OFormula::False, 0, 0, {}},
              {oracle::OFormula::And, 0, 0, {{oracle::OFormula::Atom, 1, 0, {}}, {oracle::OFormula::Atom, 2, 0, {}}}},
              {oracle::OFormula::True, 0, 0, {}}}};
  oracle::OScheme fin{{0}, {oracle::OTerm{oracle::OTerm::Terminal, 2, {{oracle::OTerm::Terminal, 3, {}}, {oracle::OTerm::Terminal, 3, {}}}}}};
  oracle::OScheme inf{{0}, {oracle::OTerm{oracle::OTerm::Terminal, 2, {{oracle::OTerm::Nonterminal, 0, {}}, {oracle::OTerm::Nonterminal, 0, {}}}}}};
  CHECK(oracle::decide(fin, m) == oracle::Outcome::Accept);
  CHECK(oracle::decide(inf, m) == oracle::Outcome::Reject);
}

TEST_CASE("compiled automata are weak") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    CtlFormula f = random_ctl(rng, 4);
    Awt a = compile_to_awt(f, support_alphabet());
    CHECK_NOTHROW(validate(a));
    CHECK_NOTHROW(validate(compile_to_awt(f.negate(), support_alphabet())));
  }
}

TEST_CASE("compiled automata agree with direct CTL labelling on regular trees") {
  std::mt19937_64 rng(31);
  int compared = 0, satisfied = 0;
  while (compared < 150) {
    oracle::OScheme s = oracle::random_scheme(rng, 0, 5);
    auto g = tree_graph(s);
    if (!g) continue;
    CtlFormula f = random_ctl(rng, 3);
    bool expected = holds(*g, f)[static_cast<std::size_t>(g->root)];
    Verdict v = check(to_scheme(s), compile_to_awt(f, support_alphabet()));
    REQUIRE(v.kind != VerdictKind::Unknown);
    INFO("formula: " << f.str() << "\n" << s.text());
    CHECK((v.kind == VerdictKind::Yes) == expected);
    ++compared;
    satisfied += expected;
  }
  CHECK(satisfied > 10);
  CHECK(satisfied < 140);
}

TEST_CASE("negated formula matches the complement automaton") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    oracle::OScheme s = productive_scheme(rng);
    CtlFormula f = random_ctl(rng, 3);
    Scheme g = to_scheme(s);
    Awt a = compile_to_awt(f, support_alphabet());
    Verdict neg = check(g, compile_to_awt(f.negate(), support_alphabet()));
    Verdict comp = check(g, complement(a));
    INFO("formula: " << f.str() << "\n" << s.text());
    REQUIRE(neg.kind != VerdictKind::Unknown);
    CHECK(neg.kind == comp.kind);
  }
}

TEST_CASE("AG f implies f") {
  std::mt19937_64 rng(51);
  int strong = 0;
  for (int i = 0; i < 100; ++i) {
    oracle::OScheme s = productive_scheme(rng);
    CtlFormula f = random_ctl(rng, 2);
    Scheme g = to_scheme(s);
    Verdict all = check(g, compile_to_awt(CtlFormula::unary(CtlFormula::Kind::AG, f), support_alphabet()));
    if (all.kind != VerdictKind::Yes) continue;
    ++strong;
    CHECK(check(g, compile_to_awt(f, support_alphabet())).kind == VerdictKind::Yes);
  }
  CHECK(strong > 0);
}
