#include "horsmc/ctl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <tuple>

namespace horsmc {

using K = CtlFormula::Kind;

namespace {

bool is_binary(K k) { return k == K::And || k == K::Or || k == K::Implies || k >= K::AU; }

std::string_view keyword(K k) {
  switch (k) {
    case K::AX: return "AX";
    case K::EX: return "EX";
    case K::AF: return "AF";
    case K::EF: return "EF";
    case K::AG: return "AG";
    case K::EG: return "EG";
    case K::AU: return "AU";
    case K::EU: return "EU";
    case K::AR: return "AR";
    case K::ER: return "ER";
    case K::And: return "And";
    case K::Or: return "Or";
    case K::Implies: return "Implies";
    default: return "";
  }
}

}  // namespace

CtlFormula CtlFormula::truth(bool value) {
  CtlFormula f;
  f.kind_ = value ? K::True : K::False;
  return f;
}

CtlFormula CtlFormula::atom(std::string name, bool negated) {
  CtlFormula f;
  f.kind_ = negated ? K::NotAtom : K::Atom;
  f.name_ = std::move(name);
  return f;
}

CtlFormula CtlFormula::binary(Kind kind, CtlFormula lhs, CtlFormula rhs) {
  if (!is_binary(kind)) throw Error("not a binary CTL operator");
  CtlFormula f;
  f.kind_ = kind;
  f.children_ = {std::move(lhs), std::move(rhs)};
  return f;
}

CtlFormula CtlFormula::unary(Kind kind, CtlFormula operand) {
  if (kind < K::AX || kind > K::EG) throw Error("not a unary CTL operator");
  CtlFormula f;
  f.kind_ = kind;
  f.children_ = {std::move(operand)};
  return f;
}

CtlFormula CtlFormula::negate() const {
  switch (kind_) {
    case K::True: return truth(false);
    case K::False: return truth(true);
    case K::Atom: return atom(name_, true);
    case K::NotAtom: return atom(name_, false);
    case K::And: return binary(K::Or, child(0).negate(), child(1).negate());
    case K::Or: return binary(K::And, child(0).negate(), child(1).negate());
    case K::Implies: return binary(K::And, child(0), child(1).negate());
    case K::AX: return unary(K::EX, child(0).negate());
    case K::EX: return unary(K::AX, child(0).negate());
    case K::AF: return unary(K::EG, child(0).negate());
    case K::EF: return unary(K::AG, child(0).negate());
    case K::AG: return unary(K::EF, child(0).negate());
    case K::EG: return unary(K::AF, child(0).negate());
    case K::AU: return binary(K::ER, child(0).negate(), child(1).negate());
    case K::EU: return binary(K::AR, child(0).negate(), child(1).negate());
    case K::AR: return binary(K::EU, child(0).negate(), child(1).negate());
    case K::ER: return binary(K::AU, child(0).negate(), child(1).negate());
  }
  return *this;
}

std::string CtlFormula::str() const {
  switch (kind_) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: return name_;
    case K::NotAtom: return "!" + name_;
    case K::And: return "(" + child(0).str() + " /\\ " + child(1).str() + ")";
    case K::Or: return "(" + child(0).str() + " \\/ " + child(1).str() + ")";
    case K::Implies: return "(" + child(0).str() + " => " + child(1).str() + ")";
    case K::AU:
    case K::EU:
    case K::AR:
    case K::ER: {
      std::string q = kind_ == K::AU || kind_ == K::AR ? "A" : "E";
      std::string op = kind_ == K::AU || kind_ == K::EU ? " U " : " R ";
      return q + " (" + child(0).str() + op + child(1).str() + ")";
    }
    default:
      return std::string(keyword(kind_)) + " " + child(0).str();
  }
}

std::string CtlFormula::ast() const {
  switch (kind_) {
    case K::True: return "True";
    case K::False: return "False";
    case K::Atom: return "Atom " + name_;
    case K::NotAtom: return "Not(Atom " + name_ + ")";
    default: {
      std::string out(keyword(kind_));
      out += "(";
      for (std::size_t i = 0; i < children_.size(); ++i) out += (i ? ", " : "") + children_[i].ast();
      return out + ")";
    }
  }
}

void CtlFormula::collect_atoms(std::vector<std::string>& out) const {
  if (kind_ == K::Atom || kind_ == K::NotAtom) out.push_back(name_);
  for (const auto& c : children_) c.collect_atoms(out);
}

bool CtlFormula::operator==(const CtlFormula& other) const {
  return kind_ == other.kind_ && name_ == other.name_ && children_ == other.children_;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct CtlToken {
  std::string text;  // empty at end of input
  SourcePos pos;
  bool ident = false;
};

std::vector<CtlToken> lex_ctl(std::string_view text, SourcePos origin) {
  static const std::vector<std::string> symbols = {"/\\", "\\/", "&&", "||", "=>", "->", "&", "|",
                                                   "!",   "~",   "(",  ")",  "[",  "]"};
  std::vector<CtlToken> out;
  int line = origin.line, col = origin.column;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    SourcePos pos{line, col};
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\''))
        ++j;
      out.push_back({std::string(text.substr(i, j - i)), pos, true});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& s : symbols)
      if (text.substr(i, s.size()) == s) {
        out.push_back({s, pos, false});
        col += static_cast<int>(s.size());
        i += s.size();
        matched = true;
        break;
      }
    if (!matched) throw ParseError(pos, std::string("unexpected character '") + c + "' in formula");
  }
  out.push_back({"", {line, col}, false});
  return out;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {"AX", "EX", "AF", "EF", "AG", "EG", "A", "E",
                                              "U",  "R",  "true", "false", "not"};
  return words;
}

class CtlParser {
 public:
  explicit CtlParser(std::vector<CtlToken> toks) : toks_(std::move(toks)) {}

  CtlFormula parse() {
    CtlFormula f = implication();
    if (!peek().text.empty()) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  // Result of the U/R level: either a plain formula or a pending path body.
  struct PathBody {
    bool is_path = false;
    bool until = true;
    CtlFormula lhs, rhs;
    SourcePos pos;
  };

  const CtlToken& peek() const { return toks_[pos_]; }
  bool at(std::string_view s) const { return !peek().text.empty() && peek().text == s; }
  CtlToken take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().pos, msg); }
  void expect(std::string_view s) {
    if (!at(s)) fail("expected '" + std::string(s) + "'" + (peek().text.empty() ? " at end of formula" : ""));
    take();
  }

  CtlFormula plain(PathBody b) {
    if (b.is_path) throw ParseError(b.pos, "U/R must appear directly inside A(...) or E(...)");
    return std::move(b.lhs);
  }

  CtlFormula implication() {
    CtlFormula lhs = disjunction();
    if (at("=>") || at("->")) {
      take();
      return CtlFormula::binary(K::Implies, std::move(lhs), implication());
    }
    return lhs;
  }

  CtlFormula disjunction() {
    CtlFormula f = conjunction();
    while (at("\\/") || at("|") || at("||")) {
      take();
      f = CtlFormula::binary(K::Or, std::move(f), conjunction());
    }
    return f;
  }

  CtlFormula conjunction() {
    CtlFormula f = plain(until_level());
    while (at("/\\") || at("&") || at("&&")) {
      take();
      f = CtlFormula::binary(K::And, std::move(f), plain(until_level()));
    }
    return f;
  }

  PathBody until_level() {
    PathBody b;
    b.pos = peek().pos;
    b.lhs = unary();
    if (at("U") || at("R")) {
      b.is_path = true;
      b.until = take().text == "U";
      b.rhs = unary();
    }
    return b;
  }

  // Contents of A(...) / E(...): an implication-level formula whose top is U/R.
  PathBody path_body() {
    bool square = at("[");
    if (!square && !at("(")) fail("expected '(' after path quantifier");
    take();
    PathBody b = until_level();
    if (!b.is_path) fail("expected 'U' or 'R' inside path quantifier");
    expect(square ? "]" : ")");
    return b;
  }

  CtlFormula unary() {
    const CtlToken& t = peek();
    if (t.text.empty()) fail("unexpected end of formula");
    if (at("!") || at("~") || at("not")) {
      take();
      return unary().negate();
    }
    if (at("(")) {
      take();
      CtlFormula f = implication();
      expect(")");
      return f;
    }
    if (!t.ident) fail("unexpected '" + t.text + "'");
    static const std::vector<std::pair<std::string, K>> unary_ops = {
        {"AX", K::AX}, {"EX", K::EX}, {"AF", K::AF}, {"EF", K::EF}, {"AG", K::AG}, {"EG", K::EG}};
    for (const auto& [word, kind] : unary_ops)
      if (t.text == word) {
        take();
        return CtlFormula::unary(kind, unary());
      }
    if (t.text == "A" || t.text == "E") {
      bool universal = take().text == "A";
      PathBody b = path_body();
      K kind = universal ? (b.until ? K::AU : K::AR) : (b.until ? K::EU : K::ER);
      return CtlFormula::binary(kind, std::move(b.lhs), std::move(b.rhs));
    }
    if (t.text == "true" || t.text == "false") return CtlFormula::truth(take().text == "true");
    if (reserved().count(t.text)) fail("unexpected '" + t.text + "'");
    if (std::isupper(static_cast<unsigned char>(t.text[0])))
      fail("atomic proposition '" + t.text + "' must be a lowercase terminal name");
    return CtlFormula::atom(take().text);
  }

  std::vector<CtlToken> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

CtlFormula parse_ctl(std::string_view text, SourcePos origin) {
  return CtlParser(lex_ctl(text, origin)).parse();
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

enum class Mode { All, Some };

class CtlCompiler {
 public:
  CtlCompiler(const std::vector<TerminalSymbol>& alphabet, const CtlCompileOptions& opts)
      : alphabet_(alphabet) {
    auto index_of = [&](const std::string& name) -> int {
      for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i].name == name) return static_cast<int>(i);
      return -1;
    };
    fair_.assign(alphabet_.size(), false);
    branch_.assign(alphabet_.size(), false);
    for (const auto& n : opts.fair) {
      int i = index_of(n);
      if (i < 0) throw UnknownAtom(n);
      fair_[static_cast<std::size_t>(i)] = true;
    }
    for (const auto& n : opts.branch) {
      int i = index_of(n);
      if (i < 0) throw UnknownSymbol(n);
      branch_[static_cast<std::size_t>(i)] = true;
    }
    has_fairness_ = !opts.fair.empty();
  }

  Awt run(const CtlFormula& f) {
    std::vector<std::string> atoms;
    f.collect_atoms(atoms);
    for (const auto& a : atoms)
      if (std::none_of(alphabet_.begin(), alphabet_.end(), [&](const TerminalSymbol& t) { return t.name == a; }))
        throw UnknownAtom(a);

    state_of(Key{f.str(), Mode::All, false}, f);
    std::vector<std::vector<std::optional<Formula>>> table;
    for (std::size_t s = 0; s < states_.size(); ++s) {
      std::vector<std::optional<Formula>> row;
      for (std::size_t a = 0; a < alphabet_.size(); ++a) row.emplace_back(transition(s, a));
      table.push_back(std::move(row));
    }
    std::vector<std::string> names;
    std::vector<int> priorities;
    for (std::size_t s = 0; s < states_.size(); ++s) {
      names.push_back("q" + std::to_string(s));
      priorities.push_back(priority(states_[s]));
    }
    Awt awt(std::move(names), alphabet_, 0, std::move(priorities), std::move(table));
    validate(awt);
    return awt;
  }

 private:
  struct Key {
    std::string formula;
    Mode mode;
    bool escape;  // fairness escape for an AU obligation
    bool operator<(const Key& o) const {
      return std::tie(formula, mode, escape) < std::tie(o.formula, o.mode, o.escape);
    }
  };
  struct State {
    CtlFormula formula;
    Mode mode;
    bool escape;
  };

  int state_of(const Key& key, const CtlFormula& f) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(states_.size());
    index_.emplace(key, id);
    states_.push_back({f, key.mode, key.escape});
    return id;
  }

  int target(const CtlFormula& f, Mode mode) { return state_of(Key{f.str(), mode, false}, f); }

  Formula next(const CtlFormula& f, Mode mode, std::size_t symbol) {
    int ar = alphabet_[symbol].arity;
    int q = target(f, mode);
    std::vector<Formula> parts;
    for (int i = 1; i <= ar; ++i) parts.push_back(Formula::atom(i, q));
    return mode == Mode::All ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
  }

  // Until/release unfolding at a non-branching node.
  Formula fixpoint(const CtlFormula& self, bool until, const CtlFormula& f, const CtlFormula& g,
                   Mode mode, std::size_t a) {
    Formula lf = local(f, a), lg = local(g, a);
    // A leaf ends the path: the pending obligation must be met here.
    if (alphabet_[a].arity == 0) return lg;
    Formula step = next(self, mode, a);
    if (!until) return Formula::conj({lg, Formula::disj({lf, step})});
    Formula out = Formula::disj({lg, Formula::conj({lf, step})});
    if (mode == Mode::All && has_fairness_ && fair_[a]) {
      int esc = state_of(Key{self.str(), Mode::All, true}, self);
      std::vector<Formula> parts{lf};
      for (int i = 1; i <= alphabet_[a].arity; ++i) parts.push_back(Formula::atom(i, esc));
      out = Formula::disj({out, Formula::conj(std::move(parts))});
    }
    return out;
  }

  // Value of `f` at a non-branching node labelled `a`.
  Formula local(const CtlFormula& f, std::size_t a) {
    static const CtlFormula tt = CtlFormula::truth(true), ff = CtlFormula::truth(false);
    switch (f.kind()) {
      case K::True: return Formula::top();
      case K::False: return Formula::bottom();
      case K::Atom: return alphabet_[a].name == f.name() ? Formula::top() : Formula::bottom();
      case K::NotAtom: return alphabet_[a].name == f.name() ? Formula::bottom() : Formula::top();
      case K::And: return Formula::conj({local(f.child(0), a), local(f.child(1), a)});
      case K::Or: return Formula::disj({local(f.child(0), a), local(f.child(1), a)});
      case K::Implies: return Formula::disj({local(f.child(0).negate(), a), local(f.child(1), a)});
      case K::AX: return next(f.child(0), Mode::All, a);
      case K::EX: return next(f.child(0), Mode::Some, a);
      case K::AF: return fixpoint(f, true, tt, f.child(0), Mode::All, a);
      case K::EF: return fixpoint(f, true, tt, f.child(0), Mode::Some, a);
      case K::AG: return fixpoint(f, false, ff, f.child(0), Mode::All, a);
      case K::EG: return fixpoint(f, false, ff, f.child(0), Mode::Some, a);
      case K::AU: return fixpoint(f, true, f.child(0), f.child(1), Mode::All, a);
      case K::EU: return fixpoint(f, true, f.child(0), f.child(1), Mode::Some, a);
      case K::AR: return fixpoint(f, false, f.child(0), f.child(1), Mode::All, a);
      case K::ER: return fixpoint(f, false, f.child(0), f.child(1), Mode::Some, a);
    }
    return Formula::bottom();
  }

  // Operands of an until obligation, for the escape state.
  static std::pair<CtlFormula, CtlFormula> until_operands(const CtlFormula& f) {
    if (f.kind() == K::AF) return {CtlFormula::truth(true), f.child(0)};
    return {f.child(0), f.child(1)};
  }

  Formula transition(std::size_t s, std::size_t a) {
    State st = states_[s];
    int q = static_cast<int>(s);
    int ar = alphabet_[a].arity;
    if (branch_[a]) {
      std::vector<Formula> parts;
      for (int i = 1; i <= ar; ++i) parts.push_back(Formula::atom(i, q));
      return st.mode == Mode::All ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    if (!st.escape) return local(st.formula, a);
    // Escape: the obligation is met, or the path stays within F.
    auto [f, g] = until_operands(st.formula);
    Formula out = local(g, a);
    if (fair_[a]) {
      std::vector<Formula> parts{local(f, a)};
      for (int i = 1; i <= ar; ++i) parts.push_back(Formula::atom(i, q));
      out = Formula::disj({out, Formula::conj(std::move(parts))});
    }
    return out;
  }

  static int priority(const State& s) {
    if (s.escape) return 0;
    switch (s.formula.kind()) {
      case K::AF:
      case K::EF:
      case K::AU:
      case K::EU:
        return 1;
      case K::AG:
      case K::EG:
      case K::AR:
      case K::ER:
        return 0;
      default:
        // Only reaches itself through branching labels: an endless run of
        // them has no next observable node, which AX accepts and EX rejects.
        return s.mode == Mode::All ? 0 : 1;
    }
  }

  std::vector<TerminalSymbol> alphabet_;
  std::vector<bool> fair_, branch_;
  bool has_fairness_ = false;
  std::map<Key, int> index_;
  std::deque<State> states_;
};

}  // namespace

Awt compile_to_awt(const CtlFormula& f, const std::vector<TerminalSymbol>& alphabet,
                   const CtlCompileOptions& opts) {
  return CtlCompiler(alphabet, opts).run(f);
}

Awt compile_to_awt(const CtlFormula& f, const std::map<std::string, int>& alphabet,
                   const CtlCompileOptions& opts) {
  std::vector<TerminalSymbol> symbols;
  for (const auto& [name, arity] : alphabet) symbols.push_back({name, arity});
  return compile_to_awt(f, symbols, opts);
}

}  // namespace horsmc
