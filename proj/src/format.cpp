#include "horsmc/format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace horsmc {

namespace {

// ---------------------------------------------------------------------------
// Block splitting

struct Block {
  std::string_view content;
  SourcePos origin;
};

struct Blocks {
  std::optional<Block> scheme, automaton, property, terminals;
  bool any = false;
};

bool starts_with_at(std::string_view text, std::size_t i, std::string_view word) {
  return text.substr(i, word.size()) == word;
}

Blocks split_blocks(std::string_view text) {
  struct Kind {
    std::string_view begin, end;
    std::optional<Block> Blocks::*slot;
  };
  static const Kind kinds[] = {
      {"%BEGING", "%ENDG", &Blocks::scheme},
      {"%BEGINA", "%ENDA", &Blocks::automaton},
      {"%BEGINP", "%ENDP", &Blocks::property},
      {"%BEGINR", "%ENDR", &Blocks::terminals},
  };
  Blocks out;
  const Kind* open = nullptr;
  std::size_t open_start = 0;
  SourcePos open_pos;
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i, ++col;
      continue;
    }
    if (c == '%') {
      SourcePos here{line, col};
      bool matched = false;
      for (const auto& k : kinds) {
        if (!open && starts_with_at(text, i, k.begin)) {
          if (out.*(k.slot)) throw ParseError(here, "duplicate " + std::string(k.begin) + " block");
          open = &k;
          i += k.begin.size();
          col += static_cast<int>(k.begin.size());
          open_start = i;
          open_pos = {line, col};
          matched = true;
          break;
        }
        if (open == &k && starts_with_at(text, i, k.end)) {
          out.*(k.slot) = Block{text.substr(open_start, i - open_start), open_pos};
          out.any = true;
          open = nullptr;
          i += k.end.size();
          col += static_cast<int>(k.end.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(here, "unexpected block marker");
      continue;
    }
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }
  if (open) throw ParseError(open_pos, "unterminated " + std::string(open->begin) + " block");
  return out;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Number, Arrow, Dot, LParen, RParen, Comma, And, Or, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Arrow: return "'->'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::And: return "'/\\'";
    case Tok::Or: return "'\\/'";
    case Tok::Eq: return "'='";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::vector<Token> lex(std::string_view text, SourcePos origin) {
  std::vector<Token> out;
  int line = origin.line, col = origin.column;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    SourcePos pos{line, col};
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Number, std::string(text.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", pos});
      advance(2);
    } else if (two == "/\\") {
      out.push_back({Tok::And, "/\\", pos});
      advance(2);
    } else if (two == "\\/") {
      out.push_back({Tok::Or, "\\/", pos});
      advance(2);
    } else if (c == '.') {
      out.push_back({Tok::Dot, ".", pos});
      advance(1);
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", pos});
      advance(1);
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", pos});
      advance(1);
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", pos});
      advance(1);
    } else if (c == '=') {
      out.push_back({Tok::Eq, "=", pos});
      advance(1);
    } else {
      throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool done() const { return at(Tok::End); }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  Token expect(Tok t) {
    if (!at(t))
      throw ParseError(peek().pos, "expected " + describe(t) + ", found " +
                                       (peek().text.empty() ? describe(peek().kind) : "'" + peek().text + "'"));
    return take();
  }

  TermPtr term() {
    std::vector<TermPtr> parts;
    while (at(Tok::Ident) || at(Tok::LParen)) parts.push_back(atom());
    if (parts.empty()) throw ParseError(peek().pos, "expected a term");
    return Term::apply(parts.front(), std::vector<TermPtr>(parts.begin() + 1, parts.end()));
  }

  TermPtr atom() {
    if (at(Tok::LParen)) {
      take();
      TermPtr t = term();
      expect(Tok::RParen);
      return t;
    }
    Token id = expect(Tok::Ident);
    if (std::isupper(static_cast<unsigned char>(id.text[0]))) return Term::nonterminal(id.text);
    return Term::terminal(id.text);
  }

  Rule rule() {
    Token head = expect(Tok::Ident);
    Rule r;
    r.head = head.text;
    r.pos = head.pos;
    while (at(Tok::Ident)) r.params.push_back(take().text);
    expect(Tok::Arrow);
    r.body = term();
    expect(Tok::Dot);
    return r;
  }

  int number() {
    Token t = expect(Tok::Number);
    return std::stoi(t.text);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Formula with state names, resolved once all states are known.
struct RawFormula {
  Formula::Kind kind = Formula::Kind::False;
  int direction = 0;
  std::string state;
  SourcePos pos;
  std::vector<RawFormula> children;
};

RawFormula parse_formula_or(Parser& p);

RawFormula parse_formula_atom(Parser& p) {
  RawFormula f;
  f.pos = p.peek().pos;
  if (p.at(Tok::Ident) && (p.peek().text == "true" || p.peek().text == "false")) {
    f.kind = p.take().text == "true" ? Formula::Kind::True : Formula::Kind::False;
    return f;
  }
  p.expect(Tok::LParen);
  if (p.at(Tok::Number)) {
    f.kind = Formula::Kind::Atom;
    f.direction = p.number();
    p.expect(Tok::Comma);
    f.state = p.expect(Tok::Ident).text;
    p.expect(Tok::RParen);
    return f;
  }
  f = parse_formula_or(p);
  p.expect(Tok::RParen);
  return f;
}

RawFormula parse_formula_and(Parser& p) {
  RawFormula first = parse_formula_atom(p);
  if (!p.at(Tok::And)) return first;
  RawFormula f;
  f.kind = Formula::Kind::And;
  f.pos = first.pos;
  f.children.push_back(std::move(first));
  while (p.at(Tok::And)) {
    p.take();
    f.children.push_back(parse_formula_atom(p));
  }
  return f;
}

RawFormula parse_formula_or(Parser& p) {
  RawFormula first = parse_formula_and(p);
  if (!p.at(Tok::Or)) return first;
  RawFormula f;
  f.kind = Formula::Kind::Or;
  f.pos = first.pos;
  f.children.push_back(std::move(first));
  while (p.at(Tok::Or)) {
    p.take();
    f.children.push_back(parse_formula_and(p));
  }
  return f;
}

void collect_states(const RawFormula& f, std::vector<std::string>& states) {
  if (f.kind == Formula::Kind::Atom && std::find(states.begin(), states.end(), f.state) == states.end())
    states.push_back(f.state);
  for (const auto& c : f.children) collect_states(c, states);
}

int max_direction(const RawFormula& f) {
  int d = f.kind == Formula::Kind::Atom ? f.direction : 0;
  for (const auto& c : f.children) d = std::max(d, max_direction(c));
  return d;
}

Formula resolve(const RawFormula& f, const std::vector<std::string>& states) {
  switch (f.kind) {
    case Formula::Kind::True:
      return Formula::top();
    case Formula::Kind::False:
      return Formula::bottom();
    case Formula::Kind::Atom: {
      auto it = std::find(states.begin(), states.end(), f.state);
      return Formula::atom(f.direction, static_cast<int>(it - states.begin()));
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> parts;
      for (const auto& c : f.children) parts.push_back(resolve(c, states));
      return f.kind == Formula::Kind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
  }
  return Formula::bottom();
}

Awt parse_automaton_block(std::string_view text, SourcePos origin, const LoadOptions& opts,
                          const std::map<std::string, int>& extra_alphabet) {
  Parser p(lex(text, origin));
  std::vector<std::string> states;
  auto note_state = [&](const std::string& s) {
    if (std::find(states.begin(), states.end(), s) == states.end()) states.push_back(s);
  };
  std::optional<std::string> initial;
  std::map<std::string, int> priorities;
  std::map<std::string, int> explicit_arity;
  std::vector<std::string> symbols;
  std::map<std::string, int> inferred_arity;
  struct RawTransition {
    std::string state, symbol;
    RawFormula formula;
    SourcePos pos;
  };
  std::vector<RawTransition> transitions;

  while (!p.done()) {
    Token first = p.expect(Tok::Ident);
    if (first.text == "init" && p.at(Tok::Ident) && p.peek(1).kind == Tok::Dot) {
      if (initial) throw ParseError(first.pos, "duplicate init statement");
      initial = p.take().text;
      note_state(*initial);
      p.expect(Tok::Dot);
    } else if (first.text == "priority" && p.at(Tok::Ident) && p.peek(1).kind == Tok::Eq) {
      std::string q = p.take().text;
      p.expect(Tok::Eq);
      priorities[q] = p.number();
      note_state(q);
      p.expect(Tok::Dot);
    } else if (first.text == "arity" && p.at(Tok::Ident) && p.peek(1).kind == Tok::Eq) {
      std::string a = p.take().text;
      p.expect(Tok::Eq);
      explicit_arity[a] = p.number();
      if (std::find(symbols.begin(), symbols.end(), a) == symbols.end()) symbols.push_back(a);
      p.expect(Tok::Dot);
    } else {
      Token sym = p.expect(Tok::Ident);
      p.expect(Tok::Arrow);
      RawTransition t{first.text, sym.text, parse_formula_or(p), first.pos};
      p.expect(Tok::Dot);
      note_state(t.state);
      collect_states(t.formula, states);
      if (std::find(symbols.begin(), symbols.end(), t.symbol) == symbols.end()) symbols.push_back(t.symbol);
      inferred_arity[t.symbol] = std::max(inferred_arity[t.symbol], max_direction(t.formula));
      transitions.push_back(std::move(t));
    }
  }
  if (!initial) {
    if (states.empty()) throw ParseError(origin, "automaton has no states");
    initial = states.front();
  }
  for (const auto& [name, arity] : extra_alphabet)
    if (std::find(symbols.begin(), symbols.end(), name) == symbols.end()) {
      symbols.push_back(name);
      explicit_arity[name] = arity;
    }

  std::vector<TerminalSymbol> alphabet;
  for (const auto& s : symbols) {
    auto it = explicit_arity.find(s);
    alphabet.push_back({s, it != explicit_arity.end() ? it->second : inferred_arity[s]});
  }
  auto symbol_index = [&](const std::string& s) {
    return static_cast<int>(std::find(symbols.begin(), symbols.end(), s) - symbols.begin());
  };

  Awt::TransitionTable table(states.size(), std::vector<std::optional<Formula>>(symbols.size()));
  for (const auto& t : transitions) {
    auto q = static_cast<std::size_t>(std::find(states.begin(), states.end(), t.state) - states.begin());
    auto a = static_cast<std::size_t>(symbol_index(t.symbol));
    if (table[q][a]) throw ParseError(t.pos, "duplicate transition for " + t.state + " on " + t.symbol);
    if (max_direction(t.formula) > alphabet[a].arity)
      throw ParseError(t.pos, "direction exceeds arity " + std::to_string(alphabet[a].arity) + " of '" +
                                  t.symbol + "'");
    table[q][a] = resolve(t.formula, states);
  }
  for (std::size_t q = 0; q < states.size(); ++q)
    for (std::size_t a = 0; a < symbols.size(); ++a)
      if (!table[q][a]) {
        if (!opts.total_default_false) throw MissingTransition(states[q], symbols[a]);
        table[q][a] = Formula::bottom();
      }

  std::vector<int> prio;
  for (const auto& s : states) prio.push_back(priorities.count(s) ? priorities[s] : 0);
  int init = static_cast<int>(std::find(states.begin(), states.end(), *initial) - states.begin());
  Awt awt(std::move(states), std::move(alphabet), init, std::move(prio), std::move(table));
  validate(awt);
  return awt;
}

std::map<std::string, int> parse_terminal_block(std::string_view text, SourcePos origin) {
  Parser p(lex(text, origin));
  std::map<std::string, int> out;
  while (!p.done()) {
    Token name = p.expect(Tok::Ident);
    p.expect(Tok::Arrow);
    out[name.text] = p.number();
    p.expect(Tok::Dot);
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

std::vector<Rule> parse_rules(std::string_view text, SourcePos origin) {
  Blocks blocks = split_blocks(text);
  if (blocks.any) {
    if (!blocks.scheme) throw ParseError(origin, "missing %BEGING block");
    text = blocks.scheme->content;
    origin = blocks.scheme->origin;
  }
  Parser p(lex(text, origin));
  std::vector<Rule> rules;
  while (!p.done()) rules.push_back(p.rule());
  if (rules.empty()) throw ParseError(origin, "scheme has no rules");
  return rules;
}

Scheme parse_scheme(std::string_view text) {
  Blocks blocks = split_blocks(text);
  std::map<std::string, int> declared;
  if (blocks.terminals) declared = parse_terminal_block(blocks.terminals->content, blocks.terminals->origin);
  return Scheme::build(parse_rules(text), declared);
}

Awt parse_automaton(std::string_view text, const LoadOptions& opts,
                    const std::map<std::string, int>& extra_alphabet) {
  Blocks blocks = split_blocks(text);
  SourcePos origin{1, 1};
  if (blocks.any) {
    if (!blocks.automaton) throw ParseError(origin, "missing %BEGINA block");
    text = blocks.automaton->content;
    origin = blocks.automaton->origin;
  }
  return parse_automaton_block(text, origin, opts, extra_alphabet);
}

std::map<std::string, int> parse_alphabet(std::string_view text) {
  Blocks blocks = split_blocks(text);
  if (blocks.scheme) return parse_scheme(text).alphabet();
  if (blocks.terminals) return parse_terminal_block(blocks.terminals->content, blocks.terminals->origin);
  if (blocks.automaton) text = blocks.automaton->content;
  Parser p(lex(text, {1, 1}));
  std::map<std::string, int> out;
  while (!p.done()) {
    Token kw = p.expect(Tok::Ident);
    if (kw.text != "arity") throw ParseError(kw.pos, "expected 'arity <symbol> = <n>.'");
    std::string name = p.expect(Tok::Ident).text;
    p.expect(Tok::Eq);
    out[name] = p.number();
    p.expect(Tok::Dot);
  }
  return out;
}

PropertyBlock parse_property_block(std::string_view text, SourcePos origin) {
  Blocks blocks = split_blocks(text);
  if (blocks.any) {
    if (!blocks.property) throw ParseError(origin, "missing %BEGINP block");
    text = blocks.property->content;
    origin = blocks.property->origin;
  }
  PropertyBlock out;
  int line = origin.line, col = origin.column;
  std::size_t start = 0;
  SourcePos start_pos = origin;
  bool have_formula = false;
  auto flush = [&](std::size_t end) {
    std::string stmt = trim(text.substr(start, end - start));
    if (stmt.empty()) return;
    std::istringstream words(stmt);
    std::string kw;
    words >> kw;
    if (kw == "fair" || kw == "branch") {
      std::string sym;
      auto& list = kw == "fair" ? out.fair : out.branch;
      while (words >> sym) list.push_back(sym);
      return;
    }
    if (have_formula) throw ParseError(start_pos, "property block holds more than one formula");
    have_formula = true;
    out.formula = stmt;
    out.formula_pos = start_pos;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '#') {
      flush(i);
      while (i < text.size() && text[i] != '\n') ++i;
      start = i;
      start_pos = {line, col};
    }
    if (i < text.size() && text[i] == '.') {
      flush(i);
      start = i + 1;
      start_pos = {line, col + 1};
    }
    if (i < text.size() && text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  flush(text.size());
  if (!have_formula) throw ParseError(origin, "property block has no formula");
  return out;
}

ProblemFile parse_problem(std::string_view text, const LoadOptions& opts) {
  Blocks blocks = split_blocks(text);
  if (!blocks.scheme) throw ParseError({1, 1}, "missing %BEGING block");
  if (blocks.automaton && blocks.property)
    throw ParseError(blocks.property->origin, "both an automaton and a property block are present");

  std::map<std::string, int> declared;
  if (blocks.terminals) declared = parse_terminal_block(blocks.terminals->content, blocks.terminals->origin);
  auto rules = parse_rules(blocks.scheme->content, blocks.scheme->origin);

  if (blocks.automaton) {
    Awt awt = parse_automaton_block(blocks.automaton->content, blocks.automaton->origin, opts, declared);
    auto alphabet = awt.alphabet_map();
    for (const auto& [name, arity] : declared)
      if (alphabet.at(name) != arity)
        throw ArityError("terminal '" + name + "' declared with arity " + std::to_string(arity) +
                         " but the automaton uses arity " + std::to_string(alphabet.at(name)));
    Scheme scheme = Scheme::build(rules, alphabet);
    for (const auto& t : scheme.terminals())
      if (!alphabet.count(t.name))
        throw AlphabetMismatch("terminal '" + t.name + "' is missing from the automaton alphabet");
    return {std::move(scheme), std::move(awt), std::nullopt};
  }

  Scheme scheme = Scheme::build(std::move(rules), declared);
  std::optional<PropertyBlock> property;
  if (blocks.property) property = parse_property_block(blocks.property->content, blocks.property->origin);
  return {std::move(scheme), std::nullopt, std::move(property)};
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize(const Scheme& scheme) {
  std::ostringstream out;
  out << "%BEGING\n";
  for (const auto& r : scheme.rules()) {
    out << r.head;
    for (const auto& p : r.params) out << ' ' << p;
    out << " -> " << r.body->str() << ".\n";
  }
  out << "%ENDG\n";
  return out.str();
}

std::string serialize(const Awt& awt) {
  std::ostringstream out;
  auto name = [&](int q) { return awt.state_name(q); };
  out << "%BEGINA\n";
  out << "init " << awt.state_name(awt.initial()) << ".\n";
  for (const auto& a : awt.alphabet()) out << "arity " << a.name << " = " << a.arity << ".\n";
  for (int q = 0; q < awt.num_states(); ++q)
    out << "priority " << awt.state_name(q) << " = " << awt.priority(q) << ".\n";
  for (int q = 0; q < awt.num_states(); ++q)
    for (int a = 0; a < static_cast<int>(awt.alphabet().size()); ++a)
      if (awt.has_transition(q, a))
        out << awt.state_name(q) << ' ' << awt.alphabet()[static_cast<std::size_t>(a)].name << " -> "
            << awt.delta(q, a).str(name) << ".\n";
  out << "%ENDA\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace horsmc
