#pragma once

// Independent finite-state oracle for regular schemes. Schemes and automata
// are generated here in a representation of their own, rendered to text for
// the checker, and decided by an explicit product game.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Fixed alphabet: a/1, b/1, br/2, end/0.
inline const std::vector<std::pair<std::string, int>> kAlphabet = {{"a", 1}, {"b", 1}, {"br", 2}, {"end", 0}};

struct OTerm {
  enum Kind { Param, Nonterminal, Terminal } kind = Terminal;
  int id = 0;  // parameter index, nonterminal index or alphabet index
  std::vector<OTerm> args;
};

struct OScheme {
  std::vector<int> arity;  // per nonterminal; index 0 is the start symbol
  std::vector<OTerm> body;
  std::string text() const;  // `%BEGING ... %ENDG`
};

struct OFormula {
  enum Kind { True, False, Atom, And, Or } kind = True;
  int direction = 0;
  int state = 0;
  std::vector<OFormula> parts;
};

struct OAutomaton {
  int initial = 0;
  std::vector<int> priority;                // per state
  std::vector<std::vector<OFormula>> delta;  // [state][alphabet index]
  std::string text() const;                 // `%BEGINA ... %ENDA`
};

/// Order 0 or 1, at most `max_nonterminals` rules, bodies of bounded depth.
OScheme random_scheme(std::mt19937_64& rng, int order, int max_nonterminals = 6);

/// At most `max_states` states; priorities are chosen per SCC of the state
/// graph so the result is weak.
OAutomaton random_automaton(std::mt19937_64& rng, int max_states = 4);

enum class Outcome { Accept, Reject, TooLarge };

/// Product of the scheme's reachable ground terms with the automaton, solved
/// as a game where the refuter wants to visit odd states forever or leave
/// the verifier without a move. TooLarge when more than `max_configs`
/// (term, state) pairs or a term bigger than `max_term_size` show up.
Outcome decide(const OScheme& scheme, const OAutomaton& awt, int max_configs = 4000, int max_term_size = 120);

/// Problem file combining both blocks.
std::string problem_text(const OScheme& scheme, const OAutomaton& awt);

}  // namespace oracle
