#pragma once

#include <optional>
#include <string>

#include "horsmc/game.hpp"

namespace horsmc {

struct CheckOptions {
  int initial_budget = 64;
  int growth = 2;
  int cap = 20;  // loop iterations per instance
  bool dual = true;
  bool dump_types = false;
  bool dump_game = false;
};

enum class VerdictKind { Yes, No, Unknown };

std::string to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  int iterations = 0;  // loop iterations of the instance that concluded
  int game_nodes = 0;
  int states = 0;
  long long time_ms = 0;
  /// The complement instance concluded (its result negated).
  bool from_complement = false;
  std::optional<ViolatingTrace> trace;
  std::string evidence;
  std::string types_dump;  // consistent environment of the last iteration
  std::string game_dump;   // DOT of the last game
  std::optional<Game> game;
  std::optional<Solution> solution;

  /// `verdict=yes iterations=3 game_nodes=31 states=2 time_ms=4`
  std::string summary_line() const;
};

/// Expand, extract, type check and solve with a growing budget until a
/// conclusion or the iteration cap. For automata that are not deterministic
/// and with `dual` set, a second instance on the complement automaton
/// alternates with the first; a conclusion of either side decides.
Verdict check(const Scheme& scheme, const Awt& awt, const CheckOptions& opts = {});

/// Checks the automaton and its complement separately; true when both
/// conclude and exactly one says yes.
bool self_test_duality(const Scheme& scheme, const Awt& awt, const CheckOptions& opts = {});

}  // namespace horsmc
