#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "horsmc/automaton.hpp"
#include "horsmc/scheme.hpp"

namespace horsmc {

struct LoadOptions {
  /// Fill omitted (state, symbol) pairs with `false` instead of failing.
  bool total_default_false = false;
};

/// Contents of a `%BEGINP ... %ENDP` block.
struct PropertyBlock {
  std::string formula;
  SourcePos formula_pos;
  std::vector<std::string> fair;    // `fair read.`
  std::vector<std::string> branch;  // `branch br.`
};

/// A problem file: one scheme block, optionally an automaton or a property.
struct ProblemFile {
  Scheme scheme;
  std::optional<Awt> automaton;
  std::optional<PropertyBlock> property;
};

/// Rules of a scheme given as bare rule text or inside `%BEGING ... %ENDG`.
std::vector<Rule> parse_rules(std::string_view text, SourcePos origin = {1, 1});

/// Scheme block plus optional `%BEGINR` terminal declarations.
Scheme parse_scheme(std::string_view text);

/// Automaton given as bare statements or inside `%BEGINA ... %ENDA`. Symbols
/// in `extra_alphabet` are added when absent from the text.
Awt parse_automaton(std::string_view text, const LoadOptions& opts = {},
                    const std::map<std::string, int>& extra_alphabet = {});

/// Ranked alphabet from `arity a = n.` lines, a `%BEGINR` block, or the
/// terminals of a scheme block.
std::map<std::string, int> parse_alphabet(std::string_view text);

PropertyBlock parse_property_block(std::string_view text, SourcePos origin = {1, 1});

ProblemFile parse_problem(std::string_view text, const LoadOptions& opts = {});

std::string serialize(const Scheme& scheme);
std::string serialize(const Awt& awt);

std::string read_file(const std::string& path);

}  // namespace horsmc
