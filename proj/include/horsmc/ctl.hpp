#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "horsmc/automaton.hpp"
#include "horsmc/errors.hpp"

namespace horsmc {

/// CTL over terminal labels, kept in positive normal form: negation only
/// wraps atoms. `Implies(l, r)` means `!l \/ r` with `l` stored positively.
/// AR/ER are the release duals of AU/EU and only arise from negation (or an
/// explicit `R`).
class CtlFormula {
 public:
  enum class Kind { True, False, Atom, NotAtom, And, Or, Implies, AX, EX, AF, EF, AG, EG, AU, EU, AR, ER };

  static CtlFormula truth(bool value);
  static CtlFormula atom(std::string name, bool negated = false);
  static CtlFormula binary(Kind kind, CtlFormula lhs, CtlFormula rhs);
  static CtlFormula unary(Kind kind, CtlFormula operand);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<CtlFormula>& children() const { return children_; }
  const CtlFormula& child(std::size_t i) const { return children_[i]; }

  /// Negation pushed through to the atoms.
  CtlFormula negate() const;

  /// Surface syntax, re-parseable: `AG (closein => AF closeout)`.
  std::string str() const;
  /// Constructor view: `AG(Implies(Atom closein, AF(Atom closeout)))`.
  std::string ast() const;

  void collect_atoms(std::vector<std::string>& out) const;

  bool operator==(const CtlFormula& other) const;

 private:
  Kind kind_ = Kind::True;
  std::string name_;
  std::vector<CtlFormula> children_;
};

/// Precedence, tightest first: unary operators, U/R, conjunction,
/// disjunction, implication (right associative). Accepted spellings:
/// `!`/`not`, `/\`/`&`/`&&`, `\/`/`|`/`||`, `=>`/`->`, `A (f U g)`,
/// `E [f U g]`.
CtlFormula parse_ctl(std::string_view text, SourcePos origin = {1, 1});

struct CtlCompileOptions {
  /// Labels F: paths eventually labelled only by F are exempt from universal
  /// eventualities.
  std::vector<std::string> fair;
  /// Labels treated as pure branching: they are skipped when looking for the
  /// next observable node and carry no proposition of their own.
  std::vector<std::string> branch;
};

/// States are pairs of a subformula and a path mode. The root and every AX
/// target use the universal mode, EX targets the existential one; the mode
/// only matters at branching labels, where the universal mode requires all
/// children and the existential mode some child.
Awt compile_to_awt(const CtlFormula& f, const std::vector<TerminalSymbol>& alphabet,
                   const CtlCompileOptions& opts = {});

Awt compile_to_awt(const CtlFormula& f, const std::map<std::string, int>& alphabet,
                   const CtlCompileOptions& opts = {});

}  // namespace horsmc
