#include "horsmc/commands.hpp"

#include <cstdlib>

#include "horsmc/ctl.hpp"
#include "horsmc/format.hpp"

namespace horsmc {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitValidation;
}

LoadedProblem load_problem(const std::string& path) {
  ProblemFile p = parse_problem(read_file(path));
  LoadedProblem out{std::move(p.scheme), std::move(p.automaton)};
  if (p.property) {
    CtlFormula f = parse_ctl(p.property->formula, p.property->formula_pos);
    out.awt = compile_to_awt(f, out.scheme.terminals(), {p.property->fair, p.property->branch});
  }
  return out;
}

namespace {

// Runs `body`, turning library errors into a message and an exit code.
template <typename F>
int guarded(const std::string& what, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << what << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

Awt require_automaton(const LoadedProblem& p) {
  if (!p.awt) throw Error("no automaton or property block");
  return *p.awt;
}

}  // namespace

int cmd_check(const std::string& path, const CheckOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(path, err, [&] {
    LoadedProblem p = load_problem(path);
    Verdict v = check(p.scheme, require_automaton(p), opts);
    out << v.summary_line() << "\n";
    if (!v.evidence.empty()) out << v.evidence << "\n";
    if (opts.dump_types) out << "# consistent bindings\n" << v.types_dump;
    if (opts.dump_game && !v.game_dump.empty()) out << v.game_dump;
    switch (v.kind) {
      case VerdictKind::Yes: return int{kExitYes};
      case VerdictKind::No: return int{kExitNo};
      case VerdictKind::Unknown: break;
    }
    return int{kExitUnknown};
  });
}

int cmd_unfold(const std::string& path, int depth, std::ostream& out, std::ostream& err) {
  return guarded(path, err, [&] {
    if (depth < 0) throw Error("depth must be non-negative");
    Scheme s = parse_scheme(read_file(path));
    out << unfold(s, depth).render();
    return 0;
  });
}

int cmd_compile(const std::string& formula, const std::string& alphabet_path, const std::vector<std::string>& fair,
                const std::vector<std::string>& branch, std::ostream& out, std::ostream& err) {
  return guarded("compile", err, [&] {
    auto alphabet = parse_alphabet(read_file(alphabet_path));
    Awt awt = compile_to_awt(parse_ctl(formula), alphabet, {fair, branch});
    out << serialize(awt);
    return 0;
  });
}

int cmd_complement(const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(path, err, [&] {
    std::string text = read_file(path);
    // A bare automaton file has no scheme block.
    if (text.find("%BEGING") == std::string::npos) {
      out << serialize(complement(parse_automaton(text)));
    } else {
      out << serialize(complement(require_automaton(load_problem(path))));
    }
    return 0;
  });
}

int cmd_info(const std::string& path, bool game, std::ostream& out, std::ostream& err) {
  return guarded(path, err, [&] {
    LoadedProblem p = load_problem(path);
    out << "order=" << p.scheme.order() << " rules=" << p.scheme.num_nonterminals()
        << " terminals=" << p.scheme.terminals().size();
    if (p.awt) out << " states=" << p.awt->num_states() << " deterministic=" << (is_deterministic(*p.awt) ? 1 : 0);
    out << "\n";
    if (!game) return 0;
    Verdict v = check(p.scheme, require_automaton(p), CheckOptions{});
    out << "verdict=" << to_string(v.kind);
    if (v.game) {
      out << " game_nodes=" << v.game->size() << " game_edges=" << v.game->num_edges()
          << " sccs=" << v.game->num_sccs() << " lifted_sccs=" << v.game->normalized_sccs;
    } else {
      out << " game_nodes=0";
    }
    out << "\n";
    return 0;
  });
}

std::uint64_t selftest_seed() {
  const char* s = std::getenv("HORSMC_SEED");
  if (!s || !*s) return kDefaultSeed;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (*end) throw Error("HORSMC_SEED must be a decimal integer");
  return v;
}

int cmd_selftest(const std::optional<std::string>& path, int games, std::uint64_t seed, std::ostream& out,
                 std::ostream& err) {
  return guarded("selftest", err, [&] {
    std::mt19937_64 rng(seed);
    int disagreements = 0;
    for (int i = 0; i < games; ++i) {
      Game g = random_game(rng, kSelftestGameNodes);
      if (solve(g).winner != naive_solve(g).winner) ++disagreements;
    }
    out << "games=" << games << " seed=" << seed << " disagreements=" << disagreements << "\n";
    bool ok = disagreements == 0;
    if (path) {
      LoadedProblem p = load_problem(*path);
      bool dual = self_test_duality(p.scheme, require_automaton(p));
      out << "duality=" << (dual ? "ok" : "failed") << "\n";
      ok = ok && dual;
    }
    return ok ? 0 : 1;
  });
}

}  // namespace horsmc
