#include "horsmc/driver.hpp"

#include <chrono>
#include <sstream>

namespace horsmc {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Yes: return "yes";
    case VerdictKind::No: return "no";
    case VerdictKind::Unknown: return "unknown";
  }
  return "unknown";
}

std::string Verdict::summary_line() const {
  std::ostringstream out;
  out << "verdict=" << to_string(kind) << " iterations=" << iterations << " game_nodes=" << game_nodes
      << " states=" << states << " time_ms=" << time_ms;
  return out.str();
}

namespace {

// One copy of the loop, advanced an iteration at a time.
class Instance {
 public:
  Instance(const Scheme& scheme, Awt awt, const CheckOptions& opts)
      : scheme_(scheme), awt_(std::move(awt)), opts_(opts), deterministic_(is_deterministic(awt_)) {}

  int iterations() const { return iterations_; }

  // Runs one iteration; returns a verdict about this instance's automaton
  // when it concludes.
  std::optional<Verdict> step() {
    long long budget = opts_.initial_budget;
    for (int i = 0; i < iterations_ && budget < (1LL << 40); ++i) budget *= opts_.growth;
    ++iterations_;
    last_ = Verdict{};
    last_.iterations = iterations_;

    ExpandResult r = expand(scheme_, awt_, static_cast<int>(std::min<long long>(budget, 1LL << 30)));
    if (r.early_no) {
      last_.kind = VerdictKind::No;
      last_.trace = r.early_no;
      last_.evidence = "violating path: " + r.early_no->str();
      return last_;
    }
    TypeTable types;
    Environment candidates = extract_candidates(scheme_, awt_, r, types);
    CheckResult checked = type_check(scheme_, awt_, types, candidates);
    if (opts_.dump_types) last_.types_dump = dump_environment(checked.consistent, scheme_, types, awt_);
    Binding target{scheme_.start(), types.atomic(awt_.initial())};
    if (!checked.consistent.contains(target)) return std::nullopt;

    Game game = build_game(scheme_, awt_, types, checked, target);
    Solution sol = solve(game);
    last_.game_nodes = game.size();
    if (opts_.dump_game) last_.game_dump = to_dot(game, &sol);
    bool won = sol.winner_of(game.initial()) == Player::Verifier;
    std::string target_text = binding_str(target, scheme_, types, awt_);
    if (won) {
      last_.kind = VerdictKind::Yes;
      last_.evidence = "verifier wins from " + target_text + " (" + std::to_string(game.size()) + " nodes, " +
                       std::to_string(checked.consistent.bindings.size()) + " consistent bindings)";
    } else if (deterministic_ && game.normalized_sccs == 0) {
      last_.kind = VerdictKind::No;
      last_.evidence = "refuter wins from " + target_text + " and the automaton is deterministic";
    }
    last_.game = std::move(game);
    last_.solution = std::move(sol);
    if (last_.kind == VerdictKind::Unknown) return std::nullopt;
    return last_;
  }

  // Dumps of the latest iteration, for Unknown verdicts.
  const Verdict& last() const { return last_; }

 private:
  const Scheme& scheme_;
  Awt awt_;
  const CheckOptions& opts_;
  bool deterministic_;
  int iterations_ = 0;
  Verdict last_;
};

}  // namespace

Verdict check(const Scheme& scheme, const Awt& awt, const CheckOptions& opts) {
  if (opts.initial_budget < 1 || opts.growth < 2 || opts.cap < 1) throw Error("invalid check options");
  validate(awt);
  auto start = std::chrono::steady_clock::now();
  Instance primal(scheme, awt, opts);
  std::optional<Instance> dual;
  if (opts.dual && !is_deterministic(awt)) dual.emplace(scheme, complement(awt), opts);

  std::optional<Verdict> out;
  for (int i = 0; i < opts.cap && !out; ++i) {
    out = primal.step();
    if (out || !dual) continue;
    out = dual->step();
    if (out) {
      out->kind = out->kind == VerdictKind::Yes ? VerdictKind::No : VerdictKind::Yes;
      out->from_complement = true;
      out->evidence = "complement automaton: " + out->evidence;
    }
  }
  if (!out) {
    out = primal.last();
    out->kind = VerdictKind::Unknown;
    out->iterations = primal.iterations();
    out->evidence = "iteration cap reached";
    out->trace.reset();
  }
  out->states = awt.num_states();
  out->time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return *out;
}

bool self_test_duality(const Scheme& scheme, const Awt& awt, const CheckOptions& opts) {
  Verdict a = check(scheme, awt, opts);
  Verdict b = check(scheme, complement(awt), opts);
  if (a.kind == VerdictKind::Unknown || b.kind == VerdictKind::Unknown) return false;
  return (a.kind == VerdictKind::Yes) != (b.kind == VerdictKind::Yes);
}

}  // namespace horsmc
