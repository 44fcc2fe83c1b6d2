#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "horsmc/driver.hpp"
#include "horsmc/errors.hpp"

namespace horsmc {

/// Process exit codes. Verdicts map to 0/1/2; input problems start at 10.
enum ExitCode : int {
  kExitYes = 0,
  kExitNo = 1,
  kExitUnknown = 2,
  kExitParse = 10,
  kExitValidation = 11,
  kExitIo = 12,
};

int exit_code_for(const Error& e);

/// Scheme plus the automaton given or compiled from the property block.
struct LoadedProblem {
  Scheme scheme;
  std::optional<Awt> awt;
};

LoadedProblem load_problem(const std::string& path);

// Each command writes its report to `out`, diagnostics to `err`, and
// returns the exit code. Errors derived from Error are reported, not thrown.

int cmd_check(const std::string& path, const CheckOptions& opts, std::ostream& out, std::ostream& err);
int cmd_unfold(const std::string& path, int depth, std::ostream& out, std::ostream& err);
int cmd_compile(const std::string& formula, const std::string& alphabet_path, const std::vector<std::string>& fair,
                const std::vector<std::string>& branch, std::ostream& out, std::ostream& err);
int cmd_complement(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_info(const std::string& path, bool game, std::ostream& out, std::ostream& err);

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr int kSelftestGames = 1000;
inline constexpr int kSelftestGameNodes = 12;

/// Seed from HORSMC_SEED, or the default.
std::uint64_t selftest_seed();

/// Random games solved both ways, plus the duality check on `path` if given.
int cmd_selftest(const std::optional<std::string>& path, int games, std::uint64_t seed, std::ostream& out,
                 std::ostream& err);

}  // namespace horsmc
