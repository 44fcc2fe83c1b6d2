#include <CLI11.hpp>
#include <iostream>

#include "horsmc/commands.hpp"

int main(int argc, char** argv) {
  using namespace horsmc;
  CLI::App app{"Model checker for higher-order recursion schemes against alternating weak tree automata"};
  app.require_subcommand(1);

  CheckOptions opts;
  std::string path;
  auto* check = app.add_subcommand("check", "decide whether the scheme's tree is accepted");
  check->add_option("file", path, "problem file")->required();
  bool no_dual = false;
  check->add_flag("--no-dual", no_dual, "do not run the complement automaton alongside");
  check->add_option("--budget", opts.initial_budget, "expansions in the first iteration")->check(CLI::PositiveNumber);
  check->add_option("--cap", opts.cap, "iterations before giving up")->check(CLI::PositiveNumber);
  check->add_flag("--dump-types", opts.dump_types, "print the consistent bindings of the last iteration");
  check->add_flag("--dump-game", opts.dump_game, "print the last game as DOT");

  int depth = 3;
  auto* unfold = app.add_subcommand("unfold", "print a prefix of the value tree");
  unfold->add_option("file", path, "scheme file")->required();
  unfold->add_option("--depth", depth, "levels to expand")->check(CLI::NonNegativeNumber);

  std::string formula, alphabet;
  std::vector<std::string> fair, branch;
  auto* compile = app.add_subcommand("compile", "translate a CTL formula into an automaton");
  compile->add_option("--formula", formula, "CTL formula")->required();
  compile->add_option("--alphabet", alphabet, "file declaring the ranked alphabet")->required();
  compile->add_option("--fair", fair, "labels exempt from universal eventualities when repeated forever");
  compile->add_option("--branch", branch, "labels skipped as pure branching");

  auto* complement = app.add_subcommand("complement", "print the dual automaton");
  complement->add_option("file", path, "automaton or problem file")->required();

  bool game = false;
  auto* info = app.add_subcommand("info", "print scheme and automaton statistics");
  info->add_option("file", path, "problem file")->required();
  info->add_flag("--game", game, "also run a check and report the game size");

  std::string selftest_path;
  int games = kSelftestGames;
  auto* selftest = app.add_subcommand("selftest", "cross-check the game solvers and complement duality");
  selftest->add_option("file", selftest_path, "problem file for the duality check");
  selftest->add_option("--games", games, "random games to solve")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  if (*check) {
    opts.dual = !no_dual;
    return cmd_check(path, opts, std::cout, std::cerr);
  }
  if (*unfold) return cmd_unfold(path, depth, std::cout, std::cerr);
  if (*compile) return cmd_compile(formula, alphabet, fair, branch, std::cout, std::cerr);
  if (*complement) return cmd_complement(path, std::cout, std::cerr);
  if (*info) return cmd_info(path, game, std::cout, std::cerr);
  try {
    std::optional<std::string> file;
    if (!selftest_path.empty()) file = selftest_path;
    return cmd_selftest(file, games, selftest_seed(), std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "selftest: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
