#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "horsmc/commands.hpp"
#include "horsmc/format.hpp"

using namespace horsmc;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(HORSMC_FIXTURES) + "/" + name; }

// Writes `text` to a fresh file under the temp directory.
std::string temp_file(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "horsmc_test_cli";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

struct Run {
  int code;
  std::string out, err;
};

template <class F>
Run run(F&& f) {
  std::ostringstream out, err;
  int code = f(out, err);
  return {code, out.str(), err.str()};
}

const char* kConstant = "%BEGING\nS -> a.\n%ENDG\n%BEGINR\na -> 0.\n%ENDR\n";

}  // namespace

TEST_CASE("info") {
  Run r = run([&](auto& o, auto& e) { return cmd_info(fixture("intercept.hors"), false, o, e); });
  CHECK(r.code == 0);
  CHECK(r.out.rfind("order=4 rules=15", 0) == 0);
  CHECK(r.out.find("states=2") != std::string::npos);

  Run c = run([&](auto& o, auto& e) { return cmd_info(temp_file("const.hors", kConstant), false, o, e); });
  CHECK(c.out == "order=0 rules=1 terminals=1\n");

  Run g = run([&](auto& o, auto& e) { return cmd_info(fixture("intercept.hors"), true, o, e); });
  CHECK(std::regex_search(g.out, std::regex("verdict=yes game_nodes=\\d+ game_edges=\\d+ sccs=\\d+ lifted_sccs=0")));
}

TEST_CASE("unfold") {
  std::string path = temp_file("const.hors", kConstant);
  CHECK(run([&](auto& o, auto& e) { return cmd_unfold(path, 0, o, e); }).out == "⊥\n");
  CHECK(run([&](auto& o, auto& e) { return cmd_unfold(path, 2, o, e); }).out == "a\n");
  Run f = run([&](auto& o, auto& e) { return cmd_unfold(fixture("unbounded_file.hors"), 1, o, e); });
  CHECK(f.code == 0);
  CHECK(f.out.rfind("brnew\n", 0) == 0);
}

TEST_CASE("compile") {
  std::string alpha = temp_file("alpha", "arity a = 0.\narity br = 2.\n");
  Run r = run([&](auto& o, auto& e) { return cmd_compile("AG true", alpha, {}, {}, o, e); });
  REQUIRE(r.code == 0);
  Awt a = parse_automaton(r.out);
  CHECK(a.num_states() == 1);
  CHECK(serialize(a) == r.out);

  // The compiled intercept property, pasted into a problem file, checks yes.
  std::string ip = temp_file("intercept_alpha",
                             "arity br = 2.\narity end = 0.\narity newr = 1.\narity neww = 1.\narity read = 1.\n"
                             "arity write = 1.\narity closer = 1.\narity closew = 1.\n");
  Run prop = run([&](auto& o, auto& e) { return cmd_compile("AG (closer => AF closew)", ip, {}, {}, o, e); });
  REQUIRE(prop.code == 0);
  std::string src = read_file(fixture("intercept.hors"));
  std::string scheme_part = src.substr(0, src.find("%BEGINP"));
  std::string combined = temp_file("intercept_compiled.hors", scheme_part + prop.out);
  Run chk = run([&](auto& o, auto& e) { return cmd_check(combined, {}, o, e); });
  CHECK(chk.code == kExitYes);
  CHECK(chk.out.rfind("verdict=yes", 0) == 0);
}

TEST_CASE("complement of a bare automaton flips priorities") {
  std::string path = temp_file("auto.hors", "%BEGINA\nq0 a -> true.\narity a = 0.\n%ENDA\n");
  Run r = run([&](auto& o, auto& e) { return cmd_complement(path, o, e); });
  REQUIRE(r.code == 0);
  Awt c = parse_automaton(r.out);
  CHECK(c.parity(0) == 1);
  CHECK(c.delta(0, 0).kind() == Formula::Kind::False);
}

TEST_CASE("check verdict exit codes and dumps") {
  CHECK(run([&](auto& o, auto& e) { return cmd_check(fixture("intercept.hors"), {}, o, e); }).code == kExitYes);
  CHECK(run([&](auto& o, auto& e) { return cmd_check(fixture("intercept_no_close.hors"), {}, o, e); }).code ==
        kExitNo);
  CheckOptions dumps;
  dumps.dump_types = dumps.dump_game = true;
  Run r = run([&](auto& o, auto& e) { return cmd_check(fixture("intercept.hors"), dumps, o, e); });
  CHECK(r.out.find("# consistent bindings") != std::string::npos);
  CHECK(r.out.find("S : q0.") != std::string::npos);
  CHECK(r.out.find("digraph") != std::string::npos);
  CheckOptions tiny;
  tiny.cap = 1;
  tiny.initial_budget = 1;
  CHECK(run([&](auto& o, auto& e) { return cmd_check(fixture("unbounded_file.hors"), tiny, o, e); }).code ==
        kExitUnknown);
}

TEST_CASE("error exit codes") {
  Run parse = run([&](auto& o, auto& e) {
    return cmd_check(temp_file("bad.hors", "%BEGING\nS -> (a.\n%ENDG\n"), {}, o, e);
  });
  CHECK(parse.code == kExitParse);
  CHECK(std::regex_search(parse.err, std::regex(" 2:\\d+: ")));

  Run sort = run([&](auto& o, auto& e) {
    return cmd_info(temp_file("sort.hors", "%BEGING\nS -> F a.\nF x -> x x.\n%ENDG\n%BEGINR\na -> 0.\n%ENDR\n"),
                    false, o, e);
  });
  CHECK(sort.code == kExitValidation);

  Run unreachable = run([&](auto& o, auto& e) {
    return cmd_check(temp_file("weak.hors", std::string(kConstant) +
                                                "%BEGINA\npriority q0 = 0.\npriority q1 = 1.\nq0 a -> true.\n"
                                                "q1 a -> true.\n%ENDA\n"),
                     {}, o, e);
  });
  CHECK(unreachable.code == 0);

  Run cycle = run([&](auto& o, auto& e) {
    return cmd_check(temp_file("cycle.hors", "%BEGING\nS -> b S.\n%ENDG\n%BEGINR\nb -> 1.\n%ENDR\n"
                                             "%BEGINA\npriority q0 = 0.\npriority q1 = 1.\nq0 b -> (1,q1).\n"
                                             "q1 b -> (1,q0).\n%ENDA\n"),
                     {}, o, e);
  });
  CHECK(cycle.code == kExitValidation);

  Run missing = run([&](auto& o, auto& e) { return cmd_check("/nonexistent/horsmc.hors", {}, o, e); });
  CHECK(missing.code == kExitIo);
  CHECK_FALSE(missing.err.empty());

  Run atom = run([&](auto& o, auto& e) {
    return cmd_compile("AF zz", temp_file("alpha2", "arity a = 0.\n"), {}, {}, o, e);
  });
  CHECK(atom.code == kExitValidation);

  Run formula = run([&](auto& o, auto& e) {
    return cmd_compile("AG (", temp_file("alpha3", "arity a = 0.\n"), {}, {}, o, e);
  });
  CHECK(formula.code == kExitParse);
  CHECK(formula.err.find("1:5") != std::string::npos);
}

TEST_CASE("a file cannot carry both an automaton and a property") {
  std::string text = std::string(kConstant) + "%BEGINA\nq0 a -> true.\n%ENDA\n%BEGINP\nAG true.\n%ENDP\n";
  Run r = run([&](auto& o, auto& e) { return cmd_check(temp_file("both.hors", text), {}, o, e); });
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("both an automaton and a property block") != std::string::npos);
}

TEST_CASE("selftest") {
  Run r = run([&](auto& o, auto& e) { return cmd_selftest(std::nullopt, 200, kDefaultSeed, o, e); });
  CHECK(r.code == 0);
  CHECK(r.out == "games=200 seed=20240601 disagreements=0\n");
  Run d = run([&](auto& o, auto& e) { return cmd_selftest(fixture("intercept.hors"), 10, 3, o, e); });
  CHECK(d.code == 0);
  CHECK(d.out.find("duality=ok") != std::string::npos);
}
