#include <doctest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" IPOBISIM_CLI_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t lines(const std::string& s) {
  std::size_t count = 0;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) count += !line.empty();
  return count;
}

}  // namespace

TEST_CASE("cli: documented examples") {
  auto eq = run("bisim \"K\" \"S(K K)(S K K)\" --order second --strategy lazy --labels finite --depth 8");
  CHECK(eq.code == 0);
  CHECK(nlohmann::json::parse(eq.out)["verdict"] == "Equivalent");
  CHECK(nlohmann::json::parse(eq.out)["depth"] == 8);

  auto lts = run("lts \"?x\" --order second --strategy lazy --labels finite --depth 1");
  CHECK(lts.code == 0);
  CHECK(lines(lts.out) == 5);

  auto tr = run("translate \"\\x.x\" --dir lambda-to-cl");
  CHECK(tr.code == 0);
  CHECK(tr.out == "S K K\n");
}

TEST_CASE("cli: exit codes") {
  CHECK(run("bisim K S --depth 3").code == 1);
  CHECK(run("bisim \"S I I (S I I)\" K").code == 65);
  CHECK(run("bisim \"S (S K K) (S K K) (S (S K K) (S K K))\" K --fuel 30").code == 2);
  CHECK(run("bisim K").code == 64);
  CHECK(run("frobnicate").code == 64);
  CHECK(run("parse \"K (\"").code == 65);
  CHECK(run("lts K --labels sideways").code == 64);
  CHECK(run("translate K --dir sideways").code == 64);
  CHECK(run("lts K --calculus lambda").code == 64);
}

TEST_CASE("cli: parse, reduce, translate") {
  CHECK(run("parse \"S(K K)  (S K K)\"").out == "S (K K) (S K K)\n");
  CHECK(run("parse \"\\x. x\"").out == "\\x. x\n");
  auto r = run("reduce \"S (K K) (S K K)\" --trace");
  CHECK(r.code == 0);
  CHECK(lines(r.out) == 3);
  CHECK(run("reduce \"(\\x. x x) (\\x. x x)\" --fuel 10").code == 2);
  CHECK(run("reduce \"K K (K K K)\" --calculus cl --strategy cbv").out == "K\n");
  CHECK(run("reduce \"K K (K K K)\" --calculus cl --strategy cbv --trace").out == "K K (K K K)\nK K K\nK\n");
  CHECK(run("translate K --dir cl-to-lambda").out == "\\x. \\y. x\n");
}

TEST_CASE("cli: oracles and suites") {
  CHECK(run("oracle contextual \"\\x. x\" \"\\x y. x y\"").code == 1);
  CHECK(run("oracle applicative \"\\x. x\" \"\\y. y\"").code != 1);
  auto tables = run("check-tables --max-size 3 --max-metavars 1");
  CHECK(tables.code == 0);
  CHECK(nlohmann::json::parse(tables.out)["finite_diffs"] == 0);
  auto inv = run("prop invariants --max-size 4 --open-size 3 --mgu-pairs 200");
  CHECK(inv.code == 0);
}

TEST_CASE("cli: identical argv and seed give identical output") {
  auto a = run("prop congruence --samples 5 --seed 9");
  auto b = run("prop congruence --samples 5 --seed 9");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto env = run("prop congruence --samples 5 --seed 1", "IPOBISIM_SEED=9");
  CHECK(env.out == a.out);
}
