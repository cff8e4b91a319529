#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(PTAGAME_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return std::string(PTAGAME_FIXTURE_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ptagame_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("solve prints certified exact values") {
  const auto m2 = run("solve " + fixture("M2") + " --exact");
  CHECK(m2.code == 0);
  CHECK(contains(m2.out, "\"initial_value\": \"2/1\""));
  CHECK(contains(m2.out, "\"certificate\": true"));
  const auto m3 = run("solve " + fixture("M3") + " --exact");
  CHECK(m3.code == 0);
  CHECK(contains(m3.out, "\"initial_value\": \"3/2\""));
  const auto approx = run("solve " + fixture("M2"));
  CHECK(approx.code == 0);
  CHECK(contains(approx.out, "\"mode\": \"approximate\""));
}

TEST_CASE("solve writes to --out") {
  const auto path = scratch("m1.json");
  fs::remove(path);
  CHECK(run("solve " + fixture("M1") + " --exact --out " + path.string()).code == 0);
  CHECK(contains(slurp(path), "\"initial_value\": \"1/1\""));
}

TEST_CASE("assumption failures exit with 3 and a witness") {
  const auto r = run("solve " + fixture("M2-unreachable"));
  CHECK(r.code == 3);
  CHECK(contains(r.out, "\"witness\""));
  CHECK(contains(r.out, "\"location\": \"l0\""));
  CHECK(run("solve " + fixture("M2-unreachable") + " --exact").code == 3);
  CHECK(run("simulate " + fixture("M2-unreachable") + " --runs 10").code == 3);
  CHECK(run("check-properties " + fixture("M2-unreachable")).code == 3);
}

TEST_CASE("input errors exit with 2") {
  const auto bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"clocks": ["c"], "k": 1,
      "locations": [{"name": "l0", "invariant": "c <= 1"}, {"name": "lf", "final": true}],
      "edges": [{"source": "l0", "action": "a", "guard": "c = 1",
                 "branches": [{"prob": "1/2", "target": "lf"}, {"prob": "1/3", "target": "lf"}]}],
      "initial": {"location": "l0", "valuation": {"c": "0"}}})";
  }
  CHECK(run("validate " + bad.string()).code == 2);
  CHECK(contains(run("validate " + bad.string()).out, "\"ok\": false"));
  CHECK(run("brg " + bad.string()).code == 2);
  CHECK(run("solve " + bad.string()).code == 2);

  const auto garbage = scratch("garbage.json");
  { std::ofstream(garbage) << "{ not json"; }
  CHECK(run("solve " + garbage.string()).code == 2);
  CHECK(run("solve " + scratch("missing.json").string()).code == 2);
  CHECK(run("validate " + fixture("M1")).code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("solve " + fixture("M2") + " --tolerance abc").code == 2);
}

TEST_CASE("brg output is deterministic") {
  const auto a = scratch("a.dot");
  const auto b = scratch("b.dot");
  const auto r1 = run("brg " + fixture("M1") + " --dot " + a.string());
  const auto r2 = run("brg " + fixture("M1") + " --dot " + b.string());
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(contains(r1.out, "states=6"));
  CHECK(slurp(a) == slurp(b));
  CHECK(contains(slurp(a), "digraph brg"));
}

TEST_CASE("discounted values and lambda range") {
  const auto r = run("discounted " + fixture("M2") + " --lambda 1/2");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"initial_value\": \"2/3\""));
  const auto inf = run("discounted " + fixture("M2") + " --lambda 1/2 --mode infinite");
  CHECK(contains(inf.out, "\"initial_value\": \"5/6\""));
  CHECK(contains(run("discounted " + fixture("M2") + " --lambda 0").out, "\"initial_value\": \"0/1\""));
  CHECK(run("discounted " + fixture("M2") + " --lambda 1").code == 2);
  CHECK(run("discounted " + fixture("M2") + " --lambda 3/2").code == 2);
  CHECK(run("discounted " + fixture("M2") + " --lambda -1/2").code == 2);
  CHECK(run("discounted " + fixture("M2")).code == 2);
}

TEST_CASE("convergence failures exit with 4") {
  const auto r = run("solve " + fixture("M2") + " --max-iterations 2");
  CHECK(r.code == 4);
  CHECK(contains(r.out, "\"error\": \"convergence\""));
}

TEST_CASE("simulate is reproducible and validates --runs") {
  const std::string args = "simulate " + fixture("M2") + " --runs 3000 --seed 7";
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(contains(a.out, "\"certified_value\": \"2/1\""));
  CHECK(contains(a.out, "\"unreached_fraction\": 0.0"));
  CHECK(run("simulate " + fixture("M2") + " --runs 0").code == 2);
  CHECK(run("simulate " + fixture("M2") + " --runs 1").code == 2);

  const auto trace = scratch("trace.txt");
  CHECK(run(args + " --trace " + trace.string()).code == 0);
  CHECK(contains(slurp(trace), "l0 {c=0} | a after 1"));
}

TEST_CASE("check-properties reports every region") {
  const auto r = run("check-properties " + fixture("M2") + " --pairs 20 --grid 5");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"passed\": true"));
  CHECK(contains(r.out, "\"lipschitz_estimate\""));
  const auto again = run("check-properties " + fixture("M2") + " --pairs 20 --grid 5");
  CHECK(r.out == again.out);
  CHECK(run("check-properties " + fixture("M1x") + " --pairs 10 --K 1").code == 0);
}
