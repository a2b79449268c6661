#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef CKM_CLI_PATH
#error "CKM_CLI_PATH must point at the built binary"
#endif

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code;
  json stdout_json;
  std::string raw;
};

int counter = 0;

RunResult run_cli(const std::string& args, bool parse = true) {
  std::string out_file = "/tmp/ckm_cli_out_" + std::to_string(counter++);
  std::string cmd = std::string(CKM_CLI_PATH) + " " + args + " > " + out_file +
                    " 2> /dev/null";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  r.raw = buffer.str();
  if (parse && !r.raw.empty() && r.raw[0] == '{')
    r.stdout_json = json::parse(r.raw);
  std::remove(out_file.c_str());
  return r;
}

}  // namespace

TEST_CASE("generate, solve and validate round-trip") {
  auto gen = run_cli(
      "generate --kind random --model tree --n 7 --k 2 --seed 11 "
      "--out /tmp/ckm_t.json",
      false);
  REQUIRE(gen.exit_code == 0);

  auto solve = run_cli("solve --in /tmp/ckm_t.json --variant disjoint-tree");
  REQUIRE(solve.exit_code == 0);
  REQUIRE(solve.stdout_json.contains("cost"));
  double cost = solve.stdout_json["cost"].get<double>();

  {
    std::ofstream sol("/tmp/ckm_t_sol.json");
    json s;
    s["clusters"] = solve.stdout_json["clusters"];
    sol << s.dump();
  }
  auto val = run_cli(
      "validate --in /tmp/ckm_t.json --solution /tmp/ckm_t_sol.json "
      "--variant disjoint");
  CHECK(val.exit_code == 0);
  CHECK(val.stdout_json["feasible"] == true);
  CHECK(val.stdout_json["cost"].get<double>() == doctest::Approx(cost));

  auto oracle = run_cli("solve --in /tmp/ckm_t.json --variant oracle-disjoint");
  REQUIRE(oracle.exit_code == 0);
  CHECK(oracle.stdout_json["cost"].get<double>() == doctest::Approx(cost));

  auto dump = run_cli(
      "solve --in /tmp/ckm_t.json --variant nd-full --dump-lp /tmp/ckm_t.lp");
  REQUIRE(dump.exit_code == 0);
  std::ifstream lp("/tmp/ckm_t.lp");
  std::string first_line;
  std::getline(lp, first_line);
  CHECK(first_line == "Minimize");
}

TEST_CASE("tampered solutions fail validation with named violations") {
  auto gen = run_cli(
      "generate --kind random --n 5 --k 2 --seed 3 --out /tmp/ckm_v.json",
      false);
  REQUIRE(gen.exit_code == 0);
  {
    std::ofstream sol("/tmp/ckm_v_sol.json");
    // node 4 left uncovered, center 1 not a member of its own cluster
    sol << R"({"clusters":[{"center":0,"members":[0,1,2]},)"
        << R"({"center":1,"members":[3]}]})";
  }
  auto val = run_cli(
      "validate --in /tmp/ckm_v.json --solution /tmp/ckm_v_sol.json "
      "--variant non-disjoint");
  CHECK(val.exit_code == 1);
  bool saw_coverage = false, saw_center = false;
  for (const auto& v : val.stdout_json["violations"]) {
    if (v["kind"] == "coverage") saw_coverage = true;
    if (v["kind"] == "center_membership") saw_center = true;
  }
  CHECK(saw_coverage);
  CHECK(saw_center);
}

TEST_CASE("compare reports a ratio of at least one") {
  auto gen = run_cli(
      "generate --kind random --n 5 --k 2 --seed 21 --out /tmp/ckm_c.json",
      false);
  REQUIRE(gen.exit_code == 0);
  auto cmp = run_cli("compare --in /tmp/ckm_c.json");
  REQUIRE(cmp.exit_code == 0);
  CHECK(cmp.stdout_json["ratio"].get<double>() >= 1.0 - 1e-9);

  // fixed-center route: the dominating-set construction carries centers
  {
    std::ofstream src("/tmp/ckm_c_src.json");
    src << R"({"n":3,"edges":[[0,1],[1,2]]})";
  }
  auto gen2 = run_cli(
      "generate --kind domset --source /tmp/ckm_c_src.json --out /tmp/ckm_c2.json",
      false);
  REQUIRE(gen2.exit_code == 0);
  auto cmp2 = run_cli("compare --in /tmp/ckm_c2.json");
  REQUIRE(cmp2.exit_code == 0);
  CHECK(cmp2.stdout_json["ratio"].get<double>() >= 1.0 - 1e-9);
}

TEST_CASE("usage problems exit with code 2") {
  CHECK(run_cli("solve --variant nd-full", false).exit_code == 2);
  CHECK(run_cli("frobnicate", false).exit_code == 2);
  CHECK(run_cli("generate --kind 3sat --out /tmp/x.json", false).exit_code == 2);
}

TEST_CASE("solver outputs are deterministic") {
  run_cli("generate --kind random --n 6 --k 2 --seed 5 --out /tmp/ckm_d.json",
          false);
  auto a = run_cli("solve --in /tmp/ckm_d.json --variant nd-full");
  auto b = run_cli("solve --in /tmp/ckm_d.json --variant nd-full");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.stdout_json["cost"] == b.stdout_json["cost"]);
  CHECK(a.stdout_json["clusters"] == b.stdout_json["clusters"]);
}

TEST_CASE("bench emits a csv table") {
  auto bench = run_cli("bench --suite trees --threads 2", false);
  REQUIRE(bench.exit_code == 0);
  CHECK(bench.raw.rfind("name,n,k,cost,reference,ratio,millis", 0) == 0);
  int lines = 0;
  for (char ch : bench.raw)
    if (ch == '\n') ++lines;
  CHECK(lines >= 5);
}

TEST_CASE("nd-full trace file carries the shift log") {
  run_cli("generate --kind random --n 6 --k 2 --seed 9 --out /tmp/ckm_tr.json",
          false);
  auto solve = run_cli(
      "solve --in /tmp/ckm_tr.json --variant nd-full --trace /tmp/ckm_tr_out.json");
  REQUIRE(solve.exit_code == 0);
  std::ifstream t("/tmp/ckm_tr_out.json");
  REQUIRE(t.good());
  json trace;
  t >> trace;
  CHECK(trace.contains("shifts"));
  CHECK(trace.contains("final_centers"));
  CHECK(trace["audit"].empty());
}
