#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

using json = nlohmann::json;

namespace {

// ctest runs from the build directory, next to the binary
std::string cli_path() {
  for (const char* p : {"./aklt_cli", "build/aklt_cli", "../aklt_cli"}) {
    std::ifstream probe(p);
    if (probe.good()) return p;
  }
  return "./aklt_cli";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  RunResult r;
  FILE* pipe = popen((cli_path() + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json run_json(const std::string& args) {
  RunResult r = run_cli(args);
  CAPTURE(args);
  CAPTURE(r.out);
  REQUIRE(r.exit_code == 0);
  return json::parse(r.out);
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/" + name;
  std::ofstream f(path);
  f << text;
  return path;
}

}  // namespace

TEST_CASE("fixed point queries") {
  json five = run_json("fn --d 5 --fixed-point");
  CHECK(five["d"] == 5);
  CHECK(five["t_star"].get<double>() == doctest::Approx(0.5157386195651108).epsilon(1e-12));
  CHECK(five["residual"].get<double>() < 1e-12);

  json four = run_json("fn --d 4 --fixed-point");
  CHECK(four["d"] == 4);
  CHECK(four["t_star"].is_null());
  CHECK_FALSE(four.contains("residual"));
}

TEST_CASE("scalar map evaluation") {
  json j = run_json("fn --d 3 --eval 0.5");
  // F_3(t) = -2t/(3+t^2)
  CHECK(j["value"].get<double>() == doctest::Approx(-1.0 / 3.25).epsilon(1e-14));
}

TEST_CASE("square cell criterion emits the exact slope") {
  json j = run_json("cell --builtin square --criterion");
  CHECK(j["slope"] == "-13/42");
  CHECK(j["breaks"] == false);
  CHECK(j["t_cell"].is_null());
}

TEST_CASE("star cell criterion breaks with the degree-5 cell value") {
  json j = run_json("cell --builtin star5 --criterion");
  CHECK(j["slope"] == "-4/3");
  CHECK(j["breaks"] == true);
  CHECK(j["t_cell"].get<double>() == doctest::Approx(0.5157386195651108).epsilon(1e-9));
}

TEST_CASE("cell polynomials under both conventions") {
  json o = run_json("cell --builtin star4 --polynomials");
  CHECK(o["convention"] == "oracle");
  REQUIRE(o["p"].is_array());
  CHECK(o["p"][1] == "-1");  // F_4 numerator -t - t^3/9 ...
  json p = run_json("cell --builtin square --polynomials --convention paper");
  CHECK(p["convention"] == "paper");
  REQUIRE(p["q"].is_array());
}

TEST_CASE("cell json round-trips through --dump and --file") {
  RunResult dump = run_cli("cell --builtin square --dump");
  REQUIRE(dump.exit_code == 0);
  std::string path = write_temp("aklt_cli_square.json", dump.out);
  json a = run_json("cell --file " + path + " --criterion");
  CHECK(a["slope"] == "-13/42");
  std::remove(path.c_str());
}

TEST_CASE("site transfer words") {
  json covered = run_json("site --d 3 --word 33");
  CHECK(covered["coefficients"][0] == "1/3");
  CHECK(covered["closed_form"]["output_letter"] == 0);
  CHECK(covered["closed_form"]["value"] == "1/3");

  json skew = run_json("site --d 4 --word 312");
  for (int i = 0; i < 4; ++i) CHECK(skew["coefficients"][i] == "0");
  CHECK(skew["closed_form"].is_null());

  json disc = run_json("site --d 6 --discrepancy");
  CHECK(disc["max_discrepancy"].get<double>() < 1e-12);
}

TEST_CASE("degree sequence classification and composition") {
  std::string ordered = write_temp("aklt_cli_seq5.txt", "5\nrepeat 1\n");
  json c5 = run_json("fn --classify --file " + ordered);
  CHECK(c5["classification"] == "ordered");

  std::string unique = write_temp("aklt_cli_seq4.txt", "4\nrepeat 1\n");
  json c4 = run_json("fn --classify --file " + unique);
  CHECK(c4["classification"] == "unique");

  std::string mixed = write_temp("aklt_cli_seq225.txt", "2\n2\n5\nrepeat 1\n");
  json comp = run_json("fn --compose --file " + mixed + " --t0 0.5157386195651108 --n 5");
  CHECK(std::fabs(comp["final"].get<double>()) ==
        doctest::Approx(0.5157386195651108 / 9).epsilon(1e-9));
  CHECK(comp["iterates"].size() == 6);
  std::remove(ordered.c_str());
  std::remove(unique.c_str());
  std::remove(mixed.c_str());
}

TEST_CASE("decorated thresholds") {
  json uni = run_json("decorated --d 5 --g 1");
  CHECK(uni["threshold"] == 10);
  CHECK(uni["phase"] == "unique");
  json ord = run_json("decorated --d 14 --g 1");
  CHECK(ord["phase"] == "ordered");
  json bnd = run_json("decorated --d 10 --g 1");
  CHECK(bnd["phase"] == "boundary");
  json poly = run_json("decorated --d 5 --g 1 --polynomials");
  REQUIRE(poly.contains("p"));
  REQUIRE(poly.contains("q"));
}

TEST_CASE("tree-of-cells sweep matches the iterated cell map") {
  json j = run_json("treecell --builtin star5 --generations 3 --t 0.4");
  CHECK(j["nodes"] == 21);
  CHECK(j["sweep"].get<double>() ==
        doctest::Approx(j["cell_iterate"].get<double>()).epsilon(1e-12));
  CHECK(j["condition"]["sum"] == "4/3");
  CHECK(j["condition"]["breaks"] == true);
}

TEST_CASE("bilayer system and solve") {
  json sys = run_json("bilayer system --g 1");
  CHECK(sys["f1"] == "(-4/9)*x1");
  CHECK(sys["reference_diff"] != "");

  json solve = run_json("bilayer solve --g 1 --cycle 2 --starts 40 --seed 11");
  REQUIRE(solve["solutions"].size() == 1);
  const auto& s = solve["solutions"][0];
  // 3*x3 = -4 + sqrt(19)
  CHECK(s["x"][2].get<double>() ==
        doctest::Approx((-4 + std::sqrt(19.0)) / 3).epsilon(1e-10));
  CHECK(s["map_residual"].get<double>() < 1e-10);
  CHECK(s["min_eigenvalue"].get<double>() > 0);
}

TEST_CASE("solver output is bitwise reproducible for a fixed seed") {
  const std::string cmd = "bilayer solve --g 3 --cycle 2 --starts 24 --seed 7";
  RunResult a = run_cli(cmd);
  RunResult b = run_cli(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  RunResult serial = run_cli(cmd + " --serial");
  CHECK(serial.out == a.out);
}

TEST_CASE("simulate contract cross-checks sweep, scalar map and dense state") {
  json j = run_json(
      "simulate contract --family cayley --d 3 --depth 1 --t 0.52 --dense");
  const double e = j["expectation"].get<double>();
  CHECK(e == doctest::Approx(j["scalar_map_value"].get<double>()).epsilon(1e-12));
  CHECK(e == doctest::Approx(j["dense_expectation"].get<double>()).epsilon(1e-10));
  CHECK(j["nodes"] == 3);

  json r = run_json(
      "simulate contract --family cayley --d 5 --depth 0 --random-seed 5 --dense");
  CHECK(r["boundary"] == "random");
  CHECK(r["expectation"].get<double>() ==
        doctest::Approx(r["dense_expectation"].get<double>()).epsilon(1e-10));
}

TEST_CASE("simulate scan emits the fixed csv header") {
  RunResult r = run_cli(
      "simulate scan --family cayley --d 5 --tmin 0 --tmax 0.5 --tsteps 3 "
      "--dmin 1 --dmax 2 --format csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("family,params,t,depth,expectation,scalar_map_value\n", 0) == 0);
  size_t lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  CHECK(lines == 1 + 3 * 2);

  json rows = run_json(
      "simulate scan --family decorated --d 5 --g 1 --tmin 0.3 --tmax 0.3 "
      "--tsteps 1 --dmin 1 --dmax 1 --format json");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["params"] == "d=5;g=1");
  CHECK(rows[0]["expectation"].get<double>() ==
        doctest::Approx(rows[0]["scalar_map_value"].get<double>()).epsilon(1e-10));
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run_cli("fn --d 3 --bogus").exit_code == 2);
  CHECK(run_cli("fn --d 3").exit_code == 2);
  CHECK(run_cli("site --word 33").exit_code == 2);
  CHECK(run_cli("site --d 3 --word 44").exit_code == 2);
  CHECK(run_cli("site --d 3 --word 123").exit_code == 2);
  CHECK(run_cli("cell --builtin nosuch --criterion").exit_code == 2);
  CHECK(run_cli("cell --builtin square --criterion --polynomials").exit_code == 2);
  CHECK(run_cli("treecell --builtin square --generations 2").exit_code == 2);
  CHECK(run_cli("treecell --builtin star5 --generations 16").exit_code == 2);
  CHECK(run_cli("bilayer solve --g 9").exit_code == 2);
  CHECK(run_cli("fn --d 400 --eval 0.1").exit_code == 2);
  CHECK(run_cli("fn --d 3 --eval 1.5").exit_code == 2);
  CHECK(run_cli("simulate contract --family nosuch --depth 1").exit_code == 2);
  CHECK(run_cli("simulate contract --family layered --depth 1").exit_code == 2);
  CHECK(run_cli("simulate scan --family cayley --d 5 --dmin 3 --dmax 1").exit_code == 2);
  CHECK(run_cli("fn --d 5 --fixed-point --format xml").exit_code == 2);
  CHECK(run_cli("fn --d 5 --fixed-point --format csv").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("fn --help").exit_code == 0);
}
