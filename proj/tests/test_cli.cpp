#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "qwalk/cli.hpp"
#include "qwalk/serialize.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qwalk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qwalk_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("resolve_coin") {
  CHECK(cli::resolve_coin("fourier:3").dimension().value() == 3);
  CHECK(cli::resolve_coin("grover2d").matrix() == grover_coin_2d().matrix());
  CHECK(cli::resolve_coin("hadamard").matrix() == hadamard_coin().matrix());
  CHECK_THROWS_AS(cli::resolve_coin("nonsense"), InvalidArgument);
  CHECK_THROWS_AS(cli::resolve_coin("fourier:x"), InvalidArgument);
  CHECK_THROWS_AS(cli::resolve_coin("fourier:0"), InvalidArgument);
}

TEST_CASE("decide fourier:3") {
  const auto path = scratch("f3.json");
  const Result r = invoke({"decide", "--coin", "fourier:3", "--out", path.string()});
  CHECK(r.status == 0);
  CHECK(r.out == "no_localization (witness ell=000)\n");
  const Json doc = Json::parse(read_text_file(path));
  CHECK(doc["status"] == "no_localization");
  CHECK(doc["parameters"]["grid"] == 32);
  CHECK(doc["parameters"]["tol"] == 1e-8);
  CHECK(doc["parameters"]["rank_tol"] == 1e-10);
  CHECK(doc["parameters"]["radius"] == 2);
}

TEST_CASE("decide grover2d writes the witness state file") {
  const auto path = scratch("g.json");
  const Result r = invoke({"decide", "--coin", "grover2d", "--radius", "2", "--out", path.string()});
  CHECK(r.status == 0);
  CHECK(r.out == "localization (lambda=1)\n");
  const Json doc = Json::parse(read_text_file(path));
  CHECK(doc["witness"]["state_file"] == "g.witness.json");
  const LatticeState psi = load_state(read_text_file(scratch("g.witness.json")));
  CHECK(psi.dimension().value() == 2);
  CHECK(psi.support_size() > 0);
}

TEST_CASE("simulate fourier:2") {
  const auto path = scratch("sim.csv");
  const Result r = invoke({"simulate", "--coin", "fourier:2", "--steps", "200", "--site", "0,0",
                           "--out", path.string()});
  REQUIRE(r.status == 0);
  std::istringstream csv(read_text_file(path));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 202);  // header + n = 0..200
  CHECK(lines[0] == "n,norm,return_prob,avg_return_prob,support");
  CHECK(lines[2].rfind("1,", 0) == 0);
  CHECK(lines[2].find(",0,") != std::string::npos);
}

TEST_CASE("artifact goes to stdout without --out") {
  const Result r = invoke({"certificate", "--coin", "fourier:2"});
  CHECK(r.status == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["ell"] == Json::array({0, 1}));
  CHECK(r.err.find("certificate d=2 ell=01 rank=2") != std::string::npos);
}

TEST_CASE("--json summary") {
  const auto path = scratch("rank.json");
  const Result r = invoke({"rank-test", "--coin", "grover2d", "--out", path.string(), "--json"});
  CHECK(r.status == 0);
  const Json summary = Json::parse(r.out);
  CHECK(summary["command"] == "rank-test");
  CHECK(summary["exit_status"] == 0);
  CHECK(Json::parse(read_text_file(path))["conclusion"] == "inconclusive");
}

TEST_CASE("scan and search commands") {
  const Result scan = invoke({"scan", "--coin", "grover2d", "--grid", "8"});
  CHECK(scan.status == 0);
  CHECK(Json::parse(scan.out)["constant_eigenvalues"].size() == 2);

  const Result search = invoke({"search", "--coin", "grover2d", "--radius", "1", "--lambda", "1,0"});
  CHECK(search.status == 0);
  CHECK(Json::parse(search.out)["results"][0]["nullspace_dimension"].get<int>() >= 1);
}

TEST_CASE("exit statuses") {
  CHECK(invoke({"decide", "--coin", "nonsense"}).status == 2);
  CHECK(invoke({"simulate", "--coin", "fourier:2", "--site", "0"}).status == 2);
  CHECK(invoke({"simulate", "--coin", "fourier:2", "--steps", "0"}).status == 2);
  CHECK(invoke({"certificate", "--coin", "grover2d"}).status == 2);
  CHECK(invoke({"scan", "--coin", "fourier:4", "--grid", "100"}).status == 3);
  CHECK(invoke({"search", "--coin", "fourier:6", "--radius", "3"}).status == 3);
  CHECK(invoke({"bogus"}).status == 2);
  CHECK(invoke({"decide", "--grid", "abc"}).status == 2);

  const auto bad = scratch("bad_coin.json");
  write_file_atomic(bad, R"({"d": 1, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]})");
  const Result r = invoke({"decide", "--coin", bad.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("not unitary") != std::string::npos);
}

TEST_CASE("coin files drive every command") {
  const auto path = scratch("coin.json");
  write_file_atomic(path, coin_to_json(fourier_coin(2)).dump());
  const Result r = invoke({"decide", "--coin", path.string()});
  CHECK(r.status == 0);
  CHECK(r.err == "no_localization (witness ell=01)\n");
}

TEST_CASE("identical config and seed give identical artifacts") {
  const auto a = invoke({"simulate", "--coin", "grover2d", "--steps", "20", "--init", "random", "--seed", "5"});
  const auto b = invoke({"simulate", "--coin", "grover2d", "--steps", "20", "--init", "random", "--seed", "5"});
  const auto c = invoke({"simulate", "--coin", "grover2d", "--steps", "20", "--init", "random", "--seed", "6"});
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}
