#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "erw/cli.hpp"
#include "erw/report.hpp"

namespace fs = std::filesystem;
using erw::Json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("erw_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "erw");
  return erw::run(args);
}

}  // namespace

TEST_CASE("theory prints the diffusive variance") {
  const fs::path dir = scratch("theory");
  REQUIRE(run({"theory", "--d", "1", "--p", "0.6", "--z", "constant:1", "--out", dir.string()}) == 0);
  const Json j = Json::parse(slurp(dir / "theory.json"));
  bool found = false;
  for (const Json& e : j) {
    CHECK(e.contains("reference"));
    CHECK(e.contains("inputs"));
    if (e["name"] == "variance") {
      found = true;
      CHECK(e["value"].get<double>() == doctest::Approx(1.6667).epsilon(1e-4));
    }
  }
  CHECK(found);
}

TEST_CASE("verify-clt passes on the uniform-memory walk") {
  const fs::path dir = scratch("clt");
  CHECK(run({"verify-clt", "--d", "2", "--p", "0.25", "--horizon", "400", "--replicates", "10000",
             "--out", dir.string()}) == 0);
  const Json r = Json::parse(slurp(dir / "report.json"));
  CHECK(r["all_pass"].get<bool>());
  CHECK(r["command"] == "verify-clt");
  CHECK(fs::exists(dir / "tables" / "clt_covariance.csv"));
}

TEST_CASE("sa-check is exact") {
  const fs::path dir = scratch("sa");
  CHECK(run({"sa-check", "--n", "1000", "--p", "0.6", "--pA", "0.7", "--pB", "0.5", "--out",
             dir.string()}) == 0);
  const Json r = Json::parse(slurp(dir / "report.json"));
  REQUIRE(r["checks"].size() == 2);
  for (const Json& c : r["checks"]) CHECK(c["pass"].get<bool>());
}

TEST_CASE("configuration errors exit with code 2") {
  const fs::path dir = scratch("bad");
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"d": 1, "schedule": {"kind": "constant", "p": 2.0}})";
  }
  CHECK(run({"simulate", "--config", (dir / "bad.json").string(), "--out", dir.string()}) == 2);
  {
    std::ofstream cfg(dir / "typo.json");
    cfg << R"({"dimension": 1})";
  }
  CHECK(run({"simulate", "--config", (dir / "typo.json").string(), "--out", dir.string()}) == 2);
  CHECK(run({"simulate", "--z", "cauchy:1", "--out", dir.string()}) == 2);
  CHECK(run({"verify-clt", "--p", "0.9", "--out", dir.string()}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"simulate", "--set", "horizon=50", "--set", "replicates=2", "--out", dir.string()}) == 0);
  CHECK(run({"simulate", "--set", "nonsense", "--out", dir.string()}) == 2);
}

TEST_CASE("simulate writes the batch tables") {
  const fs::path dir = scratch("sim");
  REQUIRE(run({"simulate", "--d", "2", "--p", "0.7", "--horizon", "100", "--replicates", "3",
               "--binary", "--out", dir.string()}) == 0);
  const std::string csv = slurp(dir / "tables" / "walk.csv");
  CHECK(csv.rfind("replicate,checkpoint,S_1,S_2,T_1,T_2,C_1,C_2\n", 0) == 0);
  CHECK(fs::file_size(dir / "tables" / "walk.bin") > 4);
  REQUIRE(run({"rpw", "--pA", "0.7", "--pB", "0.5", "--horizon", "2000", "--replicates", "400",
               "--out", dir.string()}) == 0);
  CHECK(slurp(dir / "tables" / "rpw.csv").rfind("replicate,checkpoint,W,N_A\n", 0) == 0);
}

TEST_CASE("reports do not depend on the worker count") {
  const fs::path a = scratch("w1"), b = scratch("w8");
  const std::vector<std::string> common{"estimate-xi", "--p", "0.9", "--horizon", "500",
                                        "--replicates", "3000", "--seed", "11"};
  auto with = [&](const fs::path& dir, const std::string& w) {
    std::vector<std::string> args = common;
    args.insert(args.end(), {"--workers", w, "--out", dir.string()});
    return run(args);
  };
  with(a, "1");
  with(b, "8");
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "tables" / "xi.csv") == slurp(b / "tables" / "xi.csv"));

  const fs::path c = scratch("sb1"), d = scratch("sb4");
  for (const auto& [dir, w] : {std::pair{c, std::string("1")}, std::pair{d, std::string("4")}})
    run({"verify-chung-smallball", "--process", "BM", "--trials", "20000", "--grid", "256",
         "--workers", w, "--out", dir.string()});
  CHECK(slurp(c / "report.json") == slurp(d / "report.json"));
}
