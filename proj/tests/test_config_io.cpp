#include <doctest.h>

#include <sstream>

#include "erw/batch_io.hpp"
#include "erw/config.hpp"

using namespace erw;

namespace {

std::string where_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "no error";
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"({
    "d": 2,
    "schedule": {"kind": "constant", "p_num": 5, "p_den": 8},
    "steps": {"law": "two-point", "a": 0, "b": 2, "q": 0.5},
    "horizon": 500,
    "checkpoints": [10, 100, 500],
    "seed": 42,
    "replicates": 3,
    "rpw": {"pA": 0.7, "pB": 0.5, "W0": 1, "B0": 1}
  })");
  CHECK(c.walk.d == 2);
  CHECK(c.walk.schedule.exact_limit()->den == 8);
  CHECK(regime_classify(c.walk.schedule, 2).regime == Regime::critical);
  CHECK(c.walk.steps.variance() == doctest::Approx(1.0));
  CHECK(c.walk.checkpoints == std::vector<std::uint64_t>{10, 100, 500});
  CHECK(c.has_checkpoints);
  CHECK(c.has_rpw);
  CHECK(c.rpw.W0 == 1);
  CHECK(c.rpw.p0 == 1.0);

  const ExperimentConfig dflt = parse_config("{}");
  CHECK(dflt.walk.d == 1);
  CHECK(dflt.walk.horizon == 1000);
  CHECK(dflt.walk.checkpoints.back() == 1000);

  const ExperimentConfig rule = parse_config(
      R"({"schedule": {"kind": "rule", "p": 0.6, "amplitude": 0.2, "decay": 0.5}})");
  CHECK(rule.walk.schedule.p_at(4) == doctest::Approx(0.7));
  CHECK(rule.walk.schedule.limit() == 0.6);

  const ExperimentConfig tab = parse_config(
      R"({"schedule": {"kind": "tabulated", "values": [0.1, 0.2], "limit": 0.6}})");
  CHECK(tab.walk.schedule.p_at(2) == 0.2);
  CHECK(tab.walk.schedule.p_at(3) == 0.6);
}

TEST_CASE("config errors carry a location") {
  CHECK(where_of(R"({"dd": 1})") == "/dd");
  CHECK(where_of(R"({"schedule": {"kind": "constant", "p": 0.5, "x": 1}})") == "/schedule/x");
  CHECK(where_of(R"({"schedule": {"kind": "constant", "p": 1.5}})") == "/schedule");
  CHECK(where_of(R"({"steps": {"law": "cauchy"}})") == "/steps/law");
  CHECK(where_of(R"({"horizon": -3})") == "/horizon");
  CHECK(where_of(R"({"checkpoints": [5, 0]})") == "/checkpoints/1");
  CHECK(where_of(R"({"rpw": {"pA": 0.5}})") == "/rpw/pB");
  CHECK(where_of(R"({"d": 2, "first_step_plus_probability": 0.5})") == "/");
  CHECK(where_of("{\n  \"d\": 1,\n  \"seed\": }") == "3:11");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("batch CSV and binary round trip") {
  WalkConfig w;
  w.d = 2;
  w.horizon = 50;
  w.checkpoints = {5, 50};
  w.replicates = 3;
  w.steps = StepSizeModel::gaussian(1.0, 0.5);
  const WalkBatch b = simulate_batch(w, 1);

  std::ostringstream csv;
  write_batch_csv(csv, b);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "replicate,checkpoint,S_1,S_2,T_1,T_2,C_1,C_2");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 6);

  std::stringstream bin;
  write_batch_binary(bin, b);
  const WalkBatch r = read_batch_binary(bin);
  CHECK(r.d == 2);
  CHECK(r.replicates == 3);
  CHECK(r.checkpoints == b.checkpoints);
  CHECK(r.S == b.S);
  CHECK(r.T == b.T);
  CHECK(r.C == b.C);

  RpwConfig u;
  u.pA = 0.7;
  u.pB = 0.5;
  u.horizon = 20;
  u.checkpoints = {20};
  u.replicates = 2;
  const WalkBatch ub = simulate_rpw_batch(u, 1);
  std::ostringstream ucsv;
  write_batch_csv(ucsv, ub);
  CHECK(ucsv.str().rfind("replicate,checkpoint,W,N_A\n", 0) == 0);
  std::stringstream ubin;
  write_batch_binary(ubin, ub);
  const WalkBatch ur = read_batch_binary(ubin);
  CHECK(ur.W == ub.W);
  CHECK(ur.NA == ub.NA);

  std::stringstream bad("XXXX0000");
  CHECK_THROWS(read_batch_binary(bad));
  const std::string full = bin.str();
  std::stringstream cut;
  write_batch_binary(cut, b);
  std::stringstream truncated(cut.str().substr(0, cut.str().size() - 5));
  CHECK_THROWS(read_batch_binary(truncated));
}
