#include "erw/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace erw {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& ptr,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(ptr + "/" + key, "unknown key");
  }
}

double number(const json& obj, const std::string& ptr, const char* key) {
  const std::string p = ptr + "/" + key;
  if (!obj.contains(key)) throw ConfigError(p, "missing required number");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(p, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& ptr, const char* key,
                 double fallback) {
  return obj.contains(key) ? number(obj, ptr, key) : fallback;
}

std::uint64_t count(const json& obj, const std::string& ptr, const char* key,
                    std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() &&
      !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(ptr + "/" + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

MemorySchedule parse_schedule(const json& s) {
  const std::string ptr = "/schedule";
  if (!s.is_object()) throw ConfigError(ptr, "expected an object");
  if (!s.contains("kind") || !s.at("kind").is_string())
    throw ConfigError(ptr + "/kind", "expected one of constant, tabulated, rule");
  const auto kind = s.at("kind").get<std::string>();
  if (kind == "constant") {
    only_keys(s, ptr, {"kind", "p", "p_num", "p_den"});
    if (s.contains("p_num") || s.contains("p_den")) {
      if (s.contains("p"))
        throw ConfigError(ptr + "/p", "give either p or p_num/p_den");
      Ratio r;
      r.num = static_cast<std::int64_t>(count(s, ptr, "p_num", 0));
      r.den = static_cast<std::int64_t>(count(s, ptr, "p_den", 0));
      return MemorySchedule::constant(r);
    }
    return MemorySchedule::constant(number(s, ptr, "p"));
  }
  if (kind == "tabulated") {
    only_keys(s, ptr, {"kind", "values", "limit"});
    if (!s.contains("values") || !s.at("values").is_array())
      throw ConfigError(ptr + "/values", "expected an array of numbers");
    std::vector<double> vals;
    std::size_t i = 0;
    for (const auto& v : s.at("values")) {
      if (!v.is_number())
        throw ConfigError(ptr + "/values/" + std::to_string(i), "expected a number");
      vals.push_back(v.get<double>());
      ++i;
    }
    return MemorySchedule::tabulated(std::move(vals), number(s, ptr, "limit"));
  }
  if (kind == "rule") {
    only_keys(s, ptr, {"kind", "p", "amplitude", "decay"});
    const double p = number(s, ptr, "p");
    const double amp = number(s, ptr, "amplitude");
    const double decay = number(s, ptr, "decay");
    return MemorySchedule::rule(
        [=](std::uint64_t i) {
          return p + amp * std::pow(static_cast<double>(i), -decay);
        },
        p, decay);
  }
  throw ConfigError(ptr + "/kind", "unknown schedule kind '" + kind + "'");
}

StepSizeModel parse_steps(const json& s) {
  const std::string ptr = "/steps";
  if (!s.is_object()) throw ConfigError(ptr, "expected an object");
  if (!s.contains("law") || !s.at("law").is_string())
    throw ConfigError(ptr + "/law",
                      "expected one of constant, two-point, gaussian, uniform");
  const auto law = s.at("law").get<std::string>();
  if (law == "constant") {
    only_keys(s, ptr, {"law", "c"});
    return StepSizeModel::constant(number_or(s, ptr, "c", 1.0));
  }
  if (law == "two-point") {
    only_keys(s, ptr, {"law", "a", "b", "q"});
    return StepSizeModel::two_point(number(s, ptr, "a"), number(s, ptr, "b"),
                                    number(s, ptr, "q"));
  }
  if (law == "gaussian") {
    only_keys(s, ptr, {"law", "mean", "variance"});
    return StepSizeModel::gaussian(number(s, ptr, "mean"),
                                   number(s, ptr, "variance"));
  }
  if (law == "uniform") {
    only_keys(s, ptr, {"law", "a", "b"});
    return StepSizeModel::uniform(number(s, ptr, "a"), number(s, ptr, "b"));
  }
  throw ConfigError(ptr + "/law", "unknown step law '" + law + "'");
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_col(text, e.byte == 0 ? 0 : e.byte - 1),
                      "JSON syntax error");
  }
  only_keys(root, "",
            {"d", "schedule", "steps", "horizon", "checkpoints",
             "checkpoints_per_decade", "seed", "replicates",
             "first_step_plus_probability", "rpw"});
  ExperimentConfig cfg;
  WalkConfig& w = cfg.walk;
  std::string at = "/";
  try {
    w.d = count(root, "", "d", 1);
    if (w.d == 0) throw ConfigError("/d", "dimension must be >= 1");
    if (root.contains("schedule")) {
      at = "/schedule";
      w.schedule = parse_schedule(root.at("schedule"));
    }
    if (root.contains("steps")) {
      at = "/steps";
      w.steps = parse_steps(root.at("steps"));
    }
    w.horizon = count(root, "", "horizon", 1000);
    w.seed = count(root, "", "seed", 1);
    w.replicates = count(root, "", "replicates", 1);
    if (root.contains("first_step_plus_probability")) {
      at = "/first_step_plus_probability";
      w.first_step_plus = number(root, "", "first_step_plus_probability");
    }
    if (root.contains("checkpoints")) {
      at = "/checkpoints";
      const json& c = root.at("checkpoints");
      if (!c.is_array()) throw ConfigError(at, "expected an array of times");
      std::size_t i = 0;
      for (const auto& v : c) {
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
          throw ConfigError(at + "/" + std::to_string(i), "expected a positive integer");
        w.checkpoints.push_back(v.get<std::uint64_t>());
        ++i;
      }
      cfg.has_checkpoints = true;
    } else if (w.horizon > 0) {
      w.checkpoints = geometric_checkpoints(
          w.horizon, count(root, "", "checkpoints_per_decade", 10));
    }
    at = "/";
    if (root.contains("rpw")) {
      at = "/rpw";
      const json& r = root.at("rpw");
      only_keys(r, at, {"pA", "pB", "W0", "B0", "p0"});
      cfg.has_rpw = true;
      cfg.rpw.pA = number(r, at, "pA");
      cfg.rpw.pB = number(r, at, "pB");
      cfg.rpw.W0 = count(r, at, "W0", 0);
      cfg.rpw.B0 = count(r, at, "B0", 0);
      cfg.rpw.p0 = number_or(r, at, "p0", 1.0);
    }
    cfg.rpw.horizon = w.horizon;
    cfg.rpw.seed = w.seed;
    cfg.rpw.replicates = w.replicates;
    cfg.rpw.checkpoints = w.checkpoints;
    at = "/";
    w.validate();
    if (cfg.has_rpw) cfg.rpw.validate();
  } catch (const ModelError& e) {
    throw ConfigError(at, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace erw
