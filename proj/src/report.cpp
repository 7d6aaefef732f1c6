#include "erw/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace erw {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json Check::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["inputs"] = inputs;
  j["estimate"] = estimate;
  j["theory_value"] = theory_value;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["reference"] = reference;
  j["details"] = details;
  return j;
}

bool Report::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["all_pass"] = all_pass();
  j["diagnostics"] = diagnostics;
  j["checks"] = Json::array();
  for (const Check& c : checks) j["checks"].push_back(c.to_json());
  return j;
}

void Report::write(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

}  // namespace erw
