#pragma once
// JSON verification reports. Keys are emitted in sorted order and no
// timestamps are recorded, so equal inputs give byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace erw {

using Json = nlohmann::json;

struct Check {
  std::string experiment;
  Json inputs = Json::object();
  Json estimate;
  Json theory_value;
  Json tolerance;
  bool pass = false;
  std::string reference;
  Json details = Json::object();

  Json to_json() const;
};

struct Report {
  std::string command;
  Json parameters = Json::object();
  std::vector<Check> checks;
  /// Values reported without a pass/fail decision.
  Json diagnostics = Json::object();

  bool all_pass() const;
  Json to_json() const;
  /// Writes the report as indented JSON followed by a newline.
  void write(const std::filesystem::path& file) const;
};

/// Finite doubles pass through; NaN and infinities become null.
Json finite_or_null(double x);

}  // namespace erw
