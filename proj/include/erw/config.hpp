#pragma once
// JSON experiment configuration with a strict schema.

#include <optional>
#include <stdexcept>
#include <string>

#include "erw/model.hpp"
#include "erw/walkers.hpp"

namespace erw {

/// Bad configuration. `where` is a JSON pointer or "line:col".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ExperimentConfig {
  WalkConfig walk;
  RpwConfig rpw;
  bool has_rpw = false;
  bool has_checkpoints = false;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace erw
