#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chs/asymptotics.hpp"
#include "chs/mountain_pass.hpp"
#include "chs/params.hpp"

namespace chs::cli {

// Schema violation; the message starts with the dotted field path.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int points = 512;
  double grading = 2.0;
  std::optional<std::string> cache_dir;  // kernel cache, off when empty
};

struct OutputSpec {
  std::string dir = "chs_out";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(const std::string& format) const;
};

struct RunConfig {
  ProblemParams problem;
  GridSpec grid;
  SolverConfig solver;
  SweepConfig sweep;
  OutputSpec output;
};

// Flag overrides for the problem block, applied after the file.
struct ProblemOverrides {
  std::optional<int> N;
  std::optional<double> alpha, s, p, q, lambda, mu, radius;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& file);

// Applies the overrides and re-runs the cross-field checks.
void apply_overrides(RunConfig& cfg, const ProblemOverrides& o);

// Full resolved config, defaults included.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace chs::cli
