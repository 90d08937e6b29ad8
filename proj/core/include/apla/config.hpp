#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apla/json_io.hpp"
#include "apla/montecarlo.hpp"
#include "apla/transition.hpp"

namespace apla {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  int schema_version = kSchemaVersion;
  ExperimentConfig experiment;
  AnalysisOptions analysis;
  bool stationary = false;  // include the chain's stationary distribution in analyses
  std::string output_dir = "out";
  std::vector<std::string> warnings;
};

/// Parses a config document. Relative "game_file" paths resolve against
/// `base_dir`. A report carrying its effective config under "config" is
/// accepted as well. Throws ConfigError for schema problems and
/// ParameterError when the learning constants are inadmissible.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses `path`; a missing or unreadable file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Self-contained effective config (game inline) that parse_config accepts.
Json to_json(const RunConfig& config);

}  // namespace apla
