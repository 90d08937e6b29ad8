#include "apla/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {
namespace {

Json read_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON in ") + what + " '" + path.string() + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  if (doc.is_object() && doc.contains("config") && !doc.contains("schema_version")) {
    return parse_config(doc.at("config"), base_dir);
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const std::vector<std::string> known{"schema_version", "game", "game_file", "params",
                                                "experiment", "analysis", "output_dir", "name"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown top-level key '" + key + "'");
    }
  }

  RunConfig config;
  if (!doc.contains("schema_version")) throw ConfigError("config lacks 'schema_version'");
  const Json& version = doc.at("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  if (doc.contains("game") == doc.contains("game_file")) {
    throw ConfigError("config needs exactly one of 'game' or 'game_file'");
  }
  if (doc.contains("game")) {
    config.experiment.game = game_from_json(doc.at("game"));
  } else {
    if (!doc.at("game_file").is_string()) throw ConfigError("'game_file' must be a string path");
    std::filesystem::path file = doc.at("game_file").get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    if (!std::filesystem::exists(file)) {
      throw ConfigError("game file '" + file.string() + "' does not exist");
    }
    config.experiment.game = game_from_json(read_json_file(file, "game file"));
  }

  if (doc.contains("params")) config.experiment.params = params_from_json(doc.at("params"));
  if (doc.contains("experiment")) experiment_from_json(doc.at("experiment"), config.experiment);
  if (doc.contains("analysis")) {
    const Json& analysis = doc.at("analysis");
    config.analysis = analysis_from_json(analysis);
    if (analysis.contains("stationary")) {
      if (!analysis.at("stationary").is_boolean()) {
        throw ConfigError("analysis.stationary must be a boolean");
      }
      config.stationary = analysis.at("stationary").get<bool>();
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ConfigError("'output_dir' must be a string");
    config.output_dir = doc.at("output_dir").get<std::string>();
  }

  if (!(config.analysis.delta > 0.0 && config.analysis.delta < 1.0)) {
    throw ParameterError("analysis.delta must lie in (0, 1)");
  }
  if (!(config.analysis.rel_tol > 0.0)) throw ParameterError("analysis.rel_tol must be positive");
  try {
    config.warnings = validate(config.experiment);
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  const Json doc = read_json_file(path, "config");
  return parse_config(doc, path.parent_path());
}

Json to_json(const RunConfig& config) {
  Json doc = to_json(config.experiment);
  doc["schema_version"] = config.schema_version;
  Json analysis = to_json(config.analysis);
  analysis["stationary"] = config.stationary;
  doc["analysis"] = analysis;
  doc["output_dir"] = config.output_dir;
  return doc;
}

}  // namespace apla
