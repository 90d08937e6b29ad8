#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "apla/dynamics.hpp"
#include "apla/game.hpp"
#include "apla/montecarlo.hpp"
#include "apla/stability.hpp"
#include "apla/transition.hpp"

namespace apla {

using Json = nlohmann::json;

/// Game document: {"action_counts": [...], "utilities": [[per profile] per player]}
/// with profiles ordered mixed-radix, player 0 least significant.
/// Throws ConfigError on a malformed document.
Game game_from_json(const Json& doc);
Json to_json(const Game& game);

/// Fields missing from `doc` keep their value from `base`.
Params params_from_json(const Json& doc, Params base = {});
Json to_json(const Params& params);

AnalysisOptions analysis_from_json(const Json& doc, AnalysisOptions base = {});
Json to_json(const AnalysisOptions& options);

Json to_json(const InitialCondition& init);
InitialCondition init_from_json(const Json& doc);

/// Overwrites the experiment fields present in `doc` (game and params untouched).
void experiment_from_json(const Json& doc, ExperimentConfig& config);

/// Canonical form of everything that determines an experiment's output
/// (the worker count is excluded).
Json to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical JSON text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const ExperimentConfig& config);

Json profile_json(const Game& game, ProfileId profile);
Json profiles_json(const Game& game, const std::vector<ProfileId>& profiles);

Json to_json(const Game& game, const CorollaryReport& report);
Json to_json(const Game& game, const StabilityReport& report);
Json to_json(const Game& game, const ExperimentReport& report);
Json to_json(const Game& game, const PredictionVerdict& verdict);

/// Tidy time series: run,t,profile,cumulative_freq.
void write_series_csv(std::ostream& out, const Game& game, const ExperimentReport& report);

}  // namespace apla
