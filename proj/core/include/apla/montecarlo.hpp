#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "apla/dynamics.hpp"
#include "apla/game.hpp"
#include "apla/transition.hpp"

namespace apla {

struct ExperimentConfig {
  Game game = coordination_game(5.0, 1.0, 3.0, 4.0);
  Params params;
  std::uint64_t horizon = 200000;
  std::size_t runs = 10;
  std::uint64_t seed = 20250101;
  std::vector<ProfileId> tracked;      // empty: every profile
  double end_window_fraction = 0.1;
  InitialCondition init;
  std::size_t series_points = 2000;    // cap on stored time-series samples per run
  bool keep_raw = false;               // also keep the full profile sequence
  std::size_t threads = 0;             // 0: hardware concurrency (capped by APLA_LAB_THREADS)

  /// Profiles reported in the time series.
  std::vector<ProfileId> tracked_profiles() const;
};

/// Throws UsageError on a malformed experiment block and ParameterError when
/// the learning constants are inadmissible for the game. Returns warnings.
std::vector<std::string> validate(const ExperimentConfig& config);

struct ReplicateStats {
  std::size_t run_index = 0;
  std::vector<double> cumulative;   // per profile, over all rounds
  std::vector<double> end_window;   // per profile, over the trailing window
  ProfileId final_profile;
  std::vector<std::uint64_t> series_times;
  std::vector<std::vector<double>> series;  // [sample][tracked] cumulative frequency
  std::vector<std::uint32_t> raw_profiles;  // filled only with keep_raw

  friend bool operator==(const ReplicateStats&, const ReplicateStats&) = default;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

Summary summarize(const std::vector<double>& values);

struct ProfileSummary {
  ProfileId profile;
  Summary cumulative;
  Summary end_window;
  Summary final_indicator;

  friend bool operator==(const ProfileSummary&, const ProfileSummary&) = default;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  std::uint64_t end_window_length = 0;
  std::vector<ProfileId> tracked;
  std::vector<ReplicateStats> replicates;
  std::vector<ProfileSummary> profiles;          // one per profile of the game
  std::vector<std::uint64_t> series_times;
  std::vector<std::vector<double>> mean_series;  // [sample][tracked] across runs
  std::vector<std::string> warnings;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

std::uint64_t end_window_length(std::uint64_t horizon, double fraction);

ReplicateStats run_replicate(const ExperimentConfig& config, std::size_t run_index);

/// Runs every replicate (in parallel when threads allow) and reduces the
/// results in run-index order, so the report does not depend on scheduling.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Worker count actually used for `config`.
std::size_t effective_threads(const ExperimentConfig& config);

struct PredictionVerdict {
  bool applicable = true;
  bool match = false;
  std::vector<ProfileId> predicted;
  ProfileId observed_mode;
  double observed_frequency = 0.0;
  double margin = 0.0;  // mode frequency minus the runner-up
  std::string explanation;
};

/// Checks whether the profile with the highest mean end-window frequency
/// lies in the predicted stochastically stable set.
PredictionVerdict compare_prediction(const Game& game, const Params& params,
                                     const ExperimentReport& report,
                                     const AnalysisOptions& options = {});

}  // namespace apla
