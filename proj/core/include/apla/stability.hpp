#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apla/digraph.hpp"
#include "apla/dynamics.hpp"
#include "apla/game.hpp"
#include "apla/transition.hpp"

namespace apla {

/// Every ordered pair of profiles that differ in one player's action,
/// priced with analyze_edge. Produces sum_s sum_i (|A_i| - 1) edges.
ResistanceDigraph build_digraph(const Game& game, const Params& params,
                                const AnalysisOptions& options = {});

/// W-graph rooted at the Nash set whose arrows are all better replies.
/// Throws DomainError if the game is not weakly acyclic.
WGraph build_improvement_sne_graph(const Game& game);

enum class PredictionClass {
  None,                  // no structural guarantee beyond minimum resistance
  SubsetNash,            // stable set contained in the pure Nash equilibria
  SubsetPayoffDominant,  // stable set contained in the payoff-dominant equilibria
};

std::string_view to_string(PredictionClass prediction);

struct CorollaryReport {
  bool positive_utility = false;
  bool weakly_acyclic = false;
  bool floor_below_min_utility = false;  // 0 < h < min utility, APLA only
  bool best_reply_paths_to_dominant = false;
  std::vector<ProfileId> nash;
  std::vector<ProfileId> payoff_dominant;
  PredictionClass prediction = PredictionClass::None;
  std::vector<std::string> warnings;
};

CorollaryReport check_corollaries(const Game& game, const Params& params);

struct StabilityReport {
  Params params;
  AnalysisOptions options;
  ResistanceDigraph digraph;
  std::vector<MinResistance> coefficients;  // per node, epsilon/delta-free
  std::vector<double> finite_resistances;   // per node, at the configured (epsilon, delta)
  std::vector<ProfileId> stable_set;
  std::optional<std::vector<double>> stationary_tree_sum;
  std::optional<std::vector<double>> stationary_solver;
  CorollaryReport corollaries;
  std::vector<std::string> warnings;
};

struct AnalyzeRequest {
  bool stationary = false;  // also compute the chain's stationary distribution
};

/// Full resistance analysis. Stationary vectors are only filled when
/// requested; the tree-sum form is skipped above the enumeration cap, and a
/// solver-mode failure is recorded as a warning.
StabilityReport analyze(const Game& game, const Params& params,
                        const AnalysisOptions& options = {}, AnalyzeRequest request = {});

}  // namespace apla
