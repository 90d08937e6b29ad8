#include "apla/stability.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {

ResistanceDigraph build_digraph(const Game& game, const Params& params,
                                const AnalysisOptions& options) {
  std::vector<EdgeAnalysis> edges;
  for (std::size_t s = 0; s < game.num_profiles(); ++s) {
    const ProfileId from{s};
    for (std::size_t i = 0; i < game.num_players(); ++i) {
      const std::size_t current = game.action_of(from, i);
      for (std::size_t a = 0; a < game.num_actions(i); ++a) {
        if (a == current) continue;
        edges.push_back(analyze_edge(game, params, options, from, game.with_action(from, i, a)));
      }
    }
  }
  return ResistanceDigraph(game.num_profiles(), std::move(edges));
}

WGraph build_improvement_sne_graph(const Game& game) {
  const auto acyclicity = is_weakly_acyclic(game);
  if (!acyclicity.weakly_acyclic) {
    throw DomainError("game is not weakly acyclic; no improvement {S_NE}-graph exists");
  }
  WGraph graph;
  graph.roots = pure_nash_equilibria(game);

  // Union of the witness paths; per node keep the arrow whose remaining
  // distance to the Nash set is smallest, then the smallest destination.
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::map<ProfileId, std::pair<std::size_t, ProfileId>> chosen;
  for (const auto& [start, path] : acyclicity.witnesses) {
    const std::size_t steps = path.length();
    for (std::size_t k = 0; k < steps; ++k) {
      const ProfileId from = path.profiles[k];
      const ProfileId to = path.profiles[k + 1];
      const std::size_t remaining = steps - k - 1;
      auto [it, inserted] = chosen.try_emplace(from, kFar, to);
      auto& [best_remaining, best_to] = it->second;
      if (remaining < best_remaining || (remaining == best_remaining && to < best_to)) {
        best_remaining = remaining;
        best_to = to;
      }
    }
  }
  for (const auto& [from, entry] : chosen) graph.arrows.emplace(from, entry.second);
  return graph;
}

std::string_view to_string(PredictionClass prediction) {
  switch (prediction) {
    case PredictionClass::SubsetNash:
      return "subset_of_nash";
    case PredictionClass::SubsetPayoffDominant:
      return "subset_of_payoff_dominant";
    case PredictionClass::None:
      break;
  }
  return "none";
}

CorollaryReport check_corollaries(const Game& game, const Params& params) {
  CorollaryReport report;
  report.positive_utility = validate_positive_utility(game);
  report.nash = pure_nash_equilibria(game);
  report.payoff_dominant = payoff_dominant_equilibria(game);
  report.weakly_acyclic = is_weakly_acyclic(game).weakly_acyclic;

  const double u_min = game.min_utility();
  if (params.mode == Mode::APLA) {
    report.floor_below_min_utility = params.h > 0.0 && params.h < u_min;
  }

  if (report.weakly_acyclic && !report.payoff_dominant.empty()) {
    const std::set<ProfileId> nash(report.nash.begin(), report.nash.end());
    bool all = true;
    for (std::size_t p = 0; p < game.num_profiles() && all; ++p) {
      if (nash.contains(ProfileId{p})) continue;
      all = improvement_path_to(game, ProfileId{p}, report.payoff_dominant, true).has_value();
    }
    report.best_reply_paths_to_dominant = all;
  }

  if (!report.positive_utility) {
    report.warnings.emplace_back("utilities are not all positive; resistance analysis is undefined");
  }
  if (!report.weakly_acyclic) {
    report.warnings.emplace_back("game is not weakly acyclic; the Nash containment guarantees do not apply");
  }
  if (params.mode == Mode::PLA) {
    report.warnings.emplace_back(
        "PLA mode has no aspiration floor; only the minimum-resistance ranking applies");
  } else {
    if (!report.floor_below_min_utility) {
      std::ostringstream msg;
      msg << "aspiration floor h = " << params.h << " is not inside (0, " << u_min
          << "); Nash containment is not guaranteed and the prediction is downgraded";
      report.warnings.push_back(msg.str());
    }
    if (params.h == 0.0 || params.c_asp == 0.0) {
      report.warnings.emplace_back(
          "h = 0 or c_asp = 0 moves APLA toward PLA; payoff-dominant selection "
          "needs h > 0 and c_asp > 0");
    }
  }

  if (report.positive_utility && report.weakly_acyclic && report.floor_below_min_utility) {
    report.prediction = report.best_reply_paths_to_dominant ? PredictionClass::SubsetPayoffDominant
                                                            : PredictionClass::SubsetNash;
  }
  return report;
}

StabilityReport analyze(const Game& game, const Params& params, const AnalysisOptions& options,
                        AnalyzeRequest request) {
  StabilityReport report;
  report.params = params;
  report.options = options;
  report.warnings = validate(params, game);
  report.digraph = build_digraph(game, params, options);
  report.coefficients = min_resistances(report.digraph, Weighting::Coefficient);
  report.finite_resistances.reserve(game.num_profiles());
  for (std::size_t s = 0; s < game.num_profiles(); ++s) {
    report.finite_resistances.push_back(
        min_resistance(report.digraph, ProfileId{s}, Weighting::Resistance).value);
  }
  report.stable_set = stochastically_stable_set(report.coefficients, options.rel_tol);
  report.corollaries = check_corollaries(game, params);
  if (report.corollaries.prediction == PredictionClass::SubsetPayoffDominant) {
    const auto& dominant = report.corollaries.payoff_dominant;
    const bool contained = std::all_of(report.stable_set.begin(), report.stable_set.end(), [&](ProfileId s) {
      return std::find(dominant.begin(), dominant.end(), s) != dominant.end();
    });
    if (!contained) {
      report.warnings.emplace_back(
          "stable set includes equilibria that are not payoff-dominant but tie with them at the "
          "minimum resistance");
    }
  }

  if (request.stationary) {
    if (game.num_profiles() <= options.enumeration_cap) {
      report.stationary_tree_sum =
          fw_stationary(report.digraph, ChainMode::TreeSum, options.enumeration_cap);
    } else {
      report.warnings.emplace_back("tree-sum stationary distribution skipped above the enumeration cap");
    }
    try {
      report.stationary_solver = fw_stationary(report.digraph, ChainMode::Solver);
    } catch (const ParameterError& e) {
      report.warnings.emplace_back(e.what());
    }
  }
  return report;
}

}  // namespace apla
