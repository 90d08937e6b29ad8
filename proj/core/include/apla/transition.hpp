#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "apla/dynamics.hpp"
#include "apla/game.hpp"

namespace apla {

/// eta(delta) = sum_{l>=1} (1 - delta^l) / l^2 = pi^2/6 - Li2(delta).
/// Li2 is summed as a power series truncated once the bound on the remaining
/// tail drops below `tol`; above delta = 1/2 the reflection
/// Li2(d) = pi^2/6 - ln(d) ln(1-d) - Li2(1-d) keeps the series argument below
/// 1/2. Throws UsageError when delta is outside [0, 1].
double eta(double delta, double tol = 1e-16);

/// Dilogarithm on [0, 1].
double dilog(double x, double tol = 1e-16);

/// Smallest t >= 0 with (1 - epsilon*u)^t <= delta, i.e. ceil(ln delta / ln(1 - epsilon*u)).
std::uint64_t nominal_hitting_time(double delta, double epsilon, double u);

/// -ln of prod_{t < tau} (1 - H^{t+1}), H = 1 - epsilon*u, tau = nominal_hitting_time.
double satisfactory_resistance_product(double delta, double epsilon, double u);
double satisfactory_prob_product(double delta, double epsilon, double u);

/// exp(-eta(delta) / (epsilon * u)).
double satisfactory_prob_asymptotic(double delta, double epsilon, double u);
/// exp(-eta(delta) / (epsilon * h)).
double unsatisfactory_prob_asymptotic(double delta, double epsilon, double h);

struct HittingBounds {
  std::uint64_t min_steps = 0;  // fastest growth, reward u + upsilon_bar every round
  std::uint64_t max_steps = 0;  // slowest growth, reward u - (1 + 2 c_asp) upsilon_bar
};

/// Essential infimum/supremum of the first hitting time of a satisfactory
/// one-step transition under bounded noise. Requires delta > upsilon_bar >= 0
/// and u > (1 + 2 c_asp) upsilon_bar.
HittingBounds noisy_hitting_bounds(double delta, double epsilon, double u, double upsilon_bar,
                                   double c_asp);

enum class ResistanceMode { Asymptotic, Product };

std::string_view to_string(ResistanceMode mode);
ResistanceMode parse_resistance_mode(std::string_view text);

struct AnalysisOptions {
  double delta = 0.1;
  ResistanceMode resistance = ResistanceMode::Asymptotic;
  double rel_tol = 1e-9;
  std::size_t enumeration_cap = 12;
};

/// Annotated one-step transition between pure strategy states.
struct EdgeAnalysis {
  ProfileId from;
  ProfileId to;
  std::size_t mover = 0;
  bool satisfactory = true;
  double probability = 1.0;   // approximate reach probability (without gamma)
  double resistance = 0.0;    // -ln(probability)
  double coefficient = 0.0;   // epsilon- and delta-free resistance coefficient
  double gamma = 1.0;         // 1 / (n |A_mover|)
};

/// Classifies and prices the one-step transition `from` -> `to`. Throws
/// UsageError unless the profiles differ in exactly one coordinate, and
/// ParameterError for an APLA unsatisfactory edge with h = 0.
EdgeAnalysis analyze_edge(const Game& game, const Params& params, const AnalysisOptions& options,
                          ProfileId from, ProfileId to);

}  // namespace apla
