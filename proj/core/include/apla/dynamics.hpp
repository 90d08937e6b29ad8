#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apla/game.hpp"
#include "apla/rng.hpp"

namespace apla {

enum class Mode { PLA, APLA };
enum class NoiseModel { Uniform, TruncatedGaussian };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);
std::string_view to_string(NoiseModel noise);
NoiseModel parse_noise(std::string_view text);

/// Learning constants. In PLA mode the aspiration floor and slope are forced
/// to zero, so the aspiration factor collapses to the measured utility.
struct Params {
  double epsilon = 0.06;      // strategy step size
  double nu = 0.06;           // aspiration step is epsilon * nu
  double lambda = 0.04;       // tremble probability
  double h = 0.04;            // aspiration floor
  double c_asp = 30.0;        // penalty slope for negative surplus
  double upsilon_bar = 0.0;   // utility noise bound
  Mode mode = Mode::APLA;
  NoiseModel noise = NoiseModel::Uniform;

  double floor() const { return mode == Mode::PLA ? 0.0 : h; }
  double slope() const { return mode == Mode::PLA ? 0.0 : c_asp; }
  double aspiration_step() const { return epsilon * nu; }

  /// Slow-aspiration schedule nu(epsilon) = epsilon, i.e. aspiration step epsilon^2.
  static Params slow_aspiration(double epsilon, Mode mode = Mode::APLA);
};

/// Checks the admissible region against `game`. Throws ParameterError on a
/// violation and returns non-fatal warnings.
std::vector<std::string> validate(const Params& params, const Game& game);

struct AgentState {
  std::vector<double> strategy;
  double aspiration = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct SystemState {
  std::vector<AgentState> agents;
  ProfileId last_profile;
  std::uint64_t time = 0;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct InitialCondition {
  enum class Kind { UniformSampled, PureState, Explicit };
  Kind kind = Kind::UniformSampled;
  ProfileId profile;                          // PureState
  std::vector<std::vector<double>> strategies;  // Explicit
  std::vector<double> aspirations;              // Explicit
};

/// Vertex strategies on `profile` and aspirations equal to the utilities there.
SystemState pure_strategy_state(const Game& game, ProfileId profile);

SystemState initial_state(const Game& game, const Params& params,
                          const InitialCondition& init, CounterRng& rng);

std::size_t sample_action(std::span<const double> strategy, double lambda, CounterRng& rng);

double draw_noise(double upsilon_bar, NoiseModel noise, CounterRng& rng);

double measure_utility(const Game& game, std::size_t player, ProfileId profile,
                       double upsilon_bar, CounterRng& rng,
                       NoiseModel noise = NoiseModel::Uniform);

/// Reinforcement multiplier: `measured` when surplus >= 0, otherwise
/// max{h, measured + c_asp * surplus}.
double aspiration_factor(double measured, double surplus, double h, double c_asp);

/// Literal update x + step * (e_chosen - x) without any projection.
std::vector<double> reinforce(std::span<const double> x, std::size_t chosen, double step);

/// Reinforcement followed by projection back onto the simplex. The chosen
/// coordinate never decreases. Throws ParameterError if epsilon * phi
/// falls outside [0, 1].
std::vector<double> strategy_update(std::span<const double> x, std::size_t chosen, double phi,
                                    double epsilon);

double aspiration_update(double rho, double measured, double epsilon, double nu);

struct StepTrace {
  std::vector<std::size_t> actions;
  std::vector<double> measured;
  std::vector<double> phi;
  double max_simplex_drift = 0.0;  // |sum - 1| of the unprojected updates
};

/// In-place synchronous round: every player samples from its pre-round
/// strategy, then each measures, reinforces, and moves its aspiration.
void advance(const Game& game, SystemState& state, const Params& params, CounterRng& rng,
             StepTrace* trace = nullptr);

SystemState step_round(const Game& game, const SystemState& state, const Params& params,
                       CounterRng& rng);

}  // namespace apla
