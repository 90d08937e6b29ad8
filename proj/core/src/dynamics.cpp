#include "apla/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {
namespace {

constexpr double kSimplexTolerance = 1e-9;

void check_simplex(std::span<const double> x) {
  if (x.empty()) throw UsageError("strategy vector is empty");
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) throw UsageError("strategy has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << "strategy is not normalized (sum = " << sum << ")";
    throw UsageError(msg.str());
  }
}

// Applies x + step (e_chosen - x) and projects back onto the simplex by
// rescaling the non-chosen coordinates. Returns |sum - 1| before projection.
double update_in_place(std::span<double> x, std::size_t chosen, double step) {
  double raw_sum = 0.0;
  double others = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k == chosen) {
      x[k] = x[k] + step * (1.0 - x[k]);
    } else {
      x[k] = x[k] - step * x[k];
      others += x[k];
    }
    raw_sum += x[k];
  }
  const double drift = std::abs(raw_sum - 1.0);

  if (others > 0.0) {
    x[chosen] = std::min(x[chosen], 1.0);
    const double scale = (1.0 - x[chosen]) / others;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k != chosen) x[k] *= scale;
    }
  } else {
    x[chosen] = 1.0;
  }
  return drift;
}

void check_step(double step) {
  if (!(step >= 0.0) || step > 1.0) {
    std::ostringstream msg;
    msg << "reinforcement step epsilon*phi = " << step
        << " leaves the simplex; it must lie in [0, 1]";
    throw ParameterError(msg.str());
  }
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::PLA ? "pla" : "apla"; }

Mode parse_mode(std::string_view text) {
  if (text == "pla" || text == "PLA") return Mode::PLA;
  if (text == "apla" || text == "APLA") return Mode::APLA;
  throw UsageError("unknown mode '" + std::string(text) + "' (expected pla or apla)");
}

std::string_view to_string(NoiseModel noise) {
  return noise == NoiseModel::Uniform ? "uniform" : "truncated_gaussian";
}

NoiseModel parse_noise(std::string_view text) {
  if (text == "uniform") return NoiseModel::Uniform;
  if (text == "truncated_gaussian") return NoiseModel::TruncatedGaussian;
  throw UsageError("unknown noise model '" + std::string(text) + "'");
}

Params Params::slow_aspiration(double epsilon, Mode mode) {
  Params p;
  p.epsilon = epsilon;
  p.nu = epsilon;
  p.mode = mode;
  return p;
}

std::vector<std::string> validate(const Params& params, const Game& game) {
  std::vector<std::string> warnings;
  auto fail = [](const std::string& what) { throw ParameterError(what); };
  auto finite = [](double v) { return std::isfinite(v); };

  if (!finite(params.epsilon) || params.epsilon <= 0.0 || params.epsilon >= 1.0) {
    fail("epsilon must lie in (0, 1)");
  }
  if (!finite(params.nu) || params.nu <= 0.0) fail("nu must be positive");
  if (params.aspiration_step() > 1.0) fail("aspiration step epsilon*nu must not exceed 1");
  if (!finite(params.lambda) || params.lambda < 0.0 || params.lambda > 1.0) {
    fail("lambda must lie in [0, 1]");
  }
  if (!finite(params.h) || params.h < 0.0) fail("h must be nonnegative");
  if (!finite(params.c_asp) || params.c_asp < 0.0) fail("c_asp must be nonnegative");
  if (!finite(params.upsilon_bar) || params.upsilon_bar < 0.0) {
    fail("upsilon_bar must be nonnegative");
  }

  const double u_min = game.min_utility();
  const double u_max = game.max_utility();
  if (!(u_min - params.upsilon_bar > 0.0)) {
    std::ostringstream msg;
    msg << "measured utilities must stay positive: u_min - upsilon_bar = "
        << u_min - params.upsilon_bar << " <= 0";
    fail(msg.str());
  }
  const double top_step = params.epsilon * (u_max + params.upsilon_bar);
  if (!(top_step < 1.0)) {
    std::ostringstream msg;
    msg << "epsilon * (u_max + upsilon_bar) = " << top_step
        << " >= 1; reduce epsilon below " << 1.0 / (u_max + params.upsilon_bar);
    fail(msg.str());
  }
  if (params.mode == Mode::APLA) {
    if (!(params.h < u_min)) {
      std::ostringstream msg;
      msg << "APLA requires h < min utility (h = " << params.h << ", u_min = " << u_min << ")";
      fail(msg.str());
    }
    if (params.h == 0.0 || params.c_asp == 0.0) {
      warnings.emplace_back("APLA with h = 0 or c_asp = 0 degenerates towards PLA behaviour");
    } else if (params.h >= u_min - params.upsilon_bar) {
      warnings.emplace_back("noisy measurements can fall below h");
    }
  }
  if (params.nu >= 1.0) {
    warnings.emplace_back(
        "nu >= 1: aspiration levels do not move on a slower time-scale than strategies");
  }
  if (params.lambda == 0.0) {
    warnings.emplace_back(
        "lambda = 0: no trembles, the chain is not ergodic and stability predictions do not apply");
  }
  return warnings;
}

SystemState pure_strategy_state(const Game& game, ProfileId profile) {
  SystemState state;
  state.last_profile = profile;
  const auto actions = game.decode(profile);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    AgentState agent;
    agent.strategy.assign(game.num_actions(i), 0.0);
    agent.strategy[actions[i]] = 1.0;
    agent.aspiration = game.utility(i, profile);
    state.agents.push_back(std::move(agent));
  }
  return state;
}

SystemState initial_state(const Game& game, const Params& params,
                          const InitialCondition& init, CounterRng& rng) {
  switch (init.kind) {
    case InitialCondition::Kind::PureState:
      return pure_strategy_state(game, init.profile);
    case InitialCondition::Kind::Explicit: {
      if (init.strategies.size() != game.num_players() ||
          init.aspirations.size() != game.num_players()) {
        throw UsageError("explicit initial state needs one strategy and aspiration per player");
      }
      SystemState state;
      std::vector<std::size_t> actions(game.num_players());
      for (std::size_t i = 0; i < game.num_players(); ++i) {
        if (init.strategies[i].size() != game.num_actions(i)) {
          throw UsageError("initial strategy of player " + std::to_string(i) +
                           " has the wrong length");
        }
        check_simplex(init.strategies[i]);
        state.agents.push_back({init.strategies[i], init.aspirations[i]});
        actions[i] = static_cast<std::size_t>(
            std::max_element(init.strategies[i].begin(), init.strategies[i].end()) -
            init.strategies[i].begin());
      }
      state.last_profile = game.encode(actions);
      return state;
    }
    case InitialCondition::Kind::UniformSampled:
      break;
  }
  SystemState state;
  std::vector<std::size_t> actions(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const std::size_t k = game.num_actions(i);
    state.agents.push_back({std::vector<double>(k, 1.0 / static_cast<double>(k)), 0.0});
    actions[i] = sample_action(state.agents[i].strategy, params.lambda, rng);
  }
  state.last_profile = game.encode(actions);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    state.agents[i].aspiration =
        measure_utility(game, i, state.last_profile, params.upsilon_bar, rng, params.noise);
  }
  return state;
}

std::size_t sample_action(std::span<const double> strategy, double lambda, CounterRng& rng) {
  check_simplex(strategy);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in [0, 1]");
  if (rng.uniform() < lambda) {
    return static_cast<std::size_t>(rng.below(strategy.size()));
  }
  const double target = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < strategy.size(); ++k) {
    if (strategy[k] <= 0.0) continue;
    cumulative += strategy[k];
    last_positive = k;
    if (target < cumulative) return k;
  }
  return last_positive;
}

double draw_noise(double upsilon_bar, NoiseModel noise, CounterRng& rng) {
  if (noise == NoiseModel::Uniform) {
    return (2.0 * rng.uniform() - 1.0) * upsilon_bar;
  }
  // Gaussian with sigma = upsilon_bar / 2, truncated to [-upsilon_bar, upsilon_bar].
  if (upsilon_bar == 0.0) return 0.0;
  const double sigma = 0.5 * upsilon_bar;
  for (;;) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double v = sigma * z;
    if (std::abs(v) <= upsilon_bar) return v;
  }
}

double measure_utility(const Game& game, std::size_t player, ProfileId profile,
                       double upsilon_bar, CounterRng& rng, NoiseModel noise) {
  if (!(upsilon_bar >= 0.0)) throw UsageError("upsilon_bar must be nonnegative");
  return game.utility(player, profile) + draw_noise(upsilon_bar, noise, rng);
}

double aspiration_factor(double measured, double surplus, double h, double c_asp) {
  if (surplus >= 0.0) return measured;
  return std::max(h, measured + c_asp * surplus);
}

std::vector<double> reinforce(std::span<const double> x, std::size_t chosen, double step) {
  if (chosen >= x.size()) throw UsageError("chosen action out of range");
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (k == chosen) ? out[k] + step * (1.0 - out[k]) : out[k] - step * out[k];
  }
  return out;
}

std::vector<double> strategy_update(std::span<const double> x, std::size_t chosen, double phi,
                                    double epsilon) {
  if (chosen >= x.size()) throw UsageError("chosen action out of range");
  const double step = epsilon * phi;
  check_step(step);
  std::vector<double> out(x.begin(), x.end());
  update_in_place(out, chosen, step);
  return out;
}

double aspiration_update(double rho, double measured, double epsilon, double nu) {
  return rho + epsilon * nu * (measured - rho);
}

void advance(const Game& game, SystemState& state, const Params& params, CounterRng& rng,
             StepTrace* trace) {
  const std::size_t n = game.num_players();
  if (state.agents.size() != n) throw UsageError("state has the wrong number of agents");

  std::vector<std::size_t> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    actions[i] = sample_action(state.agents[i].strategy, params.lambda, rng);
  }
  const ProfileId profile = game.encode(actions);

  const double h = params.floor();
  const double c = params.slope();
  if (trace) {
    trace->actions = actions;
    trace->measured.assign(n, 0.0);
    trace->phi.assign(n, 0.0);
    trace->max_simplex_drift = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& agent = state.agents[i];
    const double measured =
        measure_utility(game, i, profile, params.upsilon_bar, rng, params.noise);
    const double phi = aspiration_factor(measured, measured - agent.aspiration, h, c);
    const double step = params.epsilon * phi;
    check_step(step);
    const double drift = update_in_place(agent.strategy, actions[i], step);
    agent.aspiration = aspiration_update(agent.aspiration, measured, params.epsilon, params.nu);
    if (trace) {
      trace->measured[i] = measured;
      trace->phi[i] = phi;
      trace->max_simplex_drift = std::max(trace->max_simplex_drift, drift);
    }
  }
  state.last_profile = profile;
  ++state.time;
}

SystemState step_round(const Game& game, const SystemState& state, const Params& params,
                       CounterRng& rng) {
  SystemState next = state;
  advance(game, next, params, rng);
  return next;
}

}  // namespace apla
