#include "apla/transition.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "apla/errors.hpp"

namespace apla {
namespace {

constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

// Power series for Li2(x), valid and fast for 0 <= x <= 1/2. The remainder
// after a term t is below t * x / (1 - x), which is what `tol` bounds.
double dilog_series(double x, double tol) {
  double sum = 0.0;
  double power = x;
  const double tail_factor = x / (1.0 - x);
  for (std::uint64_t l = 1; power > 0.0; ++l) {
    const double term = power / (static_cast<double>(l) * static_cast<double>(l));
    sum += term;
    if (term * tail_factor < tol) break;
    power *= x;
  }
  return sum;
}

void require_step(double epsilon, double u) {
  const double step = epsilon * u;
  if (!(step > 0.0 && step < 1.0)) {
    std::ostringstream msg;
    msg << "epsilon * u = " << step << " must lie in (0, 1)";
    throw ParameterError(msg.str());
  }
}

void require_open_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
}

// Smallest k >= 0 with base^k <= delta, for base in (0, 1) and delta in (0, 1].
std::uint64_t first_crossing(double base, double delta) {
  if (delta >= 1.0) return 0;
  double k = std::ceil(std::log(delta) / std::log(base));
  if (k < 0.0) k = 0.0;
  auto steps = static_cast<std::uint64_t>(k);
  // ceil() of the log ratio can be off by one when the ratio is an integer
  // up to rounding; settle it against the defining inequality.
  while (steps > 0 && std::pow(base, static_cast<double>(steps - 1)) <= delta) --steps;
  while (std::pow(base, static_cast<double>(steps)) > delta) ++steps;
  return steps;
}

}  // namespace

double dilog(double x, double tol) {
  if (!(x >= 0.0 && x <= 1.0)) throw UsageError("dilog argument must lie in [0, 1]");
  if (!(tol > 0.0)) throw UsageError("series tolerance must be positive");
  if (x == 1.0) return kZeta2;
  if (x <= 0.5) return dilog_series(x, tol);
  return kZeta2 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x, tol);
}

double eta(double delta, double tol) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw UsageError("eta requires delta in [0, 1]");
  if (!(tol > 0.0)) throw UsageError("series tolerance must be positive");
  if (delta == 1.0) return 0.0;
  if (delta <= 0.5) return kZeta2 - dilog_series(delta, tol);
  return std::log(delta) * std::log1p(-delta) + dilog_series(1.0 - delta, tol);
}

std::uint64_t nominal_hitting_time(double delta, double epsilon, double u) {
  require_step(epsilon, u);
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in (0, 1]");
  return first_crossing(1.0 - epsilon * u, delta);
}

double satisfactory_resistance_product(double delta, double epsilon, double u) {
  const std::uint64_t tau = nominal_hitting_time(delta, epsilon, u);
  const double base = 1.0 - epsilon * u;
  double log_sum = 0.0;
  double power = 1.0;
  for (std::uint64_t t = 0; t < tau; ++t) {
    power *= base;
    log_sum += std::log1p(-power);
  }
  return -log_sum;
}

double satisfactory_prob_product(double delta, double epsilon, double u) {
  return std::exp(-satisfactory_resistance_product(delta, epsilon, u));
}

double satisfactory_prob_asymptotic(double delta, double epsilon, double u) {
  require_open_delta(delta);
  if (!(epsilon > 0.0 && u > 0.0)) throw ParameterError("epsilon and u must be positive");
  return std::exp(-eta(delta) / (epsilon * u));
}

double unsatisfactory_prob_asymptotic(double delta, double epsilon, double h) {
  require_open_delta(delta);
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(h > 0.0)) {
    throw ParameterError("unsatisfactory transitions need h > 0; PLA edges use the satisfactory form");
  }
  return std::exp(-eta(delta) / (epsilon * h));
}

HittingBounds noisy_hitting_bounds(double delta, double epsilon, double u, double upsilon_bar,
                                   double c_asp) {
  if (!(upsilon_bar >= 0.0)) throw ParameterError("upsilon_bar must be nonnegative");
  if (!(delta > upsilon_bar && delta <= 1.0)) {
    throw ParameterError("hitting bounds need upsilon_bar < delta <= 1");
  }
  if (!(c_asp >= 0.0)) throw ParameterError("c_asp must be nonnegative");
  const double kappa = (1.0 + 2.0 * c_asp) * upsilon_bar;
  if (!(u - kappa > 0.0)) {
    std::ostringstream msg;
    msg << "hitting bounds need u > (1 + 2 c_asp) upsilon_bar (u = " << u
        << ", kappa = " << kappa << ")";
    throw ParameterError(msg.str());
  }
  require_step(epsilon, u + upsilon_bar);
  require_step(epsilon, u - kappa);
  return {first_crossing(1.0 - epsilon * (u + upsilon_bar), delta),
          first_crossing(1.0 - epsilon * (u - kappa), delta)};
}

std::string_view to_string(ResistanceMode mode) {
  return mode == ResistanceMode::Asymptotic ? "asymptotic" : "product";
}

ResistanceMode parse_resistance_mode(std::string_view text) {
  if (text == "asymptotic") return ResistanceMode::Asymptotic;
  if (text == "product") return ResistanceMode::Product;
  throw UsageError("unknown resistance mode '" + std::string(text) +
                   "' (expected asymptotic or product)");
}

EdgeAnalysis analyze_edge(const Game& game, const Params& params, const AnalysisOptions& options,
                          ProfileId from, ProfileId to) {
  if (from == to) throw UsageError("one-step edge needs distinct endpoints");
  const auto mover = game.sole_mover(from, to);
  if (!mover) {
    throw UsageError("profiles " + game.label(from) + " and " + game.label(to) +
                     " differ in more than one player's action");
  }
  require_open_delta(options.delta);

  EdgeAnalysis edge;
  edge.from = from;
  edge.to = to;
  edge.mover = *mover;
  edge.gamma = 1.0 / static_cast<double>(game.num_players() * game.num_actions(*mover));

  const double u_from = game.utility(*mover, from);
  const double u_to = game.utility(*mover, to);
  edge.satisfactory = u_to >= u_from;
  if (!(u_to > 0.0)) throw DomainError("one-step analysis needs strictly positive utilities");

  const double scale = eta(options.delta) / params.epsilon;
  if (params.mode == Mode::APLA && !edge.satisfactory) {
    if (!(params.h > 0.0)) {
      throw ParameterError("APLA unsatisfactory transitions need h > 0");
    }
    edge.coefficient = 1.0 / params.h;
    edge.resistance = scale * edge.coefficient;
  } else {
    edge.coefficient = 1.0 / u_to;
    edge.resistance = options.resistance == ResistanceMode::Product
                          ? satisfactory_resistance_product(options.delta, params.epsilon, u_to)
                          : scale * edge.coefficient;
  }
  edge.probability = std::exp(-edge.resistance);
  return edge;
}

}  // namespace apla
