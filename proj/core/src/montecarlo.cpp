#include "apla/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "apla/errors.hpp"
#include "apla/json_io.hpp"
#include "apla/rng.hpp"
#include "apla/stability.hpp"

namespace apla {

std::vector<ProfileId> ExperimentConfig::tracked_profiles() const {
  if (!tracked.empty()) return tracked;
  std::vector<ProfileId> all;
  for (std::size_t p = 0; p < game.num_profiles(); ++p) all.push_back(ProfileId{p});
  return all;
}

std::vector<std::string> validate(const ExperimentConfig& config) {
  if (config.horizon < 1) throw UsageError("horizon must be at least 1");
  if (config.runs < 1) throw UsageError("runs must be at least 1");
  if (!(config.end_window_fraction > 0.0 && config.end_window_fraction <= 1.0)) {
    throw UsageError("end_window_fraction must lie in (0, 1]");
  }
  if (config.series_points < 1) throw UsageError("series_points must be at least 1");
  for (ProfileId p : config.tracked) {
    if (p.value >= config.game.num_profiles()) throw UsageError("tracked profile out of range");
  }
  if (config.init.kind == InitialCondition::Kind::PureState &&
      config.init.profile.value >= config.game.num_profiles()) {
    throw UsageError("initial profile out of range");
  }
  return validate(config.params, config.game);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  const double n = static_cast<double>(values.size());
  s.mean = std::clamp(total / n, s.min, s.max);
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / (n - 1.0));
  }
  return s;
}

std::uint64_t end_window_length(std::uint64_t horizon, double fraction) {
  const auto length = static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(horizon)));
  return std::clamp<std::uint64_t>(length, 1, horizon);
}

namespace {

std::vector<std::uint64_t> sample_times(std::uint64_t horizon, std::size_t points) {
  std::vector<std::uint64_t> times;
  const std::uint64_t count = std::min<std::uint64_t>(horizon, points);
  times.reserve(count);
  for (std::uint64_t k = 1; k <= count; ++k) {
    // ceil(k * horizon / count) without overflow for realistic horizons
    const std::uint64_t t = (k * horizon + count - 1) / count;
    if (times.empty() || t > times.back()) times.push_back(t);
  }
  return times;
}

}  // namespace

ReplicateStats run_replicate(const ExperimentConfig& config, std::size_t run_index) {
  const Game& game = config.game;
  const std::size_t profiles = game.num_profiles();
  const auto tracked = config.tracked_profiles();
  const std::uint64_t horizon = config.horizon;
  const std::uint64_t window_start = horizon - end_window_length(horizon, config.end_window_fraction);

  CounterRng rng(config.seed, run_index);
  SystemState state = initial_state(game, config.params, config.init, rng);

  ReplicateStats stats;
  stats.run_index = run_index;
  stats.series_times = sample_times(horizon, config.series_points);
  stats.series.reserve(stats.series_times.size());
  if (config.keep_raw) stats.raw_profiles.reserve(horizon);

  std::vector<std::uint64_t> total(profiles, 0);
  std::vector<std::uint64_t> window(profiles, 0);
  std::size_t next_sample = 0;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    advance(game, state, config.params, rng);
    const std::size_t p = state.last_profile.value;
    ++total[p];
    if (t > window_start) ++window[p];
    if (config.keep_raw) stats.raw_profiles.push_back(static_cast<std::uint32_t>(p));
    if (next_sample < stats.series_times.size() && stats.series_times[next_sample] == t) {
      std::vector<double> row;
      row.reserve(tracked.size());
      for (ProfileId q : tracked) {
        row.push_back(static_cast<double>(total[q.value]) / static_cast<double>(t));
      }
      stats.series.push_back(std::move(row));
      ++next_sample;
    }
  }

  const double window_len = static_cast<double>(horizon - window_start);
  stats.cumulative.resize(profiles);
  stats.end_window.resize(profiles);
  for (std::size_t p = 0; p < profiles; ++p) {
    stats.cumulative[p] = static_cast<double>(total[p]) / static_cast<double>(horizon);
    stats.end_window[p] = static_cast<double>(window[p]) / window_len;
  }
  stats.final_profile = state.last_profile;
  return stats;
}

std::size_t effective_threads(const ExperimentConfig& config) {
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("APLA_LAB_THREADS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(cap, &end, 10);
    if (end != cap && *end == '\0' && value > 0) threads = std::min<std::size_t>(threads, value);
  }
  return std::clamp<std::size_t>(threads, 1, config.runs);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  report.warnings = validate(config);
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  report.horizon = config.horizon;
  report.end_window_length = end_window_length(config.horizon, config.end_window_fraction);
  report.tracked = config.tracked_profiles();

  report.replicates.resize(config.runs);
  const std::size_t workers = effective_threads(config);
  if (workers <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r) report.replicates[r] = run_replicate(config, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = next++; r < config.runs; r = next++) {
            report.replicates[r] = run_replicate(config, r);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const std::size_t profiles = config.game.num_profiles();
  std::vector<double> cumulative(config.runs), window(config.runs), final_hit(config.runs);
  for (std::size_t p = 0; p < profiles; ++p) {
    for (std::size_t r = 0; r < config.runs; ++r) {
      const auto& rep = report.replicates[r];
      cumulative[r] = rep.cumulative[p];
      window[r] = rep.end_window[p];
      final_hit[r] = rep.final_profile.value == p ? 1.0 : 0.0;
    }
    report.profiles.push_back(
        {ProfileId{p}, summarize(cumulative), summarize(window), summarize(final_hit)});
  }

  report.series_times = report.replicates.front().series_times;
  report.mean_series.assign(report.series_times.size(),
                            std::vector<double>(report.tracked.size(), 0.0));
  for (const auto& rep : report.replicates) {
    for (std::size_t k = 0; k < rep.series.size(); ++k) {
      for (std::size_t j = 0; j < rep.series[k].size(); ++j) report.mean_series[k][j] += rep.series[k][j];
    }
  }
  for (auto& row : report.mean_series) {
    for (double& v : row) v /= static_cast<double>(config.runs);
  }
  return report;
}

PredictionVerdict compare_prediction(const Game& game, const Params& params,
                                     const ExperimentReport& report,
                                     const AnalysisOptions& options) {
  PredictionVerdict verdict;
  if (report.profiles.size() != game.num_profiles()) {
    throw UsageError("report does not match the game's profile count");
  }
  std::size_t top = 0;
  for (std::size_t p = 1; p < report.profiles.size(); ++p) {
    if (report.profiles[p].end_window.mean > report.profiles[top].end_window.mean) top = p;
  }
  double runner_up = 0.0;
  for (std::size_t p = 0; p < report.profiles.size(); ++p) {
    if (p != top) runner_up = std::max(runner_up, report.profiles[p].end_window.mean);
  }
  verdict.observed_mode = ProfileId{top};
  verdict.observed_frequency = report.profiles[top].end_window.mean;
  verdict.margin = verdict.observed_frequency - runner_up;

  std::ostringstream why;
  try {
    verdict.predicted = analyze(game, params, options).stable_set;
  } catch (const Error& e) {
    verdict.applicable = false;
    why << "no prediction available: " << e.what();
  }
  if (verdict.applicable && params.lambda == 0.0) {
    verdict.applicable = false;
    why << "lambda = 0: without trembles the process is not ergodic and the prediction does not apply";
  }

  verdict.match = verdict.applicable &&
                  std::find(verdict.predicted.begin(), verdict.predicted.end(),
                            verdict.observed_mode) != verdict.predicted.end();
  if (verdict.applicable) {
    why << "observed mode " << game.label(verdict.observed_mode) << " with mean end-window frequency "
        << verdict.observed_frequency << (verdict.match ? " lies in" : " is outside")
        << " the predicted stable set";
    if (verdict.margin == 0.0) why << " (tied with another profile)";
  }
  verdict.explanation = why.str();
  return verdict;
}

}  // namespace apla
