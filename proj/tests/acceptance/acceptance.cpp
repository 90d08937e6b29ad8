// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apla/config.hpp"
#include "apla/digraph.hpp"
#include "apla/dynamics.hpp"
#include "apla/montecarlo.hpp"
#include "apla/rng.hpp"
#include "apla/stability.hpp"
#include "apla/transition.hpp"
#include "generators.hpp"
#include "linear_oracle.hpp"

#ifdef APLA_HAVE_CLI
#include "cli.hpp"
#endif

namespace fs = std::filesystem;
using namespace apla;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      result_.pass = false;
      if (failures_++ < 5) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& text) { info_ << (info_.tellp() > 0 ? ", " : "") << text; }
  Outcome finish() {
    std::string detail = info_.str();
    if (!result_.pass) detail += (detail.empty() ? "" : " | ") + std::string("failed: ") + notes_.str();
    result_.detail = detail;
    return result_;
  }

 private:
  Outcome result_;
  int failures_ = 0;
  std::ostringstream notes_;
  std::ostringstream info_;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string config_path(const std::string& name) { return (fs::path(APLA_CONFIG_DIR) / name).string(); }

// r* coefficients and stable set of the Stag-Hunt, through the CLI when it is
// built so the check covers the user-facing command.
struct StagHuntAnalysis {
  std::vector<double> coefficients;
  std::vector<std::size_t> stable;
};

StagHuntAnalysis analyze_staghunt(const std::string& mode) {
  StagHuntAnalysis result;
#ifdef APLA_HAVE_CLI
  const fs::path out = fs::temp_directory_path() / ("apla_acceptance_" + mode);
  const std::string config = config_path("staghunt.json");
  const std::string out_dir = out.string();
  const char* argv[] = {"apla-lab", "analyze", "--config", config.c_str(), "--mode", mode.c_str(),
                        "--out", out_dir.c_str()};
  std::ostringstream sink_out, sink_err;
  const int code = cli::run(8, argv, sink_out, sink_err);
  if (code != 0) throw std::runtime_error("analyze exited with " + std::to_string(code) + ": " + sink_err.str());
  std::ifstream in(out / "analyze_report.json");
  const Json doc = Json::parse(in);
  for (const auto& m : doc.at("analysis").at("min_resistance")) result.coefficients.push_back(m.at("coefficient"));
  for (const auto& p : doc.at("analysis").at("stable_set")) result.stable.push_back(p.at("index"));
  fs::remove_all(out);
#else
  RunConfig config = load_config(config_path("staghunt.json"));
  config.experiment.params.mode = parse_mode(mode);
  const auto report = analyze(config.experiment.game, config.experiment.params, config.analysis);
  for (const auto& m : report.coefficients) result.coefficients.push_back(m.value);
  for (ProfileId p : report.stable_set) result.stable.push_back(p.value);
#endif
  return result;
}

Outcome stag_hunt_prediction(const std::string& mode, const std::vector<double>& expected,
                             std::size_t expected_stable) {
  Checker c;
  const auto start = Clock::now();
  const StagHuntAnalysis a = analyze_staghunt(mode);
  const double elapsed = seconds_since(start);
  c.expect(a.coefficients.size() == expected.size(), "coefficient count");
  for (std::size_t s = 0; s < std::min(a.coefficients.size(), expected.size()); ++s) {
    c.expect(std::abs(a.coefficients[s] - expected[s]) <= 1e-9,
             "r*[" + std::to_string(s) + "] = " + fmt(a.coefficients[s], 12) + " vs " + fmt(expected[s], 12));
  }
  c.expect(a.stable == std::vector<std::size_t>{expected_stable}, "stable set");
  c.expect(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  c.note("r* = [" + fmt(a.coefficients.at(0), 9) + ", " + fmt(a.coefficients.at(1), 9) + ", " +
         fmt(a.coefficients.at(2), 9) + ", " + fmt(a.coefficients.at(3), 9) + "]");
  std::string stable;
  for (std::size_t s : a.stable) stable += (stable.empty() ? "" : ",") + std::to_string(s);
  c.note("S_r = {" + stable + "}");
  c.note(fmt(elapsed, 3) + " s");
  return c.finish();
}

Outcome criterion_1() {
  return stag_hunt_prediction("pla", {1.4, 1.0 / 5 + 1.0 + 1.0 / 3, 1.0 / 5 + 1.0 + 1.0 / 3,
                                      1.0 / 5 + 1.0 / 4 + 1.0 / 3},
                              3);
}

Outcome criterion_2() { return stag_hunt_prediction("apla", {25.4, 50.2, 50.2, 25.45}, 0); }

Outcome criterion_3() {
  Checker c;
  const auto start = Clock::now();
  const RunConfig base = load_config(config_path("staghunt.json"));
  c.expect(base.experiment.horizon == 200000 && base.experiment.runs == 10, "preset horizon/runs");
  const Params& p = base.experiment.params;
  c.expect(p.epsilon == 0.06 && p.nu == 0.06 && p.lambda == 0.04 && p.h == 0.04 && p.c_asp == 30.0,
           "preset parameters");
  struct Case {
    Mode mode;
    double upsilon;
  };
  for (const Case k : {Case{Mode::APLA, 0.0}, Case{Mode::APLA, 0.1}, Case{Mode::PLA, 0.0}, Case{Mode::PLA, 0.1}}) {
    ExperimentConfig e = base.experiment;
    e.params.mode = k.mode;
    e.params.upsilon_bar = k.upsilon;
    const double aa = run_experiment(e).profiles[0].end_window.mean;
    const std::string label = std::string(to_string(k.mode)) + " ub=" + fmt(k.upsilon, 2);
    if (k.mode == Mode::APLA) {
      c.expect(aa >= 0.8, label + " (A,A) " + fmt(aa));
    } else {
      c.expect(aa <= 0.3, label + " (A,A) " + fmt(aa));
    }
    c.note(label + ": " + fmt(aa, 4));
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  c.note(fmt(elapsed, 3) + " s");
  return c.finish();
}

Outcome criterion_4() {
  Checker c;
  const auto start = Clock::now();
  testing::Engine rng(40404);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = testing::random_game(rng, 3, 4, 8);
    const Params p = testing::random_params(rng, g, trial % 2 ? Mode::PLA : Mode::APLA);
    const auto d = build_digraph(g, p);
    const auto tree = fw_stationary(d, ChainMode::TreeSum);
    const auto dense = testing::dense_stationary(d);
    for (std::size_t s = 0; s < tree.size(); ++s) worst = std::max(worst, std::abs(tree[s] - dense[s]));
  }
  const double elapsed = seconds_since(start);
  c.expect(worst <= 1e-9, "max |diff| " + fmt(worst));
  c.expect(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
  c.note("max |tree-sum - dense| = " + fmt(worst, 3));
  c.note(fmt(elapsed, 3) + " s");
  return c.finish();
}

Outcome criterion_5() {
  Checker c;
  const auto start = Clock::now();
  testing::Engine rng(50505);
  double worst = 0.0;
  std::size_t roots = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testing::random_one_step_digraph(rng, 9);
    for (std::size_t s = 0; s < d.node_count(); ++s, ++roots) {
      const double fast = min_resistance(d, ProfileId{s}).value;
      const double brute = min_resistance_enumerated(d, ProfileId{s}).value;
      worst = std::max(worst, std::abs(fast - brute));
    }
  }
  const double elapsed = seconds_since(start);
  c.expect(worst <= 1e-12, "max |diff| " + fmt(worst));
  c.expect(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
  c.note(std::to_string(roots) + " roots, max |diff| = " + fmt(worst, 3));
  c.note(fmt(elapsed, 3) + " s");
  return c.finish();
}

Outcome criterion_6() {
  Checker c;
  c.expect(eta(1.0) == 0.0, "eta(1) = " + fmt(eta(1.0)));

  // Direct partial sum of (1 - 0.5^l) / l^2 over 10^7 terms, smallest first.
  double partial = 0.0;
  for (long l = 10000000; l >= 1; --l) {
    const double ld = static_cast<double>(l);
    partial += (1.0 - std::pow(0.5, ld)) / (ld * ld);
  }
  const double half = eta(0.5);
  c.expect(std::abs(half - partial) <= 1e-6, "eta(0.5) vs partial sum");
  c.expect(std::abs(half - 1.0626940) <= 1e-6, "eta(0.5) vs 1.0626940");

  const double target = eta(0.1);
  std::vector<double> errors;
  for (double eps : {0.05, 0.01, 0.002}) {
    const double scaled = -eps * 5.0 * std::log(satisfactory_prob_product(0.1, eps, 5.0));
    errors.push_back(std::abs(scaled - target) / target);
  }
  c.expect(errors[1] < errors[0] && errors[2] < errors[1], "errors not decreasing");
  c.expect(errors[2] < 0.05, "final relative error " + fmt(errors[2]));
  c.note("eta(0.5) = " + fmt(half, 10) + ", partial sum " + fmt(partial, 10));
  c.note("rel. errors " + fmt(errors[0], 3) + " > " + fmt(errors[1], 3) + " > " + fmt(errors[2], 3));
  return c.finish();
}

std::uint64_t iterate_hitting(double delta, double eps, double u) {
  double x = 1.0;
  std::uint64_t k = 0;
  while (x > delta) {
    x *= 1.0 - eps * u;
    ++k;
  }
  return k;
}

Outcome criterion_7() {
  Checker c;
  const auto a = nominal_hitting_time(0.1, 0.06, 5.0);
  const auto b = nominal_hitting_time(0.05, 0.01, 4.0);
  c.expect(a == 7 && a == iterate_hitting(0.1, 0.06, 5.0), "tau(0.1, 0.06, 5) = " + std::to_string(a));
  c.expect(b == 74 && b == iterate_hitting(0.05, 0.01, 4.0), "tau(0.05, 0.01, 4) = " + std::to_string(b));

  testing::Engine rng(70707);
  int bracketed = 0;
  for (int k = 0; k < 1000; ++k) {
    const double delta = testing::uniform(rng, 0.01, 0.9);
    const double ub = testing::uniform(rng, 0.0, delta);
    const double slope = testing::uniform(rng, 0.0, 40.0);
    const double u = (1.0 + 2.0 * slope) * ub + testing::uniform(rng, 0.01, 5.0);
    const double eps = testing::uniform(rng, 0.001, 0.9) / (u + ub);
    const auto bounds = noisy_hitting_bounds(delta, eps, u, ub, slope);
    const auto tau = nominal_hitting_time(delta, eps, u);
    const auto collapsed = noisy_hitting_bounds(delta, eps, u, 0.0, slope);
    const bool ok = bounds.min_steps <= tau && tau <= bounds.max_steps && collapsed.min_steps == tau &&
                    collapsed.max_steps == tau;
    c.expect(ok, "tuple " + std::to_string(k));
    bracketed += ok ? 1 : 0;
  }
  c.note("tau = " + std::to_string(a) + ", " + std::to_string(b));
  c.note(std::to_string(bracketed) + "/1000 tuples bracketed and collapsing");
  return c.finish();
}

Outcome criterion_8() {
  Checker c;
  testing::Engine rng(80808);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = testing::random_potential_game(rng, 3, 3);
    const Params p = testing::random_params(rng, g, Mode::APLA);
    c.expect(p.h < g.min_utility(), "h below u_min");
    const auto stable = analyze(g, p).stable_set;
    const auto nash = pure_nash_equilibria(g);
    const std::set<ProfileId> ne(nash.begin(), nash.end());
    const bool contained =
        std::all_of(stable.begin(), stable.end(), [&](ProfileId s) { return ne.contains(s); });
    if (!contained) ++violations;
    c.expect(contained, "trial " + std::to_string(trial));
  }
  c.note(std::to_string(violations) + " violations in 50 games");
  return c.finish();
}

Outcome criterion_9() {
  Checker c;
  testing::Engine gen(90909);
  std::uint64_t rounds = 0;
  double worst_drift = 0.0;
  int config_index = 0;
  while (rounds < 1000000) {
    const Game g = testing::random_game(gen, 3, 3, 27);
    const Params p = testing::random_params(gen, g, config_index % 2 ? Mode::PLA : Mode::APLA);
    CounterRng rng(90909, static_cast<std::uint64_t>(config_index++));
    SystemState s = initial_state(g, p, {}, rng);
    const double lo = g.min_utility() - p.upsilon_bar;
    const double hi = g.max_utility() + p.upsilon_bar;
    StepTrace trace;
    bool ok = true;
    for (int t = 0; t < 20000 && rounds < 1000000; ++t, ++rounds) {
      advance(g, s, p, rng, &trace);
      worst_drift = std::max(worst_drift, trace.max_simplex_drift);
      ok = ok && trace.max_simplex_drift <= 1e-9;
      for (const AgentState& a : s.agents) {
        double sum = 0.0;
        for (double v : a.strategy) {
          ok = ok && v >= 0.0;
          sum += v;
        }
        ok = ok && std::abs(sum - 1.0) <= 1e-9 && a.aspiration >= lo && a.aspiration <= hi;
      }
    }
    c.expect(ok, "config " + std::to_string(config_index - 1));
  }

  int absorbing_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = testing::random_game(gen, 3, 3, 27);
    Params p = testing::random_params(gen, g, trial % 2 ? Mode::PLA : Mode::APLA);
    p.lambda = 0.0;
    p.upsilon_bar = 0.0;
    const ProfileId start{testing::pick(gen, 0, g.num_profiles() - 1)};
    SystemState s = pure_strategy_state(g, start);
    const SystemState initial = s;
    CounterRng rng(4242, static_cast<std::uint64_t>(trial));
    bool stayed = true;
    for (int t = 0; t < 2000; ++t) {
      advance(g, s, p, rng);
      stayed = stayed && s.last_profile == start;
    }
    stayed = stayed && s.agents == initial.agents;
    if (!stayed) ++absorbing_failures;
    c.expect(stayed, "pure state " + std::to_string(trial) + " left");
  }
  c.note(std::to_string(rounds) + " fuzz rounds over " + std::to_string(config_index) + " configs");
  c.note("max drift " + fmt(worst_drift, 3));
  c.note(std::to_string(50 - absorbing_failures) + "/50 pure states held");
  return c.finish();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Stag-Hunt PLA prediction", criterion_1},
      {"2 Stag-Hunt APLA prediction", criterion_2},
      {"3 Monte Carlo Stag-Hunt frequencies", criterion_3},
      {"4 tree-sum stationary vs dense solve", criterion_4},
      {"5 arborescence vs W-graph enumeration", criterion_5},
      {"6 eta and asymptotic consistency", criterion_6},
      {"7 hitting times and noisy bounds", criterion_7},
      {"8 weakly acyclic Nash containment", criterion_8},
      {"9 dynamics invariants", criterion_9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  (" << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
