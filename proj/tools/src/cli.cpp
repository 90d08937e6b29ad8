#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "apla/config.hpp"
#include "apla/errors.hpp"
#include "apla/json_io.hpp"
#include "apla/montecarlo.hpp"
#include "apla/stability.hpp"
#include "presets.hpp"

namespace apla::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kOracleTolerance = 1e-9;
constexpr double kDefaultNoisyUpsilon = 0.1;

struct Options {
  std::string config;
  std::string out;
  std::string mode;
  std::string resistance;
  std::uint64_t seed = 0;
  std::uint64_t runs = 0;
  std::uint64_t horizon = 0;
  double delta = 0.0;
  std::vector<CLI::Option*> seed_opt, runs_opt, horizon_opt, delta_opt;

  static bool given(const std::vector<CLI::Option*>& opts) {
    return std::any_of(opts.begin(), opts.end(), [](CLI::Option* o) { return o->count() > 0; });
  }
};

class OracleMismatch : public Error {
 public:
  using Error::Error;
};

std::string set_label(const Game& game, const std::vector<ProfileId>& set) {
  std::string text = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k) text += ", ";
    text += game.label(set[k]);
  }
  return text + "}";
}

RunConfig load(const Options& opt, bool allow_preset) {
  RunConfig config;
  if (!opt.config.empty()) {
    config = load_config(opt.config);
  } else if (allow_preset) {
    config = parse_config(Json::parse(staghunt_preset()));
  } else {
    throw ConfigError("--config <path> is required for this command");
  }
  if (!opt.mode.empty()) config.experiment.params.mode = parse_mode(opt.mode);
  if (!opt.resistance.empty()) config.analysis.resistance = parse_resistance_mode(opt.resistance);
  if (Options::given(opt.seed_opt)) config.experiment.seed = opt.seed;
  if (Options::given(opt.runs_opt)) config.experiment.runs = opt.runs;
  if (Options::given(opt.horizon_opt)) config.experiment.horizon = opt.horizon;
  if (Options::given(opt.delta_opt)) config.analysis.delta = opt.delta;
  if (!opt.out.empty()) config.output_dir = opt.out;
  // Re-parse the effective config so overrides meet the same validation.
  return parse_config(to_json(config));
}

Json envelope(std::string_view command, const RunConfig& config) {
  const Json effective = to_json(config);
  Json hashed = effective;
  hashed.erase("output_dir");  // where results go does not change them
  return {{"tool", "apla-lab"},
          {"tool_version", APLA_LAB_VERSION},
          {"command", command},
          {"config_hash", fnv1a_hex(hashed.dump())},
          {"seed", config.experiment.seed},
          {"config", effective},
          {"warnings", config.warnings}};
}

fs::path write_json(const RunConfig& config, const std::string& name, const Json& doc) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  file << doc.dump(2) << '\n';
  return path;
}

fs::path write_csv(const RunConfig& config, const std::string& name, const Game& game,
                   const ExperimentReport& report) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  write_series_csv(file, game, report);
  return path;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_check_game(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig config = load(opt, false);
  print_warnings(config.warnings, err);
  const Game& game = config.experiment.game;
  const auto acyclic = is_weakly_acyclic(game);
  const auto nash = pure_nash_equilibria(game);
  const auto dominant = payoff_dominant_equilibria(game);
  const bool positive = validate_positive_utility(game);

  out << "positive-utility: " << (positive ? "true" : "false") << '\n';
  out << "weakly acyclic: " << (acyclic.weakly_acyclic ? "true" : "false") << '\n';
  out << "NE = " << set_label(game, nash) << '\n';
  out << "payoff-dominant = " << set_label(game, dominant) << '\n';

  Json witnesses = Json::array();
  for (const auto& [start, path] : acyclic.witnesses) {
    witnesses.push_back({{"start", profile_json(game, start)},
                         {"path", profiles_json(game, path.profiles)},
                         {"movers", path.movers}});
    out << "  improvement path " << game.label(start);
    for (std::size_t k = 1; k < path.profiles.size(); ++k) out << " -> " << game.label(path.profiles[k]);
    out << '\n';
  }
  Json doc = envelope("check-game", config);
  doc["game"] = {{"positive_utility", positive},
                 {"weakly_acyclic", acyclic.weakly_acyclic},
                 {"nash", profiles_json(game, nash)},
                 {"payoff_dominant", profiles_json(game, dominant)},
                 {"witnesses", witnesses},
                 {"corollaries", to_json(game, check_corollaries(game, config.experiment.params))}};
  if (acyclic.weakly_acyclic) {
    Json arrows = Json::array();
    for (const auto& [from, to] : build_improvement_sne_graph(game).arrows) {
      arrows.push_back({{"from", profile_json(game, from)}, {"to", profile_json(game, to)}});
    }
    doc["game"]["improvement_sne_graph"] = arrows;
  }
  out << "report: " << write_json(config, "check_game.json", doc).string() << '\n';
  return kOk;
}

int cmd_analyze(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig config = load(opt, false);
  print_warnings(config.warnings, err);
  const Game& game = config.experiment.game;
  const Params& params = config.experiment.params;
  const StabilityReport report = analyze(game, params, config.analysis, {config.stationary});
  print_warnings(report.corollaries.warnings, err);

  out << "mode: " << to_string(params.mode) << ", delta = " << config.analysis.delta
      << ", resistance = " << to_string(config.analysis.resistance) << '\n';
  out << std::setprecision(12);
  for (std::size_t s = 0; s < report.coefficients.size(); ++s) {
    out << "r*" << game.label(ProfileId{s}) << " = " << report.coefficients[s].value
        << "  (finite resistance " << report.finite_resistances[s] << ")\n";
  }
  out << "S_r = " << set_label(game, report.stable_set) << '\n';
  out << "prediction class: " << to_string(report.corollaries.prediction) << '\n';

  // Internal oracles: enumeration against the arborescence minimum, and the
  // two stationary evaluations against each other.
  Json oracle = Json::object();
  bool agree = true;
  if (game.num_profiles() <= config.analysis.enumeration_cap) {
    double worst = 0.0;
    for (std::size_t s = 0; s < game.num_profiles(); ++s) {
      const double brute =
          min_resistance_enumerated(report.digraph, ProfileId{s}, Weighting::Coefficient,
                                    config.analysis.enumeration_cap)
              .value;
      worst = std::max(worst, std::abs(brute - report.coefficients[s].value));
    }
    const bool ok = worst <= kOracleTolerance * std::max(1.0, std::abs(report.coefficients[0].value));
    oracle["enumeration_max_abs_difference"] = worst;
    oracle["enumeration_agrees"] = ok;
    agree = agree && ok;
    out << "enumeration cross-check: " << (ok ? "agree" : "MISMATCH") << " (max |diff| = " << worst << ")\n";
  }
  if (report.stationary_tree_sum && report.stationary_solver) {
    double worst = 0.0;
    for (std::size_t s = 0; s < report.stationary_solver->size(); ++s) {
      worst = std::max(worst, std::abs((*report.stationary_tree_sum)[s] - (*report.stationary_solver)[s]));
    }
    const bool ok = worst <= kOracleTolerance;
    oracle["stationary_agrees"] = ok;
    agree = agree && ok;
    out << "stationary tree-sum vs solver: " << (ok ? "agree" : "MISMATCH") << " (max |diff| = " << worst << ")\n";
  }

  Json doc = envelope("analyze", config);
  doc["analysis"] = to_json(game, report);
  doc["oracle"] = oracle;
  out << "report: " << write_json(config, "analyze_report.json", doc).string() << '\n';
  if (!agree) throw OracleMismatch("internal oracle cross-check failed");
  return kOk;
}

int cmd_stationary(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig config = load(opt, false);
  print_warnings(config.warnings, err);
  const Game& game = config.experiment.game;
  const ResistanceDigraph digraph = build_digraph(game, config.experiment.params, config.analysis);

  const auto solver = fw_stationary(digraph, ChainMode::Solver);
  Json doc = envelope("stationary", config);
  doc["solver"] = solver;
  out << std::setprecision(12);
  bool agree = true;
  if (digraph.node_count() <= config.analysis.enumeration_cap) {
    const auto tree = fw_stationary(digraph, ChainMode::TreeSum, config.analysis.enumeration_cap);
    double worst = 0.0;
    for (std::size_t s = 0; s < solver.size(); ++s) worst = std::max(worst, std::abs(tree[s] - solver[s]));
    agree = worst <= kOracleTolerance;
    doc["tree_sum"] = tree;
    doc["max_abs_difference"] = worst;
    doc["agree"] = agree;
    for (std::size_t s = 0; s < solver.size(); ++s) {
      out << "pi" << game.label(ProfileId{s}) << " = " << solver[s] << "  (tree-sum " << tree[s] << ")\n";
    }
    out << "tree-sum vs solver: " << (agree ? "agree" : "MISMATCH") << " (max |diff| = " << worst
        << ", tolerance " << kOracleTolerance << ")\n";
  } else {
    for (std::size_t s = 0; s < solver.size(); ++s) {
      out << "pi" << game.label(ProfileId{s}) << " = " << solver[s] << '\n';
    }
    out << "tree-sum skipped: " << digraph.node_count() << " nodes exceed the enumeration cap\n";
  }
  out << "report: " << write_json(config, "stationary.json", doc).string() << '\n';
  if (!agree) throw OracleMismatch("tree-sum and solver stationary distributions disagree");
  return kOk;
}

void print_experiment(const Game& game, const ExperimentReport& report, std::ostream& out) {
  out << std::setprecision(6);
  for (ProfileId p : report.tracked) {
    const ProfileSummary& s = report.profiles[p.value];
    out << "  " << game.label(p) << ": end-window mean " << s.end_window.mean << " (std "
        << s.end_window.std << "), cumulative mean " << s.cumulative.mean << ", final-step share "
        << s.final_indicator.mean << '\n';
  }
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig config = load(opt, false);
  print_warnings(config.warnings, err);
  const ExperimentConfig& experiment = config.experiment;
  const Game& game = experiment.game;
  const ExperimentReport report = run_experiment(experiment);
  const PredictionVerdict verdict = compare_prediction(game, experiment.params, report, config.analysis);

  out << "mode " << to_string(experiment.params.mode) << ", T = " << experiment.horizon << ", runs = "
      << experiment.runs << ", seed = " << experiment.seed << '\n';
  print_experiment(game, report, out);
  out << "prediction: " << verdict.explanation << '\n';

  Json doc = envelope("simulate", config);
  doc["report"] = to_json(game, report);
  doc["prediction"] = to_json(game, verdict);
  out << "report: " << write_json(config, "simulate_report.json", doc).string() << '\n';
  out << "series: " << write_csv(config, "simulate_series.csv", game, report).string() << '\n';
  return kOk;
}

int cmd_reproduce(const Options& opt, std::ostream& out, std::ostream& err) {
  const RunConfig base = load(opt, true);
  print_warnings(base.warnings, err);
  const Game& game = base.experiment.game;
  const double noisy = base.experiment.params.upsilon_bar > 0.0 ? base.experiment.params.upsilon_bar
                                                                 : kDefaultNoisyUpsilon;
  const auto dominant = payoff_dominant_equilibria(game);

  Json doc = envelope("reproduce-staghunt", base);
  Json conditions = Json::array();
  bool all_match = true;
  for (Mode mode : {Mode::PLA, Mode::APLA}) {
    ExperimentConfig analysis_config = base.experiment;
    analysis_config.params.mode = mode;
    const StabilityReport stability = analyze(game, analysis_config.params, base.analysis);
    out << to_string(mode) << ": S_r = " << set_label(game, stability.stable_set) << '\n';
    for (double upsilon : {0.0, noisy}) {
      ExperimentConfig experiment = analysis_config;
      experiment.params.upsilon_bar = upsilon;
      print_warnings(validate(experiment), err);
      const ExperimentReport report = run_experiment(experiment);
      const PredictionVerdict verdict =
          compare_prediction(game, experiment.params, report, base.analysis);
      all_match = all_match && verdict.match;

      out << "  upsilon_bar = " << upsilon << ": observed mode " << game.label(verdict.observed_mode)
          << " (mean end-window " << std::setprecision(4) << verdict.observed_frequency << ")";
      for (ProfileId p : dominant) {
        out << ", " << game.label(p) << " mean end-window " << report.profiles[p.value].end_window.mean;
      }
      out << " -> " << (verdict.match ? "match" : "MISMATCH") << '\n';

      std::string stem = "reproduce_" + std::string(to_string(mode)) + (upsilon > 0.0 ? "_noisy" : "_noiseless");
      const fs::path csv = write_csv(base, stem + ".csv", game, report);
      conditions.push_back({{"mode", to_string(mode)},
                            {"upsilon_bar", upsilon},
                            {"config_hash", report.config_hash},
                            {"analysis", to_json(game, stability)},
                            {"report", to_json(game, report)},
                            {"prediction", to_json(game, verdict)},
                            {"series_csv", csv.filename().string()}});
    }
  }
  doc["conditions"] = conditions;
  doc["all_match"] = all_match;
  out << "report: " << write_json(base, "reproduce_staghunt.json", doc).string() << '\n';
  if (!all_match) throw OracleMismatch("observed end-window modes disagree with the predicted stable sets");
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aspiration-based perturbed learning automata: simulation and stochastic stability analysis",
               "apla-lab"};
  app.set_version_flag("--version", std::string(APLA_LAB_VERSION));
  app.require_subcommand(1);

  Options opt;
  struct Command {
    const char* name;
    const char* help;
    int (*handler)(const Options&, std::ostream&, std::ostream&);
    CLI::App* app = nullptr;
  };
  std::vector<Command> commands{
      {"simulate", "Run seeded Monte Carlo replicates and compare with the predicted stable set", cmd_simulate},
      {"analyze", "Minimum-resistance analysis and predicted stochastically stable set", cmd_analyze},
      {"check-game", "Nash equilibria, payoff dominance, and weak acyclicity of the game", cmd_check_game},
      {"stationary", "Stationary distribution of the pure-state chain with oracle cross-check", cmd_stationary},
      {"reproduce-staghunt", "PLA and APLA, noiseless and noisy, on the shipped Stag-Hunt preset", cmd_reproduce},
  };
  for (Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "Experiment config JSON (or a report embedding one)");
    sub->add_option("--out", opt.out, "Output directory for reports");
    sub->add_option("--mode", opt.mode, "Learning rule")->check(CLI::IsMember({"pla", "apla"}));
    sub->add_option("--resistance", opt.resistance, "Resistance evaluation")
        ->check(CLI::IsMember({"asymptotic", "product"}));
    opt.seed_opt.push_back(sub->add_option("--seed", opt.seed, "Master seed"));
    opt.runs_opt.push_back(sub->add_option("--runs", opt.runs, "Number of replicates"));
    opt.horizon_opt.push_back(sub->add_option("--horizon", opt.horizon, "Rounds per replicate"));
    opt.delta_opt.push_back(sub->add_option("--delta", opt.delta, "Neighborhood radius delta"));
    c.app = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kOk : kConfigError;
  }

  try {
    for (const Command& c : commands) {
      if (c.app->parsed()) return c.handler(opt, out, err);
    }
    return kFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UsageError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  } catch (const OracleMismatch& e) {
    err << "oracle mismatch: " << e.what() << '\n';
    return kOracleMismatch;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace apla::cli
