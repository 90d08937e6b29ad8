#include "apla/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string_view>

#include "apla/errors.hpp"

namespace apla {
namespace {

void check_object(const Json& doc, std::string_view context) {
  if (!doc.is_object()) throw ConfigError(std::string(context) + " must be a JSON object");
}

void check_keys(const Json& doc, std::initializer_list<std::string_view> allowed,
                std::string_view context) {
  check_object(doc, context);
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(context));
    }
  }
}

double number_at(const Json& doc, const char* key, std::string_view context) {
  const Json& v = doc.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string(context) + "." + key + " must be a number");
  }
  return v.get<double>();
}

std::uint64_t count_at(const Json& doc, const char* key, std::string_view context) {
  const Json& v = doc.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string(context) + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string_at(const Json& doc, const char* key, std::string_view context) {
  const Json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(std::string(context) + "." + key + " must be a string");
  return v.get<std::string>();
}

bool bool_at(const Json& doc, const char* key, std::string_view context) {
  const Json& v = doc.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string(context) + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::vector<double> numbers(const Json& v, std::string_view context) {
  if (!v.is_array()) throw ConfigError(std::string(context) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string(context) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Maps parse-time UsageErrors (unknown enum text, bad shapes) onto ConfigError.
template <typename F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
}

Json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

Json arrows_json(const Game& game, const WGraph& graph) {
  Json arrows = Json::array();
  for (const auto& [from, to] : graph.arrows) {
    arrows.push_back({{"from", profile_json(game, from)}, {"to", profile_json(game, to)}});
  }
  return arrows;
}

}  // namespace

Game game_from_json(const Json& doc) {
  check_keys(doc, {"action_counts", "utilities", "name"}, "game");
  if (!doc.contains("action_counts") || !doc.contains("utilities")) {
    throw ConfigError("game needs 'action_counts' and 'utilities'");
  }
  const Json& counts_doc = doc.at("action_counts");
  if (!counts_doc.is_array()) throw ConfigError("game.action_counts must be an array");
  std::vector<std::size_t> counts;
  for (const auto& c : counts_doc) {
    if (!c.is_number_unsigned()) {
      throw ConfigError("game.action_counts entries must be positive integers");
    }
    counts.push_back(c.get<std::size_t>());
  }
  const Json& tables = doc.at("utilities");
  if (!tables.is_array()) throw ConfigError("game.utilities must be an array of per-player tables");
  std::vector<std::vector<double>> utilities;
  for (const auto& table : tables) utilities.push_back(numbers(table, "game.utilities[i]"));
  return as_config([&] { return Game(std::move(counts), std::move(utilities)); });
}

Json to_json(const Game& game) {
  return {{"action_counts", game.action_counts()}, {"utilities", game.utilities()}};
}

Params params_from_json(const Json& doc, Params base) {
  constexpr std::string_view ctx = "params";
  check_keys(doc, {"epsilon", "nu", "lambda", "h", "c_asp", "upsilon_bar", "mode", "noise"}, ctx);
  if (doc.contains("epsilon")) base.epsilon = number_at(doc, "epsilon", ctx);
  if (doc.contains("nu")) base.nu = number_at(doc, "nu", ctx);
  if (doc.contains("lambda")) base.lambda = number_at(doc, "lambda", ctx);
  if (doc.contains("h")) base.h = number_at(doc, "h", ctx);
  if (doc.contains("c_asp")) base.c_asp = number_at(doc, "c_asp", ctx);
  if (doc.contains("upsilon_bar")) base.upsilon_bar = number_at(doc, "upsilon_bar", ctx);
  if (doc.contains("mode")) {
    const auto text = string_at(doc, "mode", ctx);
    base.mode = as_config([&] { return parse_mode(text); });
  }
  if (doc.contains("noise")) {
    const auto text = string_at(doc, "noise", ctx);
    base.noise = as_config([&] { return parse_noise(text); });
  }
  return base;
}

Json to_json(const Params& p) {
  return {{"epsilon", p.epsilon}, {"nu", p.nu},       {"lambda", p.lambda},
          {"h", p.h},             {"c_asp", p.c_asp}, {"upsilon_bar", p.upsilon_bar},
          {"mode", std::string(to_string(p.mode))},
          {"noise", std::string(to_string(p.noise))}};
}

AnalysisOptions analysis_from_json(const Json& doc, AnalysisOptions base) {
  constexpr std::string_view ctx = "analysis";
  check_keys(doc, {"delta", "resistance", "rel_tol", "enumeration_cap", "stationary"}, ctx);
  if (doc.contains("delta")) base.delta = number_at(doc, "delta", ctx);
  if (doc.contains("rel_tol")) base.rel_tol = number_at(doc, "rel_tol", ctx);
  if (doc.contains("enumeration_cap")) base.enumeration_cap = count_at(doc, "enumeration_cap", ctx);
  if (doc.contains("resistance")) {
    const auto text = string_at(doc, "resistance", ctx);
    base.resistance = as_config([&] { return parse_resistance_mode(text); });
  }
  return base;
}

Json to_json(const AnalysisOptions& o) {
  return {{"delta", o.delta},
          {"resistance", std::string(to_string(o.resistance))},
          {"rel_tol", o.rel_tol},
          {"enumeration_cap", o.enumeration_cap}};
}

Json to_json(const InitialCondition& init) {
  switch (init.kind) {
    case InitialCondition::Kind::PureState:
      return {{"kind", "pure"}, {"profile", init.profile.value}};
    case InitialCondition::Kind::Explicit:
      return {{"kind", "explicit"}, {"strategies", init.strategies}, {"aspirations", init.aspirations}};
    case InitialCondition::Kind::UniformSampled:
      break;
  }
  return {{"kind", "uniform"}};
}

InitialCondition init_from_json(const Json& doc) {
  constexpr std::string_view ctx = "experiment.init";
  check_keys(doc, {"kind", "profile", "strategies", "aspirations"}, ctx);
  InitialCondition init;
  const std::string kind = doc.contains("kind") ? string_at(doc, "kind", ctx) : "uniform";
  if (kind == "uniform") {
    init.kind = InitialCondition::Kind::UniformSampled;
  } else if (kind == "pure") {
    init.kind = InitialCondition::Kind::PureState;
    if (!doc.contains("profile")) throw ConfigError("pure initial state needs 'profile'");
    init.profile = ProfileId{count_at(doc, "profile", ctx)};
  } else if (kind == "explicit") {
    init.kind = InitialCondition::Kind::Explicit;
    if (!doc.contains("strategies") || !doc.contains("aspirations")) {
      throw ConfigError("explicit initial state needs 'strategies' and 'aspirations'");
    }
    if (!doc.at("strategies").is_array()) throw ConfigError("experiment.init.strategies must be an array");
    for (const auto& s : doc.at("strategies")) init.strategies.push_back(numbers(s, "experiment.init.strategies[i]"));
    init.aspirations = numbers(doc.at("aspirations"), "experiment.init.aspirations");
  } else {
    throw ConfigError("experiment.init.kind must be uniform, pure, or explicit");
  }
  return init;
}

void experiment_from_json(const Json& doc, ExperimentConfig& config) {
  constexpr std::string_view ctx = "experiment";
  check_keys(doc, {"horizon", "runs", "seed", "tracked", "end_window_fraction", "init",
                   "series_points", "keep_raw"},
             ctx);
  if (doc.contains("horizon")) config.horizon = count_at(doc, "horizon", ctx);
  if (doc.contains("runs")) config.runs = count_at(doc, "runs", ctx);
  if (doc.contains("seed")) config.seed = count_at(doc, "seed", ctx);
  if (doc.contains("end_window_fraction")) {
    config.end_window_fraction = number_at(doc, "end_window_fraction", ctx);
  }
  if (doc.contains("series_points")) config.series_points = count_at(doc, "series_points", ctx);
  if (doc.contains("keep_raw")) config.keep_raw = bool_at(doc, "keep_raw", ctx);
  if (doc.contains("init")) config.init = init_from_json(doc.at("init"));
  if (doc.contains("tracked")) {
    const Json& list = doc.at("tracked");
    if (!list.is_array()) throw ConfigError("experiment.tracked must be an array of profile indices");
    config.tracked.clear();
    for (const auto& p : list) {
      if (!p.is_number_unsigned()) {
        throw ConfigError("experiment.tracked must be an array of profile indices");
      }
      config.tracked.push_back(ProfileId{p.get<std::size_t>()});
    }
  }
}

Json to_json(const ExperimentConfig& c) {
  Json tracked = Json::array();
  for (ProfileId p : c.tracked) tracked.push_back(p.value);
  return {{"game", to_json(c.game)},
          {"params", to_json(c.params)},
          {"experiment",
           {{"horizon", c.horizon},
            {"runs", c.runs},
            {"seed", c.seed},
            {"tracked", tracked},
            {"end_window_fraction", c.end_window_fraction},
            {"init", to_json(c.init)},
            {"series_points", c.series_points},
            {"keep_raw", c.keep_raw}}}};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(to_json(config).dump());
}

Json profile_json(const Game& game, ProfileId profile) {
  return {{"index", profile.value}, {"label", game.label(profile)}};
}

Json profiles_json(const Game& game, const std::vector<ProfileId>& profiles) {
  Json out = Json::array();
  for (ProfileId p : profiles) out.push_back(profile_json(game, p));
  return out;
}

Json to_json(const Game& game, const CorollaryReport& r) {
  return {{"positive_utility", r.positive_utility},
          {"weakly_acyclic", r.weakly_acyclic},
          {"floor_below_min_utility", r.floor_below_min_utility},
          {"best_reply_paths_to_payoff_dominant", r.best_reply_paths_to_dominant},
          {"nash", profiles_json(game, r.nash)},
          {"payoff_dominant", profiles_json(game, r.payoff_dominant)},
          {"prediction", std::string(to_string(r.prediction))},
          {"warnings", r.warnings}};
}

Json to_json(const Game& game, const StabilityReport& r) {
  Json nodes = Json::array();
  for (std::size_t s = 0; s < r.digraph.node_count(); ++s) {
    nodes.push_back(profile_json(game, ProfileId{s}));
  }
  Json edges = Json::array();
  for (const EdgeAnalysis& e : r.digraph.edges()) {
    edges.push_back({{"from", e.from.value},
                     {"to", e.to.value},
                     {"mover", e.mover},
                     {"class", e.satisfactory ? "satisfactory" : "unsatisfactory"},
                     {"coefficient", e.coefficient},
                     {"resistance", e.resistance},
                     {"probability", e.probability},
                     {"gamma", e.gamma}});
  }
  Json minima = Json::array();
  for (std::size_t s = 0; s < r.coefficients.size(); ++s) {
    const MinResistance& m = r.coefficients[s];
    minima.push_back({{"profile", profile_json(game, m.root)},
                      {"coefficient", m.value},
                      {"resistance", r.finite_resistances.at(s)},
                      {"witness", arrows_json(game, m.witness)}});
  }
  Json doc = {{"nodes", nodes},
              {"edges", edges},
              {"min_resistance", minima},
              {"stable_set", profiles_json(game, r.stable_set)},
              {"corollaries", to_json(game, r.corollaries)},
              {"params", to_json(r.params)},
              {"analysis", to_json(r.options)},
              {"warnings", r.warnings}};
  if (r.stationary_tree_sum || r.stationary_solver) {
    Json st = Json::object();
    if (r.stationary_tree_sum) st["tree_sum"] = *r.stationary_tree_sum;
    if (r.stationary_solver) st["solver"] = *r.stationary_solver;
    if (r.stationary_tree_sum && r.stationary_solver) {
      double diff = 0.0;
      for (std::size_t s = 0; s < r.stationary_solver->size(); ++s) {
        diff = std::max(diff, std::abs((*r.stationary_tree_sum)[s] - (*r.stationary_solver)[s]));
      }
      st["max_abs_difference"] = diff;
    }
    doc["stationary"] = st;
  }
  return doc;
}

Json to_json(const Game& game, const ExperimentReport& r) {
  Json runs = Json::array();
  for (const auto& rep : r.replicates) {
    Json run = {{"run", rep.run_index},
                {"cumulative", rep.cumulative},
                {"end_window", rep.end_window},
                {"final_profile", profile_json(game, rep.final_profile)}};
    if (!rep.raw_profiles.empty()) run["raw_profiles"] = rep.raw_profiles;
    runs.push_back(std::move(run));
  }
  Json profiles = Json::array();
  for (const auto& p : r.profiles) {
    profiles.push_back({{"profile", profile_json(game, p.profile)},
                        {"cumulative", summary_json(p.cumulative)},
                        {"end_window", summary_json(p.end_window)},
                        {"final_indicator", summary_json(p.final_indicator)}});
  }
  return {{"config_hash", r.config_hash},
          {"seed", r.seed},
          {"horizon", r.horizon},
          {"end_window_length", r.end_window_length},
          {"tracked", profiles_json(game, r.tracked)},
          {"profiles", profiles},
          {"runs", runs},
          {"series_times", r.series_times},
          {"mean_series", r.mean_series},
          {"warnings", r.warnings}};
}

Json to_json(const Game& game, const PredictionVerdict& v) {
  return {{"applicable", v.applicable},
          {"match", v.match},
          {"predicted", profiles_json(game, v.predicted)},
          {"observed_mode", profile_json(game, v.observed_mode)},
          {"observed_frequency", v.observed_frequency},
          {"margin", v.margin},
          {"explanation", v.explanation}};
}

void write_series_csv(std::ostream& out, const Game& game, const ExperimentReport& report) {
  out << "run,t,profile,cumulative_freq\n";
  char buf[32];
  for (const auto& rep : report.replicates) {
    for (std::size_t k = 0; k < rep.series.size(); ++k) {
      for (std::size_t j = 0; j < report.tracked.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", rep.series[k][j]);
        out << rep.run_index << ',' << rep.series_times[k] << ",\"" << game.label(report.tracked[j])
            << "\"," << buf << '\n';
      }
    }
  }
}

}  // namespace apla
