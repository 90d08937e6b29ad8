#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "apla/json_io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using apla::Json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "apla-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = apla::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& leaf = {}) const { return (leaf.empty() ? path : path / leaf).string(); }
};

std::string config(const std::string& name) { return (fs::path(APLA_CONFIG_DIR) / name).string(); }

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"no-such-command"}).code == 2);
  CHECK(invoke({"analyze"}).code == 2);
  CHECK(invoke({"analyze", "--config", "/nonexistent.json"}).code == 2);
  CHECK(invoke({"analyze", "--config", config("staghunt.json"), "--mode", "qla"}).code == 2);
  CHECK(invoke({"--version"}).code == 0);
}

TEST_CASE("parameter violations exit with code 3") {
  TempDir dir("apla_cli_param");
  const auto r = invoke({"analyze", "--config", config("staghunt.json"), "--delta", "1.5",
                         "--out", dir.str()});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "delta"));

  Json doc = read_json(config("staghunt.json"));
  doc["params"]["epsilon"] = 0.3;
  std::ofstream(dir.path / "bad.json") << doc.dump();
  const auto e = invoke({"check-game", "--config", dir.str("bad.json"), "--out", dir.str()});
  CHECK(e.code == 3);
  CHECK(contains(e.err, "epsilon"));
}

TEST_CASE("check-game on the Stag-Hunt") {
  TempDir dir("apla_cli_check");
  const auto r = invoke({"check-game", "--config", config("staghunt.json"), "--out", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "positive-utility: true"));
  CHECK(contains(r.out, "weakly acyclic: true"));
  CHECK(contains(r.out, "NE = {(A,A), (B,B)}"));
  CHECK(contains(r.out, "payoff-dominant = {(A,A)}"));
  const Json report = read_json(dir.path / "check_game.json");
  CHECK(report.at("command") == "check-game");
  CHECK(report.contains("config_hash"));
}

TEST_CASE("analyze selects (B,B) under PLA and (A,A) under APLA") {
  TempDir dir("apla_cli_analyze");
  const auto p = invoke({"analyze", "--config", config("staghunt.json"), "--mode", "pla", "--out", dir.str()});
  REQUIRE(p.code == 0);
  CHECK(contains(p.out, "S_r = {(B,B)}"));
  CHECK(contains(p.out, "r*(A,A) = 1.4"));
  CHECK(contains(p.out, "enumeration cross-check: agree"));

  const auto a = invoke({"analyze", "--config", config("staghunt.json"), "--out", dir.str()});
  REQUIRE(a.code == 0);
  CHECK(contains(a.out, "S_r = {(A,A)}"));
  CHECK(contains(a.out, "subset_of_payoff_dominant"));
  const Json report = read_json(dir.path / "analyze_report.json");
  CHECK(report.at("config").at("params").at("mode") == "apla");
}

TEST_CASE("stationary on the three-state config") {
  TempDir dir("apla_cli_stationary");
  const auto r = invoke({"stationary", "--config", config("three_state.json"), "--out", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "tree-sum vs solver: agree"));
  const Json doc = read_json(dir.path / "stationary.json");
  REQUIRE(doc.at("solver").size() == 3);
  CHECK(doc.at("agree") == true);
  double total = 0.0;
  for (const auto& v : doc.at("tree_sum")) total += v.get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simulate output can be replayed from its own report") {
  TempDir dir("apla_cli_simulate");
  const std::vector<std::string> common{"--runs", "2", "--horizon", "3000", "--seed", "9"};
  std::vector<std::string> args{"simulate", "--config", config("staghunt.json"), "--out", dir.str("a")};
  args.insert(args.end(), common.begin(), common.end());
  REQUIRE(invoke(args).code == 0);
  const auto first = read_text(dir.path / "a" / "simulate_series.csv");
  const Json report = read_json(dir.path / "a" / "simulate_report.json");
  CHECK(report.at("seed") == 9);
  CHECK(report.at("config").at("experiment").at("runs") == 2);

  REQUIRE(invoke({"simulate", "--config", (dir.path / "a" / "simulate_report.json").string(), "--out",
                  dir.str("b")})
              .code == 0);
  CHECK(read_text(dir.path / "b" / "simulate_series.csv") == first);
  const Json again = read_json(dir.path / "b" / "simulate_report.json");
  CHECK(again.at("config_hash") == report.at("config_hash"));
}

TEST_CASE("reproduce reports a verdict mismatch with code 4") {
  TempDir dir("apla_cli_mismatch");
  Json doc = read_json(config("staghunt.json"));
  doc["experiment"]["horizon"] = 200;
  doc["experiment"]["runs"] = 1;
  doc["experiment"]["init"] = {{"kind", "pure"}, {"profile", 3}};
  doc["output_dir"] = dir.str();
  std::ofstream(dir.path / "stuck.json") << doc.dump();
  const auto r = invoke({"reproduce-staghunt", "--config", dir.str("stuck.json")});
  CHECK(r.code == 4);
  CHECK(contains(r.out, "MISMATCH"));
  CHECK(fs::exists(dir.path / "reproduce_staghunt.json"));
}
