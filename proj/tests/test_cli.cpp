#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clutter_em/commands.hpp"
#include "clutter_em/error.hpp"

using namespace clutter;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("clutter_em_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ar1_case2(const std::string& model, int trials) {
  return {{"scenario",
           {{"N", 16},
            {"class_sizes", {32, 32, 32}},
            {"model_kind", "ScaledAR1"},
            {"rho", 0.9},
            {"clutter_powers_db", {20, 30, 40}},
            {"seed", 2024}}},
          {"fit", {{"model_kind", model}, {"L", 3}}},
          {"seed", 7},
          {"trials", trials}};
}

RunManifest manifest(Command c, const fs::path& config, const fs::path& out) {
  RunManifest m;
  m.command = c;
  m.config_path = config;
  m.output_dir = out;
  return m;
}

}  // namespace

TEST_CASE("simulate then fit recovers the classes") {
  const auto dir = fresh_dir("simfit");
  write_text_file(dir / "c.json", ar1_case2("ScaledCommon", 1).dump());
  REQUIRE(run_command(manifest(Command::Simulate, dir / "c.json", dir / "sim")) == 0);
  CHECK(fs::exists(dir / "sim" / "scenario.json"));
  const auto z = load_range_profile(dir / "sim" / "range_profile.csv");
  CHECK(z.n_bins() == 96);
  CHECK(z.n_channels() == 16);
  const auto truth = load_labels(dir / "sim" / "truth_labels.csv");
  CHECK(truth.size() == 96);

  auto m = manifest(Command::Fit, dir / "c.json", dir / "fit");
  m.data_path = dir / "sim" / "range_profile.csv";
  m.truth_path = dir / "sim" / "truth_labels.csv";
  REQUIRE(run_command(m) == 0);
  const json result = read_json_file(dir / "fit" / "fit_result.json");
  CHECK(result["classification_error"]["PowerOrder"].get<int>() <= 2);
  CHECK(result["ll_trace"].size() == 11);
  json core = result;
  for (const char* key : {"fit_config", "init_seed", "classification_error"}) core.erase(key);
  const auto back = fit_result_from_json(core);
  CHECK(back.labels.size() == 96);

  const std::string csv = slurp(dir / "fit" / "fit_labels.csv");
  CHECK(csv.rfind("bin_index,true_label,estimated_label\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 97);
}

TEST_CASE("fit with one class labels everything 1") {
  const auto dir = fresh_dir("one");
  json c = ar1_case2("General", 1);
  c["scenario"]["class_sizes"] = {40};
  c["scenario"]["clutter_powers_db"] = {20};
  c["fit"]["L"] = 1;
  write_text_file(dir / "c.json", c.dump());
  REQUIRE(run_command(manifest(Command::Simulate, dir / "c.json", dir / "sim")) == 0);
  auto m = manifest(Command::Fit, dir / "c.json", dir / "fit");
  m.data_path = dir / "sim" / "range_profile.csv";
  REQUIRE(run_command(m) == 0);
  const auto labels = read_json_file(dir / "fit" / "fit_result.json")["labels"].get<std::vector<int>>();
  CHECK(labels == std::vector<int>(40, 1));
}

TEST_CASE("benchmark reports are byte-identical across runs") {
  const auto dir = fresh_dir("bench");
  write_text_file(dir / "c.json", ar1_case2("ScaledCommon", 4).dump());
  auto m = manifest(Command::Benchmark, dir / "c.json", dir / "a");
  REQUIRE(run_command(m) == 0);
  m.output_dir = dir / "b";
  REQUIRE(run_command(m) == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "histogram.csv").rfind("error_count,frequency\n", 0) == 0);
  CHECK(fs::exists(dir / "a" / "timing.json"));
  const json report = read_json_file(dir / "a" / "report.json");
  CHECK(report["trials"] == 4);
  CHECK(!report.contains("mean_runtime_ms"));

  m.trials = 2;
  m.seed = 99;
  m.output_dir = dir / "c";
  REQUIRE(run_command(m) == 0);
  const json over = read_json_file(dir / "c" / "report.json");
  CHECK(over["trials"] == 2);
  CHECK(over["master_seed"] == 99);
}

TEST_CASE("tables grid") {
  const auto dir = fresh_dir("tables");
  json c = ar1_case2("General", 2);
  c.erase("fit");
  json s2 = c["scenario"];
  s2["clutter_powers_db"] = {20, 35, 50};
  c["grid"] = {{"scenarios", {{{"label", "case2"}, {"scenario", c["scenario"]}}, {{"label", "case3"}, {"scenario", s2}}}},
               {"methods",
                {{{"label", "general"}, {"fit", {{"model_kind", "General"}, {"L", 3}}}},
                 {{"label", "scaled"}, {"fit", {{"model_kind", "ScaledCommon"}, {"L", 3}}}}}}};
  c.erase("scenario");
  write_text_file(dir / "c.json", c.dump());
  REQUIRE(run_command(manifest(Command::Tables, dir / "c.json", dir / "out")) == 0);
  const json t = read_json_file(dir / "out" / "tables.json");
  CHECK(t["rmsce"].size() == 2);
  CHECK(t["rmsce"][0].size() == 2);
  const std::string csv = slurp(dir / "out" / "tables.csv");
  CHECK(csv.rfind("method,case2,case3\n", 0) == 0);
}

TEST_CASE("errors produce a nonzero status and error.json") {
  const auto dir = fresh_dir("errors");
  json c = ar1_case2("General", 1);
  c["scenario"]["clutter_powers_db"] = {20, 30};
  write_text_file(dir / "c.json", c.dump());
  fs::create_directories(dir / "out");
  CHECK(run_command(manifest(Command::Simulate, dir / "c.json", dir / "out")) == 1);
  const json err = read_json_file(dir / "out" / "error.json");
  CHECK(err["error"]["type"] == "ConfigError");
  CHECK(err["error"]["key_path"] == "scenario.clutter_powers_db");

  auto m = manifest(Command::Fit, dir / "c.json", dir / "fit");
  CHECK(run_command(m) == 1);

  write_text_file(dir / "bad.csv", "{\"layout\":\"csv-interleaved\",\"n_bins\":1,\"n_channels\":2}\n1,2,3\n");
  c["scenario"]["clutter_powers_db"] = {20, 30, 40};
  write_text_file(dir / "c.json", c.dump());
  m.data_path = dir / "bad.csv";
  m.output_dir = dir / "fit2";
  CHECK(run_command(m) == 1);
  const json err2 = read_json_file(dir / "fit2" / "error.json");
  CHECK(err2["error"]["type"] == "DataFormatError");
  CHECK(err2["error"]["line"] == 2);
}

TEST_CASE("error_to_json types") {
  CHECK(error_to_json(ClassCollapseError(2, 3, "x"))["error"]["iteration"] == 3);
  CHECK(error_to_json(NumericalError("x"))["error"]["type"] == "NumericalError");
  CHECK(error_to_json(std::runtime_error("x"))["error"]["type"] == "InternalError");
}
