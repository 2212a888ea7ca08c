#include "wsob/catalog.hpp"
#include "wsob/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace wsob;
using nlohmann::json;

TEST_CASE("presets complete with exit code 0") {
  for (const auto& name : preset_names()) {
    const BatchOutcome r = run_batch(preset_config(name), RunOptions{});
    INFO(name);
    CHECK(r.exit_code == 0);
    CHECK(r.config_errors.empty());
    for (const auto& e : r.experiments) CHECK(e.status == ExperimentStatus::complete);
  }
  CHECK_THROWS_AS(preset_config("nope"), InvalidInput);
}

TEST_CASE("config errors carry JSON paths and stop the batch") {
  const json config = json::parse(R"({
    "experiments": [
      {"kind": "energy", "measure": "segment", "fields": ["x"], "colour": 1},
      {"kind": "defect", "measures": ["segment"], "functional": {"functional": "am", "p": "inf"}},
      {"kind": "sandwich", "measure": "segment", "fields": ["w"]},
      {"kind": "energy", "measure": "segment", "fields": ["x"], "resolution": {"patch_nodes": -3}}
    ]})");
  const BatchOutcome r = run_batch(config, RunOptions{});
  CHECK(r.exit_code == 1);
  REQUIRE(r.config_errors.size() == 4);
  CHECK(r.config_errors[0].rfind("/experiments/0/colour", 0) == 0);
  CHECK(r.config_errors[1].rfind("/experiments/1/functional", 0) == 0);
  CHECK(r.config_errors[2].rfind("/experiments/2/fields/0", 0) == 0);
  CHECK(r.config_errors[3].rfind("/experiments/3/resolution", 0) == 0);
  CHECK(r.experiments.empty());
  CHECK(run_batch(json::parse(R"({"experiments": []})"), RunOptions{}).exit_code == 1);
  CHECK(run_batch(json::parse(R"({"experiments": [{"kind": "energy"}], "extra": 1})"), RunOptions{}).exit_code == 1);
}

TEST_CASE("unmet expectations are invariant violations") {
  const json config = json::parse(R"({"experiments": [
    {"kind": "defect", "measures": ["lebesgue-square"], "pairs": [["x", "y"]],
     "functional": {"functional": "lip", "p": "inf"}, "expect": {"max_relative": 1e-10}}]})");
  const BatchOutcome r = run_batch(config, RunOptions{});
  CHECK(r.exit_code == 2);
  CHECK(r.experiments.front().status == ExperimentStatus::invariant_violation);
  CHECK(r.report.at("experiments").at(0).at("report").at("violations").size() == 1);
}

TEST_CASE("reports embed the resolved config and seed") {
  RunOptions opt;
  opt.seed = 1234;
  opt.resolution_scale = 0.5;
  const BatchOutcome r = run_batch(preset_config("hilbertianity-defect"), opt);
  CHECK(r.report.at("seed") == 1234);
  CHECK(r.report.at("config").at("resolution_scale") == 0.5);
  const json& eff = r.report.at("config").at("experiments").at(0).at("effective_resolution");
  CHECK(eff.at("patch_nodes") == 128);
  CHECK(eff.at("cantor_depth_offset") == -1);
  CHECK(r.report.at("experiments").at(0).at("report").at("seed") == 1234);
}

TEST_CASE("random pairs depend on the seed only") {
  const json config = json::parse(R"({"experiments": [
    {"kind": "defect", "measures": ["segment"], "random_pairs": 5}]})");
  RunOptions a, b;
  a.seed = 1;
  b.seed = 2;
  const auto r1 = run_batch(config, a), r2 = run_batch(config, a), r3 = run_batch(config, b);
  CHECK(r1.files == r2.files);
  CHECK(r1.files[1].second != r3.files[1].second);
}

TEST_CASE("files are written atomically to the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "wsob-test-out";
  std::filesystem::remove_all(dir);
  RunOptions opt;
  opt.out_dir = dir;
  const BatchOutcome r = run_batch(preset_config("cantor-gap"), opt);
  for (const auto& [file, content] : r.files) {
    std::ifstream in(dir / file, std::ios::binary);
    const std::string disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(disk == content);
    CHECK_FALSE(std::filesystem::exists(dir / (file + ".tmp")));
  }
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "cantor-gap.stages.csv"));
}

TEST_CASE("CSV quoting") {
  CsvTable t{"t", {"a", "b"}, {}};
  t.add_row({"plain", "with,comma"});
  t.add_row({"say \"hi\"", "line\nbreak"});
  CHECK(t.render() == "a,b\nplain,\"with,comma\"\n\"say \"\"hi\"\"\",\"line\nbreak\"\n");
  CHECK_THROWS_AS(t.add_row({"one"}), InvalidInput);
}

TEST_CASE("catalog listing") {
  const json j = catalog_listing();
  CHECK(j.at("measures").size() == catalog_measure_names().size());
  CHECK(j.at("presets").size() == 3);
}
