#include "wsob/core.hpp"
#include "wsob/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

nlohmann::json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wsob::InvalidInput("cannot read config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw wsob::InvalidInput(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Sobolev numerics on structured Radon measures"};
  app.require_subcommand(0, 1);

  std::string preset;
  std::string out_dir = "wsob-out";
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
  bool list_catalog = false;

  app.add_option("--preset", preset, "Run a named preset")
      ->check(CLI::IsMember(wsob::preset_names()));
  app.add_option("--out", out_dir, "Directory for report.json and CSV tables")->capture_default_str();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--resolution-scale", scale, "Multiply every resolution parameter")
      ->check(CLI::PositiveNumber);
  app.add_flag("--list-catalog", list_catalog, "Print catalog measures, fields, ensembles and presets as JSON");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config JSON file")->required()->check(CLI::ExistingFile);
  run->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (list_catalog) {
    std::cout << wsob::catalog_listing().dump(2) << "\n";
    return 0;
  }
  if (run->parsed() == !preset.empty()) {
    std::cerr << "give exactly one of `run <config.json>` or `--preset <name>`\n";
    return 1;
  }

  nlohmann::json config;
  try {
    config = preset.empty() ? read_config(config_path) : wsob::preset_config(preset);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  wsob::RunOptions options;
  options.seed = seed;
  options.resolution_scale = scale;
  options.out_dir = out_dir;

  wsob::BatchOutcome result;
  try {
    result = wsob::run_batch(config, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& err : result.config_errors) std::cerr << "config error: " << err << "\n";
  for (const auto& e : result.experiments) {
    std::cout << "[" << wsob::to_string(e.status) << "] " << e.name << " (" << e.kind << "): " << e.summary << "\n";
  }
  if (result.config_errors.empty()) std::cout << "wrote " << result.files.size() << " file(s) to " << out_dir << "\n";
  return result.exit_code;
}
