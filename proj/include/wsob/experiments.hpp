#pragma once

// Batch experiments: config validation, execution and report output.

#include "wsob/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wsob {

enum class ExperimentStatus { complete, invariant_violation, error };

std::string to_string(ExperimentStatus s);

struct ExperimentOutcome {
  std::string name;
  std::string kind;
  ExperimentStatus status = ExperimentStatus::complete;
  std::string summary;  ///< one line
  nlohmann::json report;
  std::vector<CsvTable> tables;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  ///< overrides the config's seed
  double resolution_scale = 1.0;
  std::optional<std::filesystem::path> out_dir;  ///< no files written when absent
};

struct BatchOutcome {
  int exit_code = 0;  ///< 0 complete, 1 config error, 2 invariant violation
  std::vector<std::string> config_errors;  ///< "<json path>: message"
  std::vector<ExperimentOutcome> experiments;
  nlohmann::json resolved_config;
  nlohmann::json report;
  /// file name -> content, in output order
  std::vector<std::pair<std::string, std::string>> files;
};

std::vector<std::string> preset_names();
/// Throws InvalidInput for unknown names.
nlohmann::json preset_config(const std::string& name);

/// Validates every experiment before running any; runs them concurrently and
/// collects the outcomes in config order.
BatchOutcome run_batch(const nlohmann::json& config, const RunOptions& options);

/// Catalog measures (with dimension and components), fields, ensembles,
/// presets and experiment kinds.
nlohmann::json catalog_listing();

}  // namespace wsob
