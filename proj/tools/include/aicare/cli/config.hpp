#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "aicare/model/hyper.hpp"

namespace aicare::cli {

enum class Task { Mortality, Preterm };
std::string to_string(Task task);
Task parse_task(const std::string& text);

/// One experiment. JSON form:
///   {
///     "task": "mortality" | "preterm",
///     "data": {"schema": path, "visits": path, "statics": path},
///     "output_dir": path,
///     "folds": 10, "seed": 42,
///     "preset": "xy",                      optional, applied before "hyper"
///     "hyper": {"hidden_dim", "n_heads", "lr", "batch_size", "max_epochs",
///               "patience", "seed", "lambda_dec", "clip_norm"},
///     "labeling": {"horizon_days": 365, "preterm_week": 37, "window_days": 300},
///     "cleaning": {"aggregate_same_day": true, "max_missing_rate": 0.9},
///     "calibration": {"beta": 1.0}
///   }
/// Relative paths resolve against the working directory. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
struct RunConfig {
  Task task = Task::Mortality;
  std::filesystem::path schema;
  std::filesystem::path visits;
  std::filesystem::path statics;
  std::filesystem::path output_dir = "out";
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::optional<std::string> preset;
  /// Channel dims are left 0 and filled from the schema at training time.
  model::ModelHyper hyper;
  double horizon_days = 365.0;
  double preterm_week = 37.0;
  double window_days = 300.0;
  bool aggregate_same_day = true;
  double max_missing_rate = 0.9;
  double calibration_beta = 1.0;

  /// Throws Error on unknown keys or malformed values.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// SHA-256 of the canonical JSON form.
  std::string hash() const;
  /// Throws Error naming the first problem: missing input file, bad fold
  /// count or invalid hyperparameters.
  void validate() const;
};

}  // namespace aicare::cli
