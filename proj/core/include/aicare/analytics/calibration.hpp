#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/analytics/metrics.hpp"

namespace aicare::analytics {

inline constexpr double kMinTemperature = 0.05;
inline constexpr double kMaxTemperature = 10.0;
inline constexpr std::size_t kTemperatureGrid = 200;
inline constexpr std::size_t kThresholdGrid = 200;

/// sigmoid(logit / temperature), overflow-safe.
double calibrated_probability(double logit, double temperature);

/// Mean BCE of sigmoid(logit / T) against labels.
double temperature_bce(std::span<const double> logits, std::span<const int> labels, double temperature);

struct TemperatureFit {
  double temperature = 1.0;
  double bce_identity = 0.0;
  double bce_fitted = 0.0;
  std::vector<std::string> warnings;
};

/// Minimizes validation BCE over T in [0.05, 10]: a 200-point log grid,
/// then golden-section search in the bracket around the best grid point
/// until the bracket is narrower than 1e-4. The result never has higher
/// BCE than T = 1. All-equal logits return T = 1 with a warning.
TemperatureFit fit_temperature(std::span<const double> logits, std::span<const int> labels);

/// Candidate i of the threshold grid: 0.01 + i * 0.98 / 199.
double threshold_grid_point(std::size_t i);

struct ThresholdChoice {
  double threshold = 0.5;
  std::size_t grid_index = 0;
  /// 0 when F-beta is undefined at every grid point.
  double f_beta = 0.0;
};

/// Exact argmax of F-beta over the grid; ties go to the lowest threshold.
ThresholdChoice select_threshold(std::span<const double> probs, std::span<const int> labels,
                                 double beta = 1.0);

/// Post-hoc calibration fitted on a validation split.
struct CalibrationArtifact {
  double temperature = 1.0;
  double threshold = 0.5;
  double beta = 1.0;
  /// Validation metrics at the chosen threshold, on calibrated probabilities.
  MetricReport validation;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static CalibrationArtifact from_json(const nlohmann::json& doc);
  bool operator==(const CalibrationArtifact&) const = default;
};

/// Temperature first, then the threshold on the calibrated probabilities.
CalibrationArtifact calibrate(std::span<const double> val_logits, std::span<const int> val_labels,
                              double beta = 1.0);

}  // namespace aicare::analytics
