#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <nlohmann/json.hpp>

namespace aicare::analytics {

/// Mann-Whitney U / (n_pos * n_neg); tied pairs count one half.
/// Throws std::invalid_argument unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: sum over distinct score thresholds, high to low, of
/// (recall gain) * precision. Tied scores enter together. Throws without positives.
double auprc(std::span<const double> scores, std::span<const int> labels);

/// Rates left empty where their denominator is zero.
struct MetricReport {
  std::optional<double> auroc;
  std::optional<double> auprc;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> f_beta;
  double beta = 1.0;
  double threshold = 0.5;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  /// Undefined rates serialize as null.
  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& doc);
  bool operator==(const MetricReport&) const = default;
};

/// Predicts positive when score >= threshold. AUROC/AUPRC are filled when
/// the labels make them defined.
MetricReport confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                               double threshold, double beta = 1.0);

/// F-beta from counts; empty when precision or recall is undefined or both are 0.
std::optional<double> f_beta_score(std::size_t tp, std::size_t fp, std::size_t fn, double beta);

}  // namespace aicare::analytics
