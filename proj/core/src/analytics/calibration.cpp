#include "aicare/analytics/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aicare::analytics {

namespace {

void require_both_classes(std::span<const double> x, std::span<const int> labels, const char* who) {
  if (x.size() != labels.size()) {
    throw std::invalid_argument(std::string(who) + ": scores and labels differ in length");
  }
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument(std::string(who) + ": non-finite input");
    if (labels[i] == 1) {
      pos = true;
    } else if (labels[i] == 0) {
      neg = true;
    } else {
      throw std::invalid_argument(std::string(who) + ": labels must be 0 or 1");
    }
  }
  if (!pos || !neg) throw std::invalid_argument(std::string(who) + ": both classes must be present");
}

}  // namespace

double calibrated_probability(double logit, double temperature) {
  const double x = logit / temperature;
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double temperature_bce(std::span<const double> logits, std::span<const int> labels, double temperature) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits[i] / temperature;
    total += std::max(x, 0.0) - x * labels[i] + std::log1p(std::exp(-std::abs(x)));
  }
  return total / static_cast<double>(logits.size());
}

TemperatureFit fit_temperature(std::span<const double> logits, std::span<const int> labels) {
  require_both_classes(logits, labels, "fit_temperature");
  TemperatureFit fit;
  fit.bce_identity = temperature_bce(logits, labels, 1.0);
  const auto [lo_it, hi_it] = std::minmax_element(logits.begin(), logits.end());
  if (*lo_it == *hi_it) {
    fit.bce_fitted = fit.bce_identity;
    fit.warnings.push_back("all validation logits are equal; temperature left at 1");
    return fit;
  }
  auto loss = [&](double t) { return temperature_bce(logits, labels, t); };

  std::vector<double> grid(kTemperatureGrid);
  const double log_lo = std::log(kMinTemperature);
  const double step = (std::log(kMaxTemperature) - log_lo) / static_cast<double>(kTemperatureGrid - 1);
  std::size_t best = 0;
  double best_loss = INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::exp(log_lo + step * static_cast<double>(i));
    if (i == 0) grid[i] = kMinTemperature;
    if (i + 1 == grid.size()) grid[i] = kMaxTemperature;
    const double l = loss(grid[i]);
    if (l < best_loss) {
      best_loss = l;
      best = i;
    }
  }

  // Golden-section search in the neighbouring-grid bracket.
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = loss(c);
  double fd = loss(d);
  while (b - a >= 1e-4) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = loss(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = loss(d);
    }
  }
  double t = 0.5 * (a + b);
  double l = loss(t);
  if (best_loss < l) {
    t = grid[best];
    l = best_loss;
  }
  if (fit.bce_identity <= l) {
    t = 1.0;
    l = fit.bce_identity;
  }
  fit.temperature = t;
  fit.bce_fitted = l;
  return fit;
}

double threshold_grid_point(std::size_t i) {
  return 0.01 + static_cast<double>(i) * 0.98 / static_cast<double>(kThresholdGrid - 1);
}

ThresholdChoice select_threshold(std::span<const double> probs, std::span<const int> labels, double beta) {
  require_both_classes(probs, labels, "select_threshold");
  if (!(beta > 0.0)) throw std::invalid_argument("select_threshold: beta must be positive");
  ThresholdChoice choice;
  choice.threshold = threshold_grid_point(0);
  bool found = false;
  for (std::size_t i = 0; i < kThresholdGrid; ++i) {
    const double th = threshold_grid_point(i);
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      const bool predicted = probs[k] >= th;
      if (labels[k] == 1) {
        predicted ? ++tp : ++fn;
      } else if (predicted) {
        ++fp;
      }
    }
    const double f = f_beta_score(tp, fp, fn, beta).value_or(0.0);
    if (!found || f > choice.f_beta) {
      choice = {th, i, f};
      found = true;
    }
  }
  return choice;
}

nlohmann::json CalibrationArtifact::to_json() const {
  return {{"temperature", temperature},
          {"threshold", threshold},
          {"beta", beta},
          {"validation", validation.to_json()},
          {"warnings", warnings}};
}

CalibrationArtifact CalibrationArtifact::from_json(const nlohmann::json& doc) {
  CalibrationArtifact c;
  c.temperature = doc.at("temperature").get<double>();
  c.threshold = doc.at("threshold").get<double>();
  c.beta = doc.value("beta", 1.0);
  if (doc.contains("validation")) c.validation = MetricReport::from_json(doc["validation"]);
  c.warnings = doc.value("warnings", std::vector<std::string>{});
  if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) {
    throw std::invalid_argument("calibration: temperature must be finite and positive");
  }
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
    throw std::invalid_argument("calibration: threshold must be in (0, 1)");
  }
  return c;
}

CalibrationArtifact calibrate(std::span<const double> val_logits, std::span<const int> val_labels,
                              double beta) {
  const auto fit = fit_temperature(val_logits, val_labels);
  std::vector<double> probs(val_logits.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = calibrated_probability(val_logits[i], fit.temperature);
  }
  const auto choice = select_threshold(probs, val_labels, beta);
  CalibrationArtifact art;
  art.temperature = fit.temperature;
  art.threshold = choice.threshold;
  art.beta = beta;
  art.validation = confusion_metrics(probs, val_labels, choice.threshold, beta);
  art.warnings = fit.warnings;
  return art;
}

}  // namespace aicare::analytics
