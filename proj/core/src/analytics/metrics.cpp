#include "aicare/analytics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicare::analytics {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(scores.size()) +
                                " scores but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw std::invalid_argument(std::string(who) + ": non-finite score");
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument(std::string(who) + ": labels must be 0 or 1");
    }
  }
}

// Indices sorted by descending score; equal scores keep input order.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  return idx;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> opt_from(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<double>();
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels, "auroc");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auroc: both classes must be present");
  // Ascending order with average ranks over tie groups.
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[idx[k]] == 1) rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels, "auprc");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (n_pos == 0) throw std::invalid_argument("auprc: at least one positive label is required");
  const auto idx = descending(scores);
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  std::size_t prev_tp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += static_cast<std::size_t>(labels[idx[j]]);
      ++j;
    }
    seen = j;
    if (tp > prev_tp) {
      const double precision = static_cast<double>(tp) / static_cast<double>(seen);
      ap += static_cast<double>(tp - prev_tp) / static_cast<double>(n_pos) * precision;
    }
    prev_tp = tp;
    i = j;
  }
  return ap;
}

std::optional<double> f_beta_score(std::size_t tp, std::size_t fp, std::size_t fn, double beta) {
  const auto precision = ratio(tp, tp + fp);
  const auto recall = ratio(tp, tp + fn);
  if (!precision || !recall || (*precision == 0.0 && *recall == 0.0)) return std::nullopt;
  const double b2 = beta * beta;
  return (1.0 + b2) * *precision * *recall / (b2 * *precision + *recall);
}

MetricReport confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                               double threshold, double beta) {
  check_inputs(scores, labels, "confusion_metrics");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("confusion_metrics: threshold must be in (0, 1)");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("confusion_metrics: beta must be positive");
  MetricReport r;
  r.threshold = threshold;
  r.beta = beta;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      ++(predicted ? r.tp : r.fn);
    } else {
      ++(predicted ? r.fp : r.tn);
    }
  }
  r.accuracy = ratio(r.tp + r.tn, r.total());
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.specificity = ratio(r.tn, r.tn + r.fp);
  r.f_beta = f_beta_score(r.tp, r.fp, r.fn, beta);
  if (r.tp + r.fn > 0) {
    r.auprc = auprc(scores, labels);
    if (r.tn + r.fp > 0) r.auroc = auroc(scores, labels);
  }
  return r;
}

nlohmann::json MetricReport::to_json() const {
  return {{"auroc", opt(auroc)},
          {"auprc", opt(auprc)},
          {"accuracy", opt(accuracy)},
          {"precision", opt(precision)},
          {"recall", opt(recall)},
          {"specificity", opt(specificity)},
          {"f_beta", opt(f_beta)},
          {"beta", beta},
          {"threshold", threshold},
          {"tp", tp},
          {"fp", fp},
          {"tn", tn},
          {"fn", fn}};
}

MetricReport MetricReport::from_json(const nlohmann::json& doc) {
  MetricReport r;
  r.auroc = opt_from(doc, "auroc");
  r.auprc = opt_from(doc, "auprc");
  r.accuracy = opt_from(doc, "accuracy");
  r.precision = opt_from(doc, "precision");
  r.recall = opt_from(doc, "recall");
  r.specificity = opt_from(doc, "specificity");
  r.f_beta = opt_from(doc, "f_beta");
  r.beta = doc.value("beta", 1.0);
  r.threshold = doc.value("threshold", 0.5);
  r.tp = doc.value("tp", std::size_t{0});
  r.fp = doc.value("fp", std::size_t{0});
  r.tn = doc.value("tn", std::size_t{0});
  r.fn = doc.value("fn", std::size_t{0});
  return r;
}

}  // namespace aicare::analytics
