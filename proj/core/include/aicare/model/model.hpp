#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aicare/ehr/preprocess.hpp"
#include "aicare/ehr/schema.hpp"
#include "aicare/model/hyper.hpp"
#include "aicare/num/params.hpp"
#include "aicare/num/tape.hpp"

namespace aicare::model {

struct TrainingMeta {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_auprc = 0.0;

  nlohmann::json to_json() const;
  static TrainingMeta from_json(const nlohmann::json& doc);
  bool operator==(const TrainingMeta&) const = default;
};

/// Weights plus everything needed to interpret them.
///
/// Architecture, with D dynamic and S static features and C = D + S channels:
///  - dynamic channel j: GRU over (z-scored value, log1p gap) per visit;
///  - static channel j: tanh(s_j * st_w[j] + st_b[j]);
///  - patient context m = tanh(s * mlp_w + mlp_b);
///  - multi-head self-attention over the C channel embeddings, residual;
///  - terminal attention: query p = tanh(mean_c(Z) wpq + m wps + bp), weights
///    alpha = softmax_c(Z wtk . p / sqrt(H)); alpha is the importance vector;
///  - logit = tanh((alpha . Z) wo1 + bo1) w_out + b_out.
struct Model {
  ehr::FeatureSchema schema;
  ModelHyper hyper;
  num::ParamSet params;
  TrainingMeta meta;

  bool operator==(const Model&) const = default;
};

/// Seeded uniform(+-1/sqrt(fan_in)) initialization.
/// Throws std::invalid_argument when hyper and schema disagree.
Model init_model(const ehr::FeatureSchema& schema, ModelHyper hyper);

/// Same shapes as init_model with every weight zero.
Model zero_model(const ehr::FeatureSchema& schema, ModelHyper hyper);

/// Padded, time-major batch of patients. Visit (t, b) is flattened to
/// row n = t * B + b in every per-visit output.
struct Batch {
  std::size_t n_steps = 0;
  std::size_t n_patients = 0;
  std::size_t n_dynamic = 0;
  std::size_t n_static = 0;
  /// One [D, B, 2] tensor per step: (z value, gap) per channel and patient.
  std::vector<num::Tensor> steps;
  /// [S, B, 1]
  num::Tensor statics;
  /// [N] 1 for real visits, 0 for padding.
  num::Tensor valid;
  /// [N] 1 for visits with a label.
  num::Tensor labeled;
  /// [N] 0/1 labels (0 where unlabeled).
  num::Tensor labels;
  /// Visit count per patient.
  std::vector<std::size_t> lengths;

  std::size_t n_rows() const { return n_steps * n_patients; }
  std::size_t row(std::size_t t, std::size_t b) const { return t * n_patients + b; }
};

/// `prefix` caps each patient at its first `prefix` visits (0 = all).
Batch make_batch(std::span<const ehr::PatientTensor* const> patients, std::size_t prefix = 0);
Batch make_batch(const ehr::PatientTensor& patient, std::size_t prefix = 0);

/// Graph nodes produced by one forward pass.
struct ForwardGraph {
  num::Var logits;      // [N]
  num::Var importance;  // [N, C]
  num::Var heads;       // [N, n_heads, C * H / n_heads]
};

/// Builds the forward graph from parameter variables laid out as in
/// `model.params` (same order). Used for training and gradient checks.
ForwardGraph forward_graph(num::Tape& tape, std::span<const num::Var> params, const Model& model,
                           const Batch& batch);

/// Mean over valid visits and head pairs k < l of the squared cosine
/// similarity between head outputs. 0 with a single head.
num::Var decorrelation_loss(const num::Var& heads, const num::Tensor& valid);

/// Masked mean BCE plus lambda_dec times the decorrelation term.
/// Throws DataError when the batch has no labeled visit.
num::Var total_loss(const ForwardGraph& graph, const Batch& batch, double lambda_dec);

struct PerVisitOutputs {
  std::vector<double> logits;
  std::vector<double> risks;
  /// Row-major [visit][channel].
  std::vector<double> importance;
  std::size_t n_channels = 0;

  std::span<const double> importance_at(std::size_t visit) const {
    return std::span<const double>(importance).subspan(visit * n_channels, n_channels);
  }
};

/// Inference for one patient over its first `prefix_len` visits (0 = all).
PerVisitOutputs forward(const Model& model, const ehr::PatientTensor& patient,
                        std::size_t prefix_len = 0);

/// Batched inference; outputs in input order.
std::vector<PerVisitOutputs> forward_many(const Model& model,
                                          std::span<const ehr::PatientTensor> patients,
                                          std::size_t batch_size = 64);

}  // namespace aicare::model
