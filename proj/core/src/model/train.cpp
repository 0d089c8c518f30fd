#include "aicare/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aicare/analytics/metrics.hpp"
#include "aicare/error.hpp"
#include "aicare/num/optim.hpp"
#include "aicare/num/random.hpp"

namespace aicare::model {

namespace {

bool has_label(const ehr::PatientTensor& p) {
  return std::any_of(p.labels.begin(), p.labels.end(),
                     [](ehr::VisitLabel l) { return l != ehr::VisitLabel::Excluded; });
}

std::optional<double> validation_auprc(const Model& model, std::span<const ehr::PatientTensor> val) {
  const auto scores = labeled_scores(model, val);
  if (std::find(scores.labels.begin(), scores.labels.end(), 1) == scores.labels.end()) {
    return std::nullopt;
  }
  return analytics::auprc(scores.logits, scores.labels);
}

std::string where(std::size_t epoch, std::size_t batch) {
  return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch);
}

}  // namespace

nlohmann::json EpochRecord::to_json() const {
  return {{"epoch", epoch},
          {"train_loss", train_loss},
          {"val_auprc", val_auprc ? nlohmann::json(*val_auprc) : nlohmann::json()}};
}

LabeledScores labeled_scores(const Model& model, std::span<const ehr::PatientTensor> patients) {
  std::vector<ehr::PatientTensor> kept;
  for (const auto& p : patients) {
    if (!p.duplicate && has_label(p)) kept.push_back(p);
  }
  LabeledScores out;
  const auto outputs = forward_many(model, kept);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t t = 0; t < kept[i].n_visits; ++t) {
      const auto label = kept[i].labels[t];
      if (label == ehr::VisitLabel::Excluded) continue;
      out.logits.push_back(outputs[i].logits[t]);
      out.labels.push_back(label == ehr::VisitLabel::Positive ? 1 : 0);
    }
  }
  return out;
}

TrainResult train(const ehr::FeatureSchema& schema, const ModelHyper& hyper_in,
                  std::span<const ehr::PatientTensor> train_set,
                  std::span<const ehr::PatientTensor> validation, const ProgressFn& progress) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    if (has_label(train_set[i])) order.push_back(i);
  }
  if (order.empty()) throw DataError("train: no labeled visit in the training split");

  TrainResult result;
  Model model = init_model(schema, hyper_in);
  const ModelHyper& hyper = model.hyper;
  auto adam = num::make_adam_state(model.params, {.lr = hyper.lr});
  num::Rng rng(hyper.seed);

  num::ParamSet best_params = model.params;
  std::optional<double> best_auprc;
  std::size_t best_epoch = 0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += hyper.batch_size, ++b) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      std::vector<const ehr::PatientTensor*> members;
      for (std::size_t i = start; i < end; ++i) members.push_back(&train_set[order[i]]);
      const Batch batch = make_batch(members);

      num::Tape tape;
      std::vector<num::Var> vars;
      vars.reserve(model.params.size());
      for (const auto& e : model.params.entries()) vars.push_back(tape.leaf(e.value));
      std::vector<num::Tensor> grads;
      double loss_value = 0.0;
      try {
        const auto graph = forward_graph(tape, vars, model, batch);
        const auto loss = total_loss(graph, batch, hyper.lambda_dec);
        loss_value = loss.value().item();
        tape.backward(loss);
        grads.reserve(vars.size());
        for (const auto& v : vars) grads.push_back(tape.grad(v));
      } catch (const std::domain_error& e) {
        // Tensors refuse non-finite entries, so any blow-up lands here.
        throw DivergenceError("training diverged at " + where(epoch, b) + ": " + e.what());
      }
      if (!std::isfinite(loss_value)) {
        throw DivergenceError("training diverged at " + where(epoch, b) + ": non-finite loss");
      }
      num::clip_gradients(grads, hyper.clip_norm);
      try {
        num::adam_update(model.params, grads, adam);
      } catch (const std::exception& e) {
        throw DivergenceError("training diverged at " + where(epoch, b) + ": " + e.what());
      }
      loss_sum += loss_value;
      ++n_batches;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n_batches);
    rec.val_auprc = validation_auprc(model, validation);
    result.history.push_back(rec);
    if (progress) progress(rec);

    if (!rec.val_auprc) {
      best_params = model.params;
      best_epoch = epoch;
      continue;
    }
    if (!best_auprc || *rec.val_auprc > *best_auprc) {
      best_auprc = rec.val_auprc;
      best_params = model.params;
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= hyper.patience) {
      break;
    }
  }

  if (!best_auprc) {
    result.warnings.push_back("validation AUPRC undefined; kept the final epoch");
  }
  model.params = std::move(best_params);
  model.meta.epochs_run = result.history.size();
  model.meta.best_epoch = best_epoch;
  model.meta.best_val_auprc = best_auprc.value_or(0.0);
  result.model = std::move(model);
  return result;
}

}  // namespace aicare::model
