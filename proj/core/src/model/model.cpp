#include "aicare/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aicare/error.hpp"
#include "aicare/num/gru.hpp"
#include "aicare/num/ops.hpp"
#include "aicare/num/random.hpp"

namespace aicare::model {

using num::Shape;
using num::Tensor;
using num::Var;

nlohmann::json TrainingMeta::to_json() const {
  return {{"epochs_run", epochs_run}, {"best_epoch", best_epoch}, {"best_val_auprc", best_val_auprc}};
}

TrainingMeta TrainingMeta::from_json(const nlohmann::json& doc) {
  TrainingMeta m;
  m.epochs_run = doc.value("epochs_run", m.epochs_run);
  m.best_epoch = doc.value("best_epoch", m.best_epoch);
  m.best_val_auprc = doc.value("best_val_auprc", m.best_val_auprc);
  return m;
}

namespace {

struct ParamSpec {
  const char* name;
  Shape shape;
  std::size_t fan_in;
};

std::vector<ParamSpec> layout(std::size_t d, std::size_t s, std::size_t h) {
  std::vector<ParamSpec> specs{
      {"gru_wx_rz", {d, 2, 2 * h}, 2}, {"gru_wx_n", {d, 2, h}, 2},
      {"gru_wh_rz", {d, h, 2 * h}, h}, {"gru_wh_n", {d, h, h}, h},
      {"gru_b_rz", {d, 1, 2 * h}, h},  {"gru_b_n", {d, 1, h}, h},
  };
  if (s > 0) {
    specs.push_back({"st_w", {s, 1, h}, 1});
    specs.push_back({"st_b", {s, 1, h}, 1});
    specs.push_back({"mlp_w", {s, h}, s});
    specs.push_back({"mlp_b", {h}, s});
    specs.push_back({"wps", {h, h}, h});
  }
  for (const char* name : {"wq", "wk", "wv", "wo"}) specs.push_back({name, {h, h}, h});
  specs.push_back({"bo", {h}, h});
  specs.push_back({"wpq", {h, h}, h});
  specs.push_back({"bp", {h}, h});
  specs.push_back({"wtk", {h, h}, h});
  specs.push_back({"wo1", {h, h}, h});
  specs.push_back({"bo1", {h}, h});
  specs.push_back({"w_out", {h, 1}, h});
  specs.push_back({"b_out", {1}, h});
  return specs;
}

ModelHyper reconcile(const ehr::FeatureSchema& schema, ModelHyper hyper) {
  if (hyper.dynamic_dim == 0 && hyper.static_dim == 0) {
    hyper.dynamic_dim = schema.n_dynamic();
    hyper.static_dim = schema.n_static();
  }
  hyper.validate();
  if (hyper.dynamic_dim != schema.n_dynamic() || hyper.static_dim != schema.n_static()) {
    throw std::invalid_argument("hyperparameters declare (" + std::to_string(hyper.static_dim) +
                                " static, " + std::to_string(hyper.dynamic_dim) +
                                " dynamic) features but the schema has (" +
                                std::to_string(schema.n_static()) + ", " +
                                std::to_string(schema.n_dynamic()) + ")");
  }
  return hyper;
}

// Parameter variables looked up by name.
class Params {
 public:
  Params(std::span<const Var> vars, const num::ParamSet& names) : vars_(vars), names_(names) {
    if (vars.size() != names.size()) {
      throw std::invalid_argument("forward_graph: expected " + std::to_string(names.size()) +
                                  " parameter variables, got " + std::to_string(vars.size()));
    }
  }
  const Var& operator()(const std::string& name) const {
    const auto idx = names_.index_of(name);
    if (!idx) throw std::logic_error("model has no parameter '" + name + "'");
    return vars_[*idx];
  }

 private:
  std::span<const Var> vars_;
  const num::ParamSet& names_;
};

Var repeat_rows(const Var& x, std::size_t times) {
  if (times == 1) return x;
  std::vector<Var> copies(times, x);
  return num::concat(copies, 0);
}

}  // namespace

Model init_model(const ehr::FeatureSchema& schema, ModelHyper hyper) {
  Model m;
  m.schema = schema;
  m.hyper = reconcile(schema, hyper);
  num::Rng rng(m.hyper.seed);
  for (const auto& spec : layout(m.hyper.dynamic_dim, m.hyper.static_dim, m.hyper.hidden_dim)) {
    m.params.add(spec.name, num::uniform_fan_in(spec.shape, spec.fan_in, rng));
  }
  return m;
}

Model zero_model(const ehr::FeatureSchema& schema, ModelHyper hyper) {
  Model m;
  m.schema = schema;
  m.hyper = reconcile(schema, hyper);
  for (const auto& spec : layout(m.hyper.dynamic_dim, m.hyper.static_dim, m.hyper.hidden_dim)) {
    m.params.add(spec.name, Tensor::zeros(spec.shape));
  }
  return m;
}

Batch make_batch(std::span<const ehr::PatientTensor* const> patients, std::size_t prefix) {
  if (patients.empty()) throw std::invalid_argument("make_batch: no patients");
  Batch b;
  b.n_patients = patients.size();
  b.n_dynamic = patients.front()->n_dynamic;
  b.n_static = patients.front()->n_static;
  for (const auto* p : patients) {
    if (p->n_dynamic != b.n_dynamic || p->n_static != b.n_static) {
      throw DataError("make_batch: patient '" + p->patient_id + "' has a different feature layout");
    }
    if (p->n_visits == 0) throw DataError("make_batch: patient '" + p->patient_id + "' has no visits");
    std::size_t len = p->n_visits;
    if (prefix > 0) {
      if (prefix > p->n_visits) {
        throw std::out_of_range("prefix " + std::to_string(prefix) + " exceeds " +
                                std::to_string(p->n_visits) + " visits of patient '" +
                                p->patient_id + "'");
      }
      len = prefix;
    }
    b.lengths.push_back(len);
    b.n_steps = std::max(b.n_steps, len);
  }
  const std::size_t B = b.n_patients;
  const std::size_t D = b.n_dynamic;
  const std::size_t S = b.n_static;
  const std::size_t N = b.n_rows();
  std::vector<double> valid(N, 0.0);
  std::vector<double> labeled(N, 0.0);
  std::vector<double> labels(N, 0.0);
  for (std::size_t t = 0; t < b.n_steps; ++t) {
    std::vector<double> x(D * B * 2, 0.0);
    for (std::size_t i = 0; i < B; ++i) {
      const auto* p = patients[i];
      if (t >= b.lengths[i]) continue;
      for (std::size_t j = 0; j < D; ++j) {
        x[(j * B + i) * 2] = p->z(t, j);
        x[(j * B + i) * 2 + 1] = p->gaps[t];
      }
      const std::size_t n = b.row(t, i);
      valid[n] = 1.0;
      const auto label = t < p->labels.size() ? p->labels[t] : ehr::VisitLabel::Excluded;
      if (label != ehr::VisitLabel::Excluded) {
        labeled[n] = 1.0;
        labels[n] = label == ehr::VisitLabel::Positive ? 1.0 : 0.0;
      }
    }
    b.steps.emplace_back(Shape{D, B, 2}, std::move(x));
  }
  std::vector<double> st(S * B);
  for (std::size_t j = 0; j < S; ++j) {
    for (std::size_t i = 0; i < B; ++i) st[j * B + i] = patients[i]->static_z[j];
  }
  b.statics = Tensor({S, B, 1}, std::move(st));
  b.valid = Tensor({N}, std::move(valid));
  b.labeled = Tensor({N}, std::move(labeled));
  b.labels = Tensor({N}, std::move(labels));
  return b;
}

Batch make_batch(const ehr::PatientTensor& patient, std::size_t prefix) {
  const ehr::PatientTensor* one[] = {&patient};
  return make_batch(one, prefix);
}

ForwardGraph forward_graph(num::Tape& tape, std::span<const Var> vars, const Model& model,
                           const Batch& batch) {
  const Params P(vars, model.params);
  const std::size_t H = model.hyper.hidden_dim;
  const std::size_t nh = model.hyper.n_heads;
  const std::size_t dk = H / nh;
  const std::size_t D = model.hyper.dynamic_dim;
  const std::size_t S = model.hyper.static_dim;
  const std::size_t C = D + S;
  const std::size_t B = batch.n_patients;
  const std::size_t T = batch.n_steps;
  const std::size_t N = batch.n_rows();
  if (batch.n_dynamic != D || batch.n_static != S) {
    throw DataError("forward: batch has (" + std::to_string(batch.n_static) + " static, " +
                    std::to_string(batch.n_dynamic) + " dynamic) features, model expects (" +
                    std::to_string(S) + ", " + std::to_string(D) + ")");
  }

  // Per-feature GRU channels, all channels in one grouped step.
  const num::GruWeights gru{P("gru_wx_rz"), P("gru_wx_n"), P("gru_wh_rz"),
                            P("gru_wh_n"),  P("gru_b_rz"), P("gru_b_n")};
  Var h = tape.constant(Tensor::zeros({D, B, H}));
  std::vector<Var> per_step;
  per_step.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    h = num::gru_cell_step(tape.constant(batch.steps[t]), h, gru);
    per_step.push_back(num::permute(h, {1, 0, 2}));  // [B, D, H]
  }
  Var embed = num::concat(per_step, 0);  // [N, D, H]

  Var context;  // [N, H] patient context from statics
  if (S > 0) {
    Var s = tape.constant(batch.statics);  // [S, B, 1]
    Var st = num::tanh(num::add(num::bmm(s, P("st_w")), P("st_b")));  // [S, B, H]
    Var st_rows = repeat_rows(num::permute(st, {1, 0, 2}), T);       // [N, S, H]
    const Var parts[] = {embed, st_rows};
    embed = num::concat(parts, 1);
    Var s_bh = num::permute(num::reshape(s, {S, B}), {1, 0});                   // [B, S]
    Var m = num::tanh(num::add(num::matmul(s_bh, P("mlp_w")), P("mlp_b")));    // [B, H]
    context = num::matmul(repeat_rows(m, T), P("wps"));
  }

  // Multi-head self-attention across channels.
  auto split = [&](const Var& x) {
    return num::reshape(num::permute(num::reshape(x, {N, C, nh, dk}), {0, 2, 1, 3}), {N * nh, C, dk});
  };
  Var q = split(num::bmm(embed, P("wq")));
  Var k = split(num::bmm(embed, P("wk")));
  Var v = split(num::bmm(embed, P("wv")));
  Var attn = num::softmax(num::scale(num::bmm(q, k, true), 1.0 / std::sqrt(double(dk))), 2);
  Var head_out = num::bmm(attn, v);  // [N*nh, C, dk]
  Var heads = num::reshape(head_out, {N, nh, C * dk});
  Var merged =
      num::reshape(num::permute(num::reshape(head_out, {N, nh, C, dk}), {0, 2, 1, 3}), {N, C, H});
  Var z = num::add(embed, num::add(num::bmm(merged, P("wo")), P("bo")));  // [N, C, H]

  // Terminal attention with the patient query.
  Var q_in = num::add(num::matmul(num::mean(z, 1), P("wpq")), P("bp"));
  if (S > 0) q_in = num::add(q_in, context);
  Var p = num::tanh(q_in);  // [N, H]
  Var keys = num::bmm(z, P("wtk"));
  Var scores = num::reshape(num::bmm(keys, num::reshape(p, {N, H, 1})), {N, C});
  Var alpha = num::softmax(num::scale(scores, 1.0 / std::sqrt(double(H))), 1);
  Var r = num::reshape(num::bmm(num::reshape(alpha, {N, 1, C}), z), {N, H});
  Var o = num::tanh(num::add(num::matmul(r, P("wo1")), P("bo1")));
  Var logits = num::reshape(num::add(num::matmul(o, P("w_out")), P("b_out")), {N});
  return {logits, alpha, heads};
}

Var decorrelation_loss(const Var& heads, const Tensor& valid) {
  const Shape& s = heads.shape();
  if (s.size() != 3 || valid.shape() != Shape{s[0]}) {
    throw std::invalid_argument("decorrelation_loss: heads must be [N, heads, L] with a [N] mask");
  }
  num::Tape& tape = *heads.tape();
  const std::size_t nh = s[1];
  if (nh < 2) return tape.constant(Tensor::scalar(0.0));
  // Zero vectors normalize to zero and contribute nothing.
  constexpr double kEps = 1e-12;
  Var norm = num::sqrt(num::add_scalar(num::sum(num::square(heads), 2, true), kEps));
  Var unit = num::div(heads, norm);
  Var cos2 = num::square(num::bmm(unit, unit, true));  // [N, nh, nh]
  std::vector<double> off_diagonal(nh * nh, 1.0);
  for (std::size_t i = 0; i < nh; ++i) off_diagonal[i * nh + i] = 0.0;
  Var off = num::mul(cos2, tape.constant(Tensor({nh, nh}, std::move(off_diagonal))));
  Var per_visit = num::scale(num::sum(num::sum(off, 2), 1), 1.0 / double(nh * (nh - 1)));
  return num::masked_mean(per_visit, valid);
}

Var total_loss(const ForwardGraph& graph, const Batch& batch, double lambda_dec) {
  bool any = false;
  for (double m : batch.labeled.data()) any = any || m != 0.0;
  if (!any) throw DataError("loss: batch has no labeled visit");
  Var bce = num::bce_with_logits(graph.logits, batch.labels, batch.labeled);
  if (lambda_dec == 0.0) return bce;
  return num::add(bce, num::scale(decorrelation_loss(graph.heads, batch.valid), lambda_dec));
}

namespace {

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<PerVisitOutputs> run_inference(const Model& model, const Batch& batch) {
  num::Tape tape;
  std::vector<Var> vars;
  vars.reserve(model.params.size());
  for (const auto& e : model.params.entries()) vars.push_back(tape.constant(e.value));
  const auto g = forward_graph(tape, vars, model, batch);
  const auto logits = g.logits.value().data();
  const auto alpha = g.importance.value().data();
  const std::size_t C = model.schema.n_channels();
  std::vector<PerVisitOutputs> out(batch.n_patients);
  for (std::size_t b = 0; b < batch.n_patients; ++b) {
    auto& o = out[b];
    o.n_channels = C;
    for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
      const std::size_t n = batch.row(t, b);
      o.logits.push_back(logits[n]);
      o.risks.push_back(stable_sigmoid(logits[n]));
      o.importance.insert(o.importance.end(), alpha.begin() + n * C, alpha.begin() + (n + 1) * C);
    }
  }
  return out;
}

}  // namespace

PerVisitOutputs forward(const Model& model, const ehr::PatientTensor& patient, std::size_t prefix_len) {
  return run_inference(model, make_batch(patient, prefix_len)).front();
}

std::vector<PerVisitOutputs> forward_many(const Model& model,
                                          std::span<const ehr::PatientTensor> patients,
                                          std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("forward_many: batch_size must be positive");
  std::vector<PerVisitOutputs> out;
  out.reserve(patients.size());
  for (std::size_t start = 0; start < patients.size(); start += batch_size) {
    const std::size_t end = std::min(patients.size(), start + batch_size);
    std::vector<const ehr::PatientTensor*> ptrs;
    for (std::size_t i = start; i < end; ++i) ptrs.push_back(&patients[i]);
    auto part = run_inference(model, make_batch(ptrs));
    for (auto& p : part) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace aicare::model
