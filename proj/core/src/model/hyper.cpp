#include "aicare/model/hyper.hpp"

#include <cmath>
#include <stdexcept>

namespace aicare::model {

void ModelHyper::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("hyperparameters: " + what); };
  if (hidden_dim == 0) fail("hidden_dim must be positive");
  if (n_heads == 0) fail("n_heads must be positive");
  if (hidden_dim % n_heads != 0) {
    fail("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by n_heads " +
         std::to_string(n_heads));
  }
  if (!(lambda_dec >= 0.0) || !std::isfinite(lambda_dec)) fail("lambda_dec must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("lr must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (patience == 0) fail("patience must be positive");
  if (dynamic_dim == 0) fail("dynamic_dim must be positive");
  if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
}

nlohmann::json ModelHyper::to_json() const {
  return {{"hidden_dim", hidden_dim}, {"n_heads", n_heads},         {"lambda_dec", lambda_dec},
          {"lr", lr},                 {"batch_size", batch_size},   {"max_epochs", max_epochs},
          {"patience", patience},     {"seed", seed},               {"dynamic_dim", dynamic_dim},
          {"static_dim", static_dim}, {"clip_norm", clip_norm}};
}

ModelHyper ModelHyper::from_json(const nlohmann::json& doc) {
  ModelHyper h;
  h.hidden_dim = doc.value("hidden_dim", h.hidden_dim);
  h.n_heads = doc.value("n_heads", h.n_heads);
  h.lambda_dec = doc.value("lambda_dec", h.lambda_dec);
  h.lr = doc.value("lr", h.lr);
  h.batch_size = doc.value("batch_size", h.batch_size);
  h.max_epochs = doc.value("max_epochs", h.max_epochs);
  h.patience = doc.value("patience", h.patience);
  h.seed = doc.value("seed", h.seed);
  h.dynamic_dim = doc.value("dynamic_dim", h.dynamic_dim);
  h.static_dim = doc.value("static_dim", h.static_dim);
  h.clip_norm = doc.value("clip_norm", h.clip_norm);
  return h;
}

ModelHyper preset(const std::string& name) {
  ModelHyper h;
  h.max_epochs = 30;
  h.seed = 42;
  if (name == "xy") {
    h.patience = 10;
    h.batch_size = 32;
    h.lr = 1e-3;
    h.hidden_dim = 128;
    h.dynamic_dim = 33;
    h.static_dim = 7;
  } else if (name == "bs") {
    h.patience = 10;
    h.batch_size = 16;
    h.lr = 1e-3;
    h.hidden_dim = 128;
    h.dynamic_dim = 66;
    h.static_dim = 23;
  } else if (name == "bc") {
    h.patience = 5;
    h.batch_size = 128;
    h.lr = 1e-2;
    h.hidden_dim = 32;
    h.dynamic_dim = 50;
    h.static_dim = 29;
  } else {
    throw std::invalid_argument("unknown hyperparameter preset '" + name + "'");
  }
  return h;
}

}  // namespace aicare::model
