#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace aicare::model {

struct ModelHyper {
  std::size_t hidden_dim = 128;
  std::size_t n_heads = 4;
  double lambda_dec = 1e-3;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 10;
  std::uint64_t seed = 42;
  std::size_t dynamic_dim = 0;
  std::size_t static_dim = 0;
  double clip_norm = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static ModelHyper from_json(const nlohmann::json& doc);
  bool operator==(const ModelHyper&) const = default;
};

/// Named presets for the three deployment cohorts: "xy", "bs", "bc".
ModelHyper preset(const std::string& name);

}  // namespace aicare::model
