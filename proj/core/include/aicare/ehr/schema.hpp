#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace aicare::ehr {

enum class FeatureKind { Static, Dynamic };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::Dynamic;
  std::string unit;
  bool categorical = false;
  /// Display group (e.g. "Blood routine"); free text, may be empty.
  std::string category;

  bool operator==(const Feature&) const = default;
};

/// Ordered list of features. Model channels follow the "channel order":
/// dynamic features in schema order, then static features in schema order.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Validates unique names and at least one dynamic feature.
  explicit FeatureSchema(std::vector<Feature> features);

  const std::vector<Feature>& features() const { return features_; }
  const std::vector<Feature>& dynamic_features() const { return dynamic_; }
  const std::vector<Feature>& static_features() const { return static_; }
  std::size_t n_dynamic() const { return dynamic_.size(); }
  std::size_t n_static() const { return static_.size(); }
  std::size_t n_channels() const { return dynamic_.size() + static_.size(); }

  std::optional<std::size_t> dynamic_index(const std::string& name) const;
  std::optional<std::size_t> static_index(const std::string& name) const;
  /// Position of a feature in channel order.
  std::optional<std::size_t> channel_index(const std::string& name) const;
  /// Feature at a channel position.
  const Feature& channel(std::size_t index) const;

  /// Copy without the named dynamic features.
  FeatureSchema without(const std::vector<std::string>& names) const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& doc);
  static FeatureSchema load(const std::string& path);
  void save(const std::string& path) const;

  /// SHA-256 of the canonical JSON form.
  std::string hash() const;

  bool operator==(const FeatureSchema& other) const { return features_ == other.features_; }

 private:
  std::vector<Feature> features_;
  std::vector<Feature> dynamic_;
  std::vector<Feature> static_;
};

std::string to_string(FeatureKind kind);

}  // namespace aicare::ehr
