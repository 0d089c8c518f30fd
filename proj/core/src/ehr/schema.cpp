#include "aicare/ehr/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "aicare/error.hpp"
#include "aicare/hash.hpp"

namespace aicare::ehr {

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::Static ? "static" : "dynamic";
}

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) throw DataError("schema: feature with empty name");
    if (!seen.insert(f.name).second) throw DataError("schema: duplicate feature '" + f.name + "'");
    (f.kind == FeatureKind::Dynamic ? dynamic_ : static_).push_back(f);
  }
  if (dynamic_.empty()) throw DataError("schema: at least one dynamic feature is required");
}

namespace {

std::optional<std::size_t> find(const std::vector<Feature>& list, const std::string& name) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].name == name) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> FeatureSchema::dynamic_index(const std::string& name) const {
  return find(dynamic_, name);
}

std::optional<std::size_t> FeatureSchema::static_index(const std::string& name) const {
  return find(static_, name);
}

std::optional<std::size_t> FeatureSchema::channel_index(const std::string& name) const {
  if (auto d = dynamic_index(name)) return d;
  if (auto s = static_index(name)) return dynamic_.size() + *s;
  return std::nullopt;
}

const Feature& FeatureSchema::channel(std::size_t index) const {
  if (index < dynamic_.size()) return dynamic_[index];
  return static_.at(index - dynamic_.size());
}

FeatureSchema FeatureSchema::without(const std::vector<std::string>& names) const {
  std::vector<Feature> kept;
  for (const auto& f : features_) {
    const bool drop = f.kind == FeatureKind::Dynamic &&
                      std::find(names.begin(), names.end(), f.name) != names.end();
    if (!drop) kept.push_back(f);
  }
  return FeatureSchema(std::move(kept));
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : features_) {
    nlohmann::json item{{"name", f.name},
                        {"kind", to_string(f.kind)},
                        {"unit", f.unit},
                        {"categorical", f.categorical}};
    if (!f.category.empty()) item["category"] = f.category;
    list.push_back(std::move(item));
  }
  return nlohmann::json{{"features", std::move(list)}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw DataError("schema: expected an object with a 'features' array");
  }
  std::vector<Feature> features;
  for (const auto& item : doc["features"]) {
    Feature f;
    try {
      f.name = item.at("name").get<std::string>();
      const auto kind = item.at("kind").get<std::string>();
      if (kind == "static") {
        f.kind = FeatureKind::Static;
      } else if (kind == "dynamic") {
        f.kind = FeatureKind::Dynamic;
      } else {
        throw DataError("schema: feature '" + f.name + "' has unknown kind '" + kind + "'");
      }
      f.unit = item.value("unit", std::string{});
      f.categorical = item.value("categorical", false);
      f.category = item.value("category", std::string{});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("schema: malformed feature entry: ") + e.what());
    }
    features.push_back(std::move(f));
  }
  return FeatureSchema(std::move(features));
}

FeatureSchema FeatureSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

void FeatureSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schema file '" + path + "'");
  out << to_json().dump(2) << '\n';
}

std::string FeatureSchema::hash() const { return sha256_hex(to_json().dump()); }

}  // namespace aicare::ehr
