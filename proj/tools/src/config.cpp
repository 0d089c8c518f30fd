#include "aicare/cli/config.hpp"

#include <fstream>
#include <set>

#include "aicare/error.hpp"
#include "aicare/hash.hpp"

namespace aicare::cli {

namespace {

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& known, const std::string& where) {
  if (!doc.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw Error("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T read(const nlohmann::json& doc, const char* key, T fallback, const std::string& where) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error("config: " + where + "." + key + " has the wrong type");
  }
}

}  // namespace

std::string to_string(Task task) { return task == Task::Preterm ? "preterm" : "mortality"; }

Task parse_task(const std::string& text) {
  if (text == "mortality") return Task::Mortality;
  if (text == "preterm") return Task::Preterm;
  throw Error("unknown task '" + text + "' (expected mortality or preterm)");
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  reject_unknown(doc,
                 {"task", "data", "output_dir", "folds", "seed", "preset", "hyper", "labeling", "cleaning",
                  "calibration"},
                 "config");
  RunConfig c;
  c.task = parse_task(read<std::string>(doc, "task", "mortality", "config"));
  const auto data = doc.value("data", nlohmann::json::object());
  reject_unknown(data, {"schema", "visits", "statics"}, "data");
  c.schema = read<std::string>(data, "schema", "", "data");
  c.visits = read<std::string>(data, "visits", "", "data");
  c.statics = read<std::string>(data, "statics", "", "data");
  c.output_dir = read<std::string>(doc, "output_dir", "out", "config");
  c.folds = read<std::size_t>(doc, "folds", c.folds, "config");
  c.seed = read<std::uint64_t>(doc, "seed", c.seed, "config");

  if (doc.contains("preset")) {
    c.preset = read<std::string>(doc, "preset", "", "config");
    try {
      c.hyper = model::preset(*c.preset);
    } catch (const std::invalid_argument& e) {
      throw Error(std::string("config: ") + e.what());
    }
  }
  // Channel dims come from the schema, never from the preset's cohort.
  c.hyper.dynamic_dim = 0;
  c.hyper.static_dim = 0;
  const auto hyper = doc.value("hyper", nlohmann::json::object());
  reject_unknown(hyper,
                 {"hidden_dim", "n_heads", "lr", "batch_size", "max_epochs", "patience", "seed", "lambda_dec",
                  "clip_norm"},
                 "hyper");
  auto merged = c.hyper.to_json();
  merged.update(hyper);
  try {
    c.hyper = model::ModelHyper::from_json(merged);
  } catch (const nlohmann::json::exception&) {
    throw Error("config: hyper has a value of the wrong type");
  }

  const auto labeling = doc.value("labeling", nlohmann::json::object());
  reject_unknown(labeling, {"horizon_days", "preterm_week", "window_days"}, "labeling");
  c.horizon_days = read<double>(labeling, "horizon_days", c.horizon_days, "labeling");
  c.preterm_week = read<double>(labeling, "preterm_week", c.preterm_week, "labeling");
  c.window_days = read<double>(labeling, "window_days", c.window_days, "labeling");

  const auto cleaning = doc.value("cleaning", nlohmann::json::object());
  reject_unknown(cleaning, {"aggregate_same_day", "max_missing_rate"}, "cleaning");
  c.aggregate_same_day = read<bool>(cleaning, "aggregate_same_day", c.aggregate_same_day, "cleaning");
  c.max_missing_rate = read<double>(cleaning, "max_missing_rate", c.max_missing_rate, "cleaning");

  const auto calibration = doc.value("calibration", nlohmann::json::object());
  reject_unknown(calibration, {"beta"}, "calibration");
  c.calibration_beta = read<double>(calibration, "beta", c.calibration_beta, "calibration");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config not found: " + path.string());
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error("config: " + path.string() + " is not valid JSON");
  return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
  auto hyper_doc = hyper.to_json();
  hyper_doc.erase("dynamic_dim");
  hyper_doc.erase("static_dim");
  nlohmann::json doc = {
      {"task", to_string(task)},
      {"data", {{"schema", schema.string()}, {"visits", visits.string()}, {"statics", statics.string()}}},
      {"output_dir", output_dir.string()},
      {"folds", folds},
      {"seed", seed},
      {"hyper", hyper_doc},
      {"labeling", {{"horizon_days", horizon_days}, {"preterm_week", preterm_week}, {"window_days", window_days}}},
      {"cleaning", {{"aggregate_same_day", aggregate_same_day}, {"max_missing_rate", max_missing_rate}}},
      {"calibration", {{"beta", calibration_beta}}}};
  if (preset) doc["preset"] = *preset;
  return doc;
}

std::string RunConfig::hash() const { return sha256_hex(to_json().dump()); }

void RunConfig::validate() const {
  for (const auto& [name, path] : {std::pair{"data.schema", schema}, {"data.visits", visits}, {"data.statics", statics}}) {
    if (path.empty()) throw Error(std::string("config: ") + name + " is required");
    if (!std::filesystem::exists(path)) throw NotFoundError(std::string("config: ") + name + " not found: " + path.string());
  }
  if (folds < 3) throw Error("config: folds must be at least 3 (train, validation and test parts)");
  if (!(max_missing_rate > 0.0 && max_missing_rate <= 1.0)) throw Error("config: cleaning.max_missing_rate must be in (0, 1]");
  if (!(horizon_days > 0.0)) throw Error("config: labeling.horizon_days must be positive");
  if (!(calibration_beta > 0.0)) throw Error("config: calibration.beta must be positive");
  auto h = hyper;
  h.dynamic_dim = 1;
  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

}  // namespace aicare::cli
