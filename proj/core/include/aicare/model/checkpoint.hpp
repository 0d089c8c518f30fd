#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "aicare/analytics/calibration.hpp"
#include "aicare/ehr/preprocess.hpp"
#include "aicare/model/model.hpp"

namespace aicare::model {

/// File layout, all integers little-endian:
///   "AICARECK"            8-byte magic
///   u32 version           kCheckpointVersion
///   u64 header length, then a UTF-8 JSON header:
///       {schema, schema_hash, hyper, meta, preprocessor, calibration|null,
///        params: [{name, shape}]}
///   u64 weight count, then that many IEEE-754 doubles in `params` order.
inline constexpr std::string_view kCheckpointMagic = "AICARECK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// A trained model bundled with the preprocessing it was trained under, so
/// the two can never be mixed up at serving time.
struct Checkpoint {
  Model model;
  ehr::Preprocessor preprocessor;
  std::optional<analytics::CalibrationArtifact> calibration;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws DataError on bad magic, unsupported version, truncation, or a
/// schema hash that does not match the embedded schema.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// SHA-256 of the serialized checkpoint; identifies a model version.
std::string checkpoint_hash(const Checkpoint& ckpt);

}  // namespace aicare::model
