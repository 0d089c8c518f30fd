#include "aicare/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aicare/error.hpp"
#include "aicare/hash.hpp"

namespace aicare::model {

namespace {

template <class U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint: truncated file");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <class U>
  U le() {
    const auto s = take(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<unsigned char>(s[i])) << (8 * i);
    }
    return value;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json params = nlohmann::json::array();
  std::size_t n_weights = 0;
  for (const auto& e : ckpt.model.params.entries()) {
    params.push_back({{"name", e.name}, {"shape", e.value.shape()}});
    n_weights += e.value.size();
  }
  const nlohmann::json header = {
      {"schema", ckpt.model.schema.to_json()},
      {"schema_hash", ckpt.model.schema.hash()},
      {"hyper", ckpt.model.hyper.to_json()},
      {"meta", ckpt.model.meta.to_json()},
      {"preprocessor", ckpt.preprocessor.to_json()},
      {"calibration", ckpt.calibration ? ckpt.calibration->to_json() : nlohmann::json()},
      {"params", params}};
  const std::string text = header.dump();

  std::string out(kCheckpointMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  put_le<std::uint64_t>(out, n_weights);
  out.reserve(out.size() + 8 * n_weights);
  for (const auto& e : ckpt.model.params.entries()) {
    for (double x : e.value.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw DataError("checkpoint: bad magic (not an aicare checkpoint)");
  }
  const auto version = in.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto header_len = in.le<std::uint64_t>();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.model.schema = ehr::FeatureSchema::from_json(header.at("schema"));
  const auto stored_hash = header.at("schema_hash").get<std::string>();
  if (stored_hash != ckpt.model.schema.hash()) {
    throw DataError("checkpoint: schema hash " + stored_hash + " does not match embedded schema " +
                    ckpt.model.schema.hash());
  }
  ckpt.model.hyper = ModelHyper::from_json(header.at("hyper"));
  ckpt.model.meta = TrainingMeta::from_json(header.at("meta"));
  ckpt.preprocessor = ehr::Preprocessor::from_json(header.at("preprocessor"));
  if (!header.at("calibration").is_null()) {
    ckpt.calibration = analytics::CalibrationArtifact::from_json(header["calibration"]);
  }

  const auto n_weights = in.le<std::uint64_t>();
  std::uint64_t consumed = 0;
  for (const auto& p : header.at("params")) {
    auto shape = p.at("shape").get<num::Shape>();
    const std::size_t n = num::numel(shape);
    if (consumed + n > n_weights) throw DataError("checkpoint: weight count mismatch");
    std::vector<double> data(n);
    for (auto& x : data) x = std::bit_cast<double>(in.le<std::uint64_t>());
    consumed += n;
    ckpt.model.params.add(p.at("name").get<std::string>(), num::Tensor(std::move(shape), std::move(data)));
  }
  if (consumed != n_weights || !in.done()) throw DataError("checkpoint: weight count mismatch");

  // Shapes must be exactly what this build would create for the schema/hyper.
  const Model expected = zero_model(ckpt.model.schema, ckpt.model.hyper);
  if (expected.params.names() != ckpt.model.params.names()) {
    throw DataError("checkpoint: parameter layout does not match this build");
  }
  for (std::size_t i = 0; i < expected.params.size(); ++i) {
    if (expected.params[i].shape() != ckpt.model.params[i].shape()) {
      throw DataError("checkpoint: parameter " + expected.params.name(i) + " has shape " +
                      num::to_string(ckpt.model.params[i].shape()) + ", expected " +
                      num::to_string(expected.params[i].shape()));
    }
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("checkpoint not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

std::string checkpoint_hash(const Checkpoint& ckpt) { return sha256_hex(serialize_checkpoint(ckpt)); }

}  // namespace aicare::model
