#include "afeng/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "afeng/hash.hpp"

namespace afeng::nn {
namespace {

using json = nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw CheckpointError(CheckpointError::Kind::ShapeHeaderMismatch,
                            "checkpoint truncated at byte " + std::to_string(pos_));
    }
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t uint(int width) {
    const auto s = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = width; i-- > 0;) v = (v << 8) | static_cast<unsigned char>(s[static_cast<std::size_t>(i)]);
    return v;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

json config_to_json(const ModelConfig& c) {
  return {
      {"vocab_size", c.vocab_size},     {"embedding_dim", c.embedding_dim},
      {"max_len", c.max_len},           {"kernel_widths", c.kernel_widths},
      {"filter_count", c.filter_count}, {"pool_size", c.pool_size},
      {"hidden_size", c.hidden_size},   {"dense_size", c.dense_size},
      {"dropout", c.dropout},           {"max_norm", c.max_norm},
      {"layer_order", to_string(c.order)},
  };
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.kernel_widths = j.at("kernel_widths").get<std::vector<std::size_t>>();
  c.filter_count = j.at("filter_count").get<std::size_t>();
  c.pool_size = j.at("pool_size").get<std::size_t>();
  c.hidden_size = j.at("hidden_size").get<std::size_t>();
  c.dense_size = j.at("dense_size").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.max_norm = j.at("max_norm").get<double>();
  c.order = layer_order_from_string(j.at("layer_order").get<std::string>());
  return c;
}

bool same_shapes(const ModelConfig& a, const ModelConfig& b) {
  return a.vocab_size == b.vocab_size && a.embedding_dim == b.embedding_dim &&
         a.max_len == b.max_len && a.kernel_widths == b.kernel_widths &&
         a.filter_count == b.filter_count && a.pool_size == b.pool_size &&
         a.hidden_size == b.hidden_size && a.dense_size == b.dense_size && a.order == b.order;
}

[[noreturn]] void header_mismatch(const std::string& what) {
  throw CheckpointError(CheckpointError::Kind::ShapeHeaderMismatch, what);
}

}  // namespace

std::string serialize_checkpoint(const CnnLstmModel& model, const CheckpointMeta& meta) {
  json emotions = json::array();
  for (auto name : kEmotionNames) emotions.push_back(std::string(name));
  const json metadata = {
      {"emotions", emotions},
      {"config", config_to_json(model.config)},
      {"vocab_fingerprint", hex64(meta.vocab_fingerprint)},
      {"seed", meta.seed},
  };
  const std::string meta_text = metadata.dump();

  std::string out(kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u64(out, meta_text.size());
  out += meta_text;
  const auto tensors = all_tensors(model);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t->rank()));
    for (auto d : t->shape()) put_u64(out, d);
    for (double v : t->values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes, const ModelConfig* expected) {
  if (bytes.size() < kCheckpointMagic.size() ||
      bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw CheckpointError(CheckpointError::Kind::BadMagic, "not an AFENG1 checkpoint");
  }
  Reader r(bytes.substr(kCheckpointMagic.size()));
  const auto version = r.uint(4);
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::VersionMismatch,
                          "checkpoint version " + std::to_string(version) + ", expected " +
                              std::to_string(kCheckpointVersion));
  }
  const auto meta_len = r.uint(8);
  json metadata;
  ModelConfig config;
  Checkpoint ck;
  try {
    metadata = json::parse(r.take(meta_len));
    config = config_from_json(metadata.at("config"));
    const auto emotions = metadata.at("emotions").get<std::vector<std::string>>();
    if (emotions.size() != kNumEmotions) header_mismatch("emotion order mismatch");
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
      if (emotions[i] != kEmotionNames[i]) header_mismatch("emotion order mismatch");
    }
    ck.meta.vocab_fingerprint =
        std::stoull(metadata.at("vocab_fingerprint").get<std::string>(), nullptr, 16);
    ck.meta.seed = metadata.at("seed").get<std::uint64_t>();
    config.validate();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    header_mismatch(std::string("bad checkpoint metadata: ") + e.what());
  }
  if (expected && !same_shapes(config, *expected)) {
    header_mismatch("checkpoint hyperparameters do not match the expected model shape");
  }

  ck.model = zero_model(config);
  auto tensors = all_tensors(ck.model);
  if (r.uint(4) != tensors.size()) header_mismatch("tensor count mismatch");
  for (auto& [name, t] : tensors) {
    const auto name_len = r.uint(4);
    if (r.take(name_len) != name) header_mismatch("expected tensor '" + name + "'");
    const auto rank = r.uint(4);
    if (rank != t->rank()) header_mismatch("rank mismatch for '" + name + "'");
    for (std::size_t i = 0; i < rank; ++i) {
      if (r.uint(8) != t->dim(i)) header_mismatch("shape mismatch for '" + name + "'");
    }
    for (auto& v : t->values()) v = std::bit_cast<double>(r.uint(8));
  }
  if (!r.done()) header_mismatch("trailing bytes after last tensor");
  return ck;
}

void save_checkpoint(const CnnLstmModel& model, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model, meta);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointError::Kind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(CheckpointError::Kind::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::Io, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes, expected);
}

std::uint64_t checkpoint_fingerprint(const CnnLstmModel& model, const CheckpointMeta& meta) {
  return fnv1a(serialize_checkpoint(model, meta));
}

}  // namespace afeng::nn
