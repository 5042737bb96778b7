#pragma once

// Versioned binary model container. Layout:
//   magic "HRNN" | u32 version | config text block | vocabularies |
//   named tensors, each as name, extents, raw little-endian doubles.
// Round-trips are bit-exact in the default double build.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hrnn/errors.hpp"
#include "hrnn/model.hpp"

namespace hrnn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian");

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[4] = {'H', 'R', 'N', 'N'};

struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  ModelParams params;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw parse_error(path + ": truncated checkpoint");
  }
  return value;
}

inline std::string read_string(std::istream& in, const std::string& path) {
  const auto len = read_pod<std::uint64_t>(in, path);
  std::string s(len, '\0');
  if (len && !in.read(s.data(), static_cast<std::streamsize>(len))) {
    throw parse_error(path + ": truncated checkpoint");
  }
  return s;
}

inline void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
  write_string(out, name);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape) write_pod<std::uint64_t>(out, e);
  for (real_t v : t.data) write_pod<double>(out, static_cast<double>(v));
}

struct RawTensor {
  Shape shape;
  std::vector<real_t> data;
};

inline RawTensor read_tensor(std::istream& in, const std::string& path) {
  RawTensor t;
  const auto rank = read_pod<std::uint32_t>(in, path);
  t.shape.resize(rank);
  for (auto& e : t.shape) e = read_pod<std::uint64_t>(in, path);
  t.data.resize(numel(t.shape));
  for (auto& v : t.data) v = static_cast<real_t>(read_pod<double>(in, path));
  return t;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const ModelConfig& config,
                            const Vocabulary& vocab, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw parse_error("cannot open checkpoint for writing: " + path);

  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_pod<std::uint32_t>(out, kCheckpointVersion);
  detail::write_string(out, config_to_text(config));

  detail::write_pod<std::uint64_t>(out, vocab.word_count());
  for (std::size_t id = 2; id < vocab.word_count(); ++id) {
    detail::write_string(out, vocab.id_to_word[id]);
  }
  detail::write_pod<std::uint64_t>(out, vocab.char_count());
  for (std::size_t id = 2; id < vocab.char_count(); ++id) {
    detail::write_pod<char>(out, vocab.id_to_char[id]);
  }

  const auto tensors = named_tensors(params);
  detail::write_pod<std::uint64_t>(out, tensors.size());
  for (const auto& [name, tensor] : tensors) detail::write_tensor(out, name, *tensor);
  if (!out) throw parse_error("write failed: " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open checkpoint: " + path);

  char magic[4];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw parse_error(path + ": not a model checkpoint (bad magic)");
  }
  const auto version = detail::read_pod<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw parse_error(path + ": checkpoint format version " + std::to_string(version) +
                      ", this build reads version " +
                      std::to_string(kCheckpointVersion));
  }

  Checkpoint ckpt;
  {
    std::istringstream config_text(detail::read_string(in, path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(config_text, line)) {
      ++line_no;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) {
        throw parse_error(path + ": malformed config entry '" + line + "'");
      }
      apply_config_entry(ckpt.config, line.substr(0, eq), line.substr(eq + 3),
                         path + ":config:" + std::to_string(line_no));
    }
  }

  const auto word_count = detail::read_pod<std::uint64_t>(in, path);
  ckpt.vocab.id_to_word = {"<pad>", "<unk>"};
  for (std::uint64_t id = 2; id < word_count; ++id) {
    auto token = detail::read_string(in, path);
    ckpt.vocab.word_to_id.emplace(token, static_cast<std::int32_t>(id));
    ckpt.vocab.id_to_word.push_back(std::move(token));
  }
  const auto char_count = detail::read_pod<std::uint64_t>(in, path);
  ckpt.vocab.id_to_char = {'\0', '\1'};
  for (std::uint64_t id = 2; id < char_count; ++id) {
    const char c = detail::read_pod<char>(in, path);
    ckpt.vocab.char_to_id.emplace(c, static_cast<std::int32_t>(id));
    ckpt.vocab.id_to_char.push_back(c);
  }

  std::map<std::string, detail::RawTensor> raw;
  const auto tensor_count = detail::read_pod<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < tensor_count; ++i) {
    auto name = detail::read_string(in, path);
    raw.emplace(std::move(name), detail::read_tensor(in, path));
  }

  // Assemble parameters with the same structure init_model would produce,
  // then fill every tensor from the payload by name.
  const auto& config = ckpt.config;
  if (config.features != FeatureMode::we) {
    Rng dummy(0);
    ckpt.params.embedding.char_cnn = init_char_cnn(
        ckpt.vocab.char_count(), config.char_dim, config.kernel,
        {config.char_channels, config.char_channels, config.char_channels}, dummy);
  }
  if (config.features != FeatureMode::ce) {
    auto it = raw.find("embedding.word_matrix");
    if (it == raw.end()) {
      throw parse_error(path + ": missing tensor 'embedding.word_matrix'");
    }
    ckpt.params.embedding.word_matrix =
        make_tensor(it->second.shape, real_t(0), config.fine_tune_words);
    ckpt.params.embedding.fine_tune_words = config.fine_tune_words;
  }
  {
    Rng dummy(0);
    const std::size_t width = embedding_width(ckpt.params.embedding, config.features);
    ckpt.params.fwd_cell = init_cell(config.arch, config.hidden, width,
                                     config.diagonal_peepholes, dummy);
    ckpt.params.bwd_cell = init_cell(config.arch, config.hidden, width,
                                     config.diagonal_peepholes, dummy);
    ckpt.params.out_weight = make_tensor({1, 2 * config.hidden}, real_t(0), true);
    ckpt.params.out_bias = make_tensor({1}, real_t(0), true);
  }

  auto expected = named_tensors(ckpt.params);
  if (expected.size() != raw.size()) {
    throw parse_error(path + ": checkpoint holds " + std::to_string(raw.size()) +
                      " tensors, model needs " + std::to_string(expected.size()));
  }
  for (auto& [name, tensor] : expected) {
    auto it = raw.find(name);
    if (it == raw.end()) throw parse_error(path + ": missing tensor '" + name + "'");
    if (it->second.shape != tensor->shape) {
      throw parse_error(path + ": tensor '" + name + "' has shape " +
                        shape_str(it->second.shape) + ", expected " +
                        shape_str(tensor->shape));
    }
    tensor->data = std::move(it->second.data);
  }
  return ckpt;
}

inline std::vector<Prediction> predict(const std::vector<std::string>& texts,
                                       const Checkpoint& ckpt,
                                       real_t threshold = real_t(0.5)) {
  return predict(texts, ckpt.vocab, ckpt.params, ckpt.config, threshold);
}

}  // namespace hrnn
