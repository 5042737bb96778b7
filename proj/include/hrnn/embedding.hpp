#pragma once

// Embedding layer: a per-word character CNN (stacked same-padded 1-D
// convolutions with ReLU, max-pooled over character positions) concatenated
// with fixed pretrained word vectors.

#include <cstdint>
#include <string>
#include <vector>

#include "hrnn/errors.hpp"
#include "hrnn/rng.hpp"
#include "hrnn/tensor.hpp"
#include "hrnn/text.hpp"

namespace hrnn {

enum class FeatureMode { ce, we, ce_we };

inline std::string to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::ce: return "ce";
    case FeatureMode::we: return "we";
    default: return "ce+we";
  }
}

inline FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "ce") return FeatureMode::ce;
  if (s == "we") return FeatureMode::we;
  if (s == "ce+we" || s == "we+ce") return FeatureMode::ce_we;
  throw config_error("unknown feature mode '" + s + "' (expected ce, we, or ce+we)");
}

// Uniform Glorot initialization.
inline void init_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.data) v = static_cast<real_t>(rng.uniform(-limit, limit));
}

struct CharCnnParams {
  struct ConvLayer {
    TensorPtr weight;  // [k x in_ch x out_ch]
    TensorPtr bias;    // [out_ch]
  };
  TensorPtr char_embed;  // [char_count x d_c], learned during training
  std::vector<ConvLayer> layers;

  std::size_t embed_dim() const { return char_embed->shape[1]; }
  std::size_t output_dim() const { return layers.back().weight->shape[2]; }
};

inline CharCnnParams init_char_cnn(std::size_t char_count, std::size_t embed_dim,
                                   std::size_t kernel,
                                   const std::vector<std::size_t>& channels,
                                   Rng& rng) {
  if (kernel % 2 == 0) throw config_error("char cnn kernel width must be odd");
  if (channels.empty()) throw config_error("char cnn needs at least one layer");
  CharCnnParams p;
  p.char_embed = make_tensor({char_count, embed_dim}, real_t(0), true);
  init_uniform(*p.char_embed, char_count, embed_dim, rng);
  std::size_t in_ch = embed_dim;
  for (std::size_t out_ch : channels) {
    CharCnnParams::ConvLayer layer;
    layer.weight = make_tensor({kernel, in_ch, out_ch}, real_t(0), true);
    init_uniform(*layer.weight, kernel * in_ch, kernel * out_ch, rng);
    layer.bias = make_tensor({out_ch}, real_t(0), true);
    p.layers.push_back(std::move(layer));
    in_ch = out_ch;
  }
  return p;
}

// Encodes N words at once. char_ids is row-major [N x max_chars] with pad ids
// beyond each word's length; lengths may be 0 for padded word slots, which
// yield exactly-zero rows with no gradient. Output: [N x output_dim].
inline TensorPtr char_cnn_encode_batch(Tape& tape, const CharCnnParams& params,
                                       const std::vector<std::int32_t>& char_ids,
                                       const std::vector<std::size_t>& lengths,
                                       std::size_t max_chars) {
  const std::size_t n = lengths.size();
  if (char_ids.size() != n * max_chars) {
    throw shape_error("char_cnn_encode_batch: " + std::to_string(char_ids.size()) +
                      " ids for " + std::to_string(n) + "x" +
                      std::to_string(max_chars));
  }
  std::vector<std::size_t> rows(char_ids.begin(), char_ids.end());
  auto x = tape.reshape(tape.gather_rows(params.char_embed, std::move(rows)),
                        {n, max_chars, params.embed_dim()});
  for (const auto& layer : params.layers) {
    x = tape.relu(tape.conv1d_same(x, layer.weight, layer.bias, lengths));
  }
  std::vector<std::size_t> pool_lengths(n);
  for (std::size_t i = 0; i < n; ++i) pool_lengths[i] = std::max<std::size_t>(lengths[i], 1);
  return tape.max_over_time_batch(x, pool_lengths);
}

// Single-word encoding; the word must have at least one character.
inline TensorPtr char_cnn_encode(Tape& tape, const CharCnnParams& params,
                                 const std::vector<std::int32_t>& word_char_ids) {
  if (word_char_ids.empty()) {
    throw shape_error("char_cnn_encode: empty character sequence");
  }
  return char_cnn_encode_batch(tape, params, word_char_ids, {word_char_ids.size()},
                               word_char_ids.size());
}

struct EmbeddingLayerParams {
  CharCnnParams char_cnn;
  TensorPtr word_matrix;         // [word_count x word_dim]; null in ce-only mode
  bool fine_tune_words = false;  // default: word vectors stay frozen

  std::size_t word_dim() const { return word_matrix ? word_matrix->shape[1] : 0; }
};

// Dense id-indexed copy of the pretrained table. Pad, unk, and words missing
// from the table are zero rows.
inline TensorPtr build_word_matrix(const Vocabulary& vocab, const EmbeddingTable& table,
                                   bool trainable = false) {
  auto m = make_tensor({vocab.word_count(), table.dim}, real_t(0), trainable);
  for (std::size_t id = 2; id < vocab.word_count(); ++id) {
    if (const auto* row = table.find(vocab.id_to_word[id])) {
      std::copy(row->begin(), row->end(), m->data.begin() + id * table.dim);
    }
  }
  return m;
}

inline std::size_t embedding_width(const EmbeddingLayerParams& params, FeatureMode mode) {
  switch (mode) {
    case FeatureMode::ce: return params.char_cnn.output_dim();
    case FeatureMode::we: return params.word_dim();
    default: return params.word_dim() + params.char_cnn.output_dim();
  }
}

// Embeds a batch as [B x T x E]: per position the word vector, the char-CNN
// encoding, or their concatenation. Padded positions come out exactly zero
// and contribute no gradient; the word half never does (unless fine-tuning).
inline TensorPtr embed_tokens(Tape& tape, const EncodedBatch& batch,
                              const EmbeddingLayerParams& params, FeatureMode mode) {
  const std::size_t n = batch.batch * batch.max_tokens;

  TensorPtr char_half;
  if (mode != FeatureMode::we) {
    char_half = char_cnn_encode_batch(tape, params.char_cnn, batch.char_ids,
                                      batch.char_lengths, batch.max_chars);
  }

  TensorPtr word_half;
  if (mode != FeatureMode::ce) {
    if (!params.word_matrix) {
      throw config_error("embed_tokens: feature mode '" + to_string(mode) +
                         "' requires a word table");
    }
    const std::size_t dim = params.word_dim();
    const std::size_t rows = params.word_matrix->shape[0];
    if (params.fine_tune_words) {
      std::vector<std::size_t> ids(n);
      for (std::size_t i = 0; i < n; ++i) {
        ids[i] = static_cast<std::size_t>(batch.word_ids[i]);
      }
      word_half = tape.gather_rows(params.word_matrix, std::move(ids));
    } else {
      word_half = make_tensor({n, dim});
      for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<std::size_t>(batch.word_ids[i]);
        if (id >= rows) {
          throw shape_error("embed_tokens: word id " + std::to_string(id) +
                            " out of range for " +
                            shape_str(params.word_matrix->shape));
        }
        std::copy(params.word_matrix->data.begin() + id * dim,
                  params.word_matrix->data.begin() + (id + 1) * dim,
                  word_half->data.begin() + i * dim);
      }
    }
  }

  TensorPtr flat;
  if (char_half && word_half) {
    flat = tape.concat({word_half, char_half}, 1);
  } else {
    flat = char_half ? char_half : word_half;
  }
  return tape.reshape(flat, {batch.batch, batch.max_tokens, flat->shape[1]});
}

}  // namespace hrnn
