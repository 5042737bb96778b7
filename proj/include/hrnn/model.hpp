#pragma once

// End-to-end classifier: embedding layer -> dropout -> bidirectional
// recurrence -> dropout -> linear -> sigmoid, trained with mini-batch Adam on
// binary cross-entropy.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hrnn/embedding.hpp"
#include "hrnn/errors.hpp"
#include "hrnn/recurrent.hpp"
#include "hrnn/rng.hpp"
#include "hrnn/tensor.hpp"
#include "hrnn/text.hpp"

namespace hrnn {

struct ModelConfig {
  CellKind arch = CellKind::lstm;
  FeatureMode features = FeatureMode::ce_we;
  std::size_t hidden = 128;
  std::size_t char_dim = 16;
  std::size_t char_channels = 32;  // three conv layers, all this wide
  std::size_t kernel = 3;
  double dropout = 0.3;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 10;
  std::uint64_t seed = 42;
  bool fine_tune_words = false;
  bool diagonal_peepholes = false;
  std::size_t word_dim = 300;  // width of a synthesized table when none is loaded
  double grad_clip = 5.0;
  std::size_t patience = 0;  // early-stopping patience; 0 disables
  double val_fraction = 0.1;

  void validate() const {
    if (hidden == 0) throw config_error("hidden size must be positive");
    if (char_dim == 0) throw config_error("char_dim must be positive");
    if (char_channels == 0) throw config_error("char_channels must be positive");
    if (kernel == 0 || kernel % 2 == 0) throw config_error("kernel must be odd");
    if (dropout < 0.0 || dropout >= 1.0) {
      throw config_error("dropout must lie in [0, 1)");
    }
    if (batch_size == 0) throw config_error("batch_size must be positive");
    if (learning_rate <= 0.0) throw config_error("learning_rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
      throw config_error("adam betas must lie in [0, 1)");
    }
    if (epsilon <= 0.0) throw config_error("epsilon must be positive");
    if (epochs == 0) throw config_error("epochs must be positive");
    if (word_dim == 0) throw config_error("word_dim must be positive");
    if (grad_clip <= 0.0) throw config_error("grad_clip must be positive");
    if (patience > 0 && (val_fraction <= 0.0 || val_fraction >= 1.0)) {
      throw config_error("val_fraction must lie in (0, 1) when patience is set");
    }
  }
};

// --- config <-> text ---------------------------------------------------------
// One `key = value` per line; shared by the checkpoint container and the CLI
// configuration file, so both speak the same vocabulary of keys.

namespace detail {
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double_value(const std::string& value, const std::string& where) {
  double out;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw config_error(where + ": expected a number, got '" + value + "'");
  }
  return out;
}

inline std::uint64_t parse_uint_value(const std::string& value, const std::string& where) {
  std::uint64_t out;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw config_error(where + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

inline bool parse_bool_value(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw config_error(where + ": expected true or false, got '" + value + "'");
}
}  // namespace detail

inline std::string config_to_text(const ModelConfig& c) {
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  line("arch", to_string(c.arch));
  line("features", to_string(c.features));
  line("hidden", std::to_string(c.hidden));
  line("char_dim", std::to_string(c.char_dim));
  line("char_channels", std::to_string(c.char_channels));
  line("kernel", std::to_string(c.kernel));
  line("dropout", detail::format_double(c.dropout));
  line("batch_size", std::to_string(c.batch_size));
  line("learning_rate", detail::format_double(c.learning_rate));
  line("beta1", detail::format_double(c.beta1));
  line("beta2", detail::format_double(c.beta2));
  line("epsilon", detail::format_double(c.epsilon));
  line("epochs", std::to_string(c.epochs));
  line("seed", std::to_string(c.seed));
  line("fine_tune_words", c.fine_tune_words ? "true" : "false");
  line("diagonal_peepholes", c.diagonal_peepholes ? "true" : "false");
  line("word_dim", std::to_string(c.word_dim));
  line("grad_clip", detail::format_double(c.grad_clip));
  line("patience", std::to_string(c.patience));
  line("val_fraction", detail::format_double(c.val_fraction));
  return out;
}

// Applies one key/value pair; `where` names the source (file:line) in errors.
// Unknown keys are fatal: silent typos would otherwise train the wrong model.
inline void apply_config_entry(ModelConfig& c, const std::string& key,
                               const std::string& value, const std::string& where) {
  if (key == "arch") c.arch = parse_cell_kind(value);
  else if (key == "features") c.features = parse_feature_mode(value);
  else if (key == "hidden") c.hidden = detail::parse_uint_value(value, where);
  else if (key == "char_dim") c.char_dim = detail::parse_uint_value(value, where);
  else if (key == "char_channels") c.char_channels = detail::parse_uint_value(value, where);
  else if (key == "kernel") c.kernel = detail::parse_uint_value(value, where);
  else if (key == "dropout") {
    c.dropout = detail::parse_double_value(value, where);
    if (c.dropout < 0.0 || c.dropout >= 1.0) {
      throw config_error(where + ": dropout " + value + " outside [0, 1)");
    }
  } else if (key == "batch_size") c.batch_size = detail::parse_uint_value(value, where);
  else if (key == "learning_rate") c.learning_rate = detail::parse_double_value(value, where);
  else if (key == "beta1") c.beta1 = detail::parse_double_value(value, where);
  else if (key == "beta2") c.beta2 = detail::parse_double_value(value, where);
  else if (key == "epsilon") c.epsilon = detail::parse_double_value(value, where);
  else if (key == "epochs") c.epochs = detail::parse_uint_value(value, where);
  else if (key == "seed") c.seed = detail::parse_uint_value(value, where);
  else if (key == "fine_tune_words") c.fine_tune_words = detail::parse_bool_value(value, where);
  else if (key == "diagonal_peepholes") c.diagonal_peepholes = detail::parse_bool_value(value, where);
  else if (key == "word_dim") c.word_dim = detail::parse_uint_value(value, where);
  else if (key == "grad_clip") c.grad_clip = detail::parse_double_value(value, where);
  else if (key == "patience") c.patience = detail::parse_uint_value(value, where);
  else if (key == "val_fraction") c.val_fraction = detail::parse_double_value(value, where);
  else throw config_error(where + ": unknown configuration key '" + key + "'");
}

// --- parameters ---------------------------------------------------------------

struct ModelParams {
  EmbeddingLayerParams embedding;
  CellParams fwd_cell;
  CellParams bwd_cell;
  TensorPtr out_weight;  // [1 x 2H]
  TensorPtr out_bias;    // [1]
};

namespace detail {
inline void append_cell_entries(const std::string& prefix, const CellParams& cell,
                                std::vector<std::pair<std::string, TensorPtr>>& out) {
  if (const auto* r = std::get_if<RnnCellParams>(&cell)) {
    out.emplace_back(prefix + ".U", r->U);
    out.emplace_back(prefix + ".W_x", r->W_x);
    out.emplace_back(prefix + ".b", r->b);
  } else if (const auto* g = std::get_if<GruCellParams>(&cell)) {
    out.emplace_back(prefix + ".W_z", g->W_z);
    out.emplace_back(prefix + ".U_z", g->U_z);
    out.emplace_back(prefix + ".W_r", g->W_r);
    out.emplace_back(prefix + ".U_r", g->U_r);
    out.emplace_back(prefix + ".W_h", g->W_h);
    out.emplace_back(prefix + ".U", g->U);
  } else {
    const auto& l = std::get<LstmCellParams>(cell);
    out.emplace_back(prefix + ".W_xi", l.W_xi);
    out.emplace_back(prefix + ".W_hi", l.W_hi);
    out.emplace_back(prefix + ".W_ci", l.W_ci);
    out.emplace_back(prefix + ".b_i", l.b_i);
    out.emplace_back(prefix + ".W_xf", l.W_xf);
    out.emplace_back(prefix + ".W_hf", l.W_hf);
    out.emplace_back(prefix + ".W_cf", l.W_cf);
    out.emplace_back(prefix + ".b_f", l.b_f);
    out.emplace_back(prefix + ".W_xc", l.W_xc);
    out.emplace_back(prefix + ".W_hc", l.W_hc);
    out.emplace_back(prefix + ".b_c", l.b_c);
    out.emplace_back(prefix + ".W_xo", l.W_xo);
    out.emplace_back(prefix + ".W_ho", l.W_ho);
    out.emplace_back(prefix + ".W_co", l.W_co);
    out.emplace_back(prefix + ".b_o", l.b_o);
  }
}
}  // namespace detail

// Every tensor of the model in a fixed order, the frozen word table included.
inline std::vector<std::pair<std::string, TensorPtr>> named_tensors(
    const ModelParams& params) {
  std::vector<std::pair<std::string, TensorPtr>> out;
  if (params.embedding.char_cnn.char_embed) {
    out.emplace_back("embedding.char_embed", params.embedding.char_cnn.char_embed);
    for (std::size_t i = 0; i < params.embedding.char_cnn.layers.size(); ++i) {
      const auto& layer = params.embedding.char_cnn.layers[i];
      out.emplace_back("embedding.conv" + std::to_string(i) + ".weight", layer.weight);
      out.emplace_back("embedding.conv" + std::to_string(i) + ".bias", layer.bias);
    }
  }
  if (params.embedding.word_matrix) {
    out.emplace_back("embedding.word_matrix", params.embedding.word_matrix);
  }
  detail::append_cell_entries("fwd", params.fwd_cell, out);
  detail::append_cell_entries("bwd", params.bwd_cell, out);
  out.emplace_back("out.weight", params.out_weight);
  out.emplace_back("out.bias", params.out_bias);
  return out;
}

inline std::vector<std::pair<std::string, TensorPtr>> trainable_tensors(
    const ModelParams& params) {
  auto all = named_tensors(params);
  std::erase_if(all, [](const auto& entry) { return !entry.second->requires_grad; });
  return all;
}

inline CellParams init_cell(CellKind kind, std::size_t hidden, std::size_t input,
                            bool diagonal_peepholes, Rng& rng) {
  switch (kind) {
    case CellKind::rnn: return init_rnn_cell(hidden, input, rng);
    case CellKind::gru: return init_gru_cell(hidden, input, rng);
    default: return init_lstm_cell(hidden, input, diagonal_peepholes, rng);
  }
}

// Builds all parameters for a vocabulary. `table` may be null in ce-only mode.
inline ModelParams init_model(const ModelConfig& config, const Vocabulary& vocab,
                              const EmbeddingTable* table) {
  config.validate();
  ModelParams params;
  Rng rng(mix_seed(config.seed, 0));

  if (config.features != FeatureMode::we) {
    params.embedding.char_cnn = init_char_cnn(
        vocab.char_count(), config.char_dim, config.kernel,
        {config.char_channels, config.char_channels, config.char_channels}, rng);
  }
  if (config.features != FeatureMode::ce) {
    if (table == nullptr) {
      throw config_error("feature mode '" + to_string(config.features) +
                         "' requires a word-embedding table");
    }
    params.embedding.word_matrix =
        build_word_matrix(vocab, *table, config.fine_tune_words);
    params.embedding.fine_tune_words = config.fine_tune_words;
  }

  const std::size_t width = embedding_width(params.embedding, config.features);
  params.fwd_cell =
      init_cell(config.arch, config.hidden, width, config.diagonal_peepholes, rng);
  params.bwd_cell =
      init_cell(config.arch, config.hidden, width, config.diagonal_peepholes, rng);

  params.out_weight = make_tensor({1, 2 * config.hidden}, real_t(0), true);
  init_uniform(*params.out_weight, 2 * config.hidden, 1, rng);
  params.out_bias = make_tensor({1}, real_t(0), true);
  return params;
}

// --- forward pass and loss ----------------------------------------------------

// Returns per-example clickbait probabilities, shape [B], all in (0, 1).
inline TensorPtr forward_headline(Tape& tape, const EncodedBatch& batch,
                                  const ModelParams& params, const ModelConfig& config,
                                  RunMode mode, Rng& rng) {
  const std::size_t b = batch.batch, t_len = batch.max_tokens;
  auto embedded = embed_tokens(tape, batch, params.embedding, config.features);
  auto flat = tape.reshape(embedded, {b * t_len, embedded->shape[2]});
  flat = apply_dropout(tape, flat, config.dropout, mode, rng);

  std::vector<TensorPtr> steps;
  steps.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    std::vector<std::size_t> rows(b);
    for (std::size_t i = 0; i < b; ++i) rows[i] = i * t_len + t;
    steps.push_back(tape.gather_rows(flat, std::move(rows)));
  }

  auto repr = run_bidirectional(tape, steps, batch.word_lengths, params.fwd_cell,
                                params.bwd_cell);
  repr = apply_dropout(tape, repr, config.dropout, mode, rng);
  auto logits =
      tape.add_row_bias(tape.matmul(repr, params.out_weight, false, true),
                        params.out_bias);
  return tape.reshape(tape.sigmoid(logits), {b});
}

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross-entropy, with probabilities clamped away from 0 and 1 so
// the loss stays finite. Recorded on the tape as a single fused op.
inline TensorPtr bce_loss(Tape& tape, const TensorPtr& probs,
                          const std::vector<int>& labels) {
  if (probs->size() != labels.size()) {
    throw shape_error("bce_loss: " + std::to_string(probs->size()) +
                      " probabilities vs " + std::to_string(labels.size()) +
                      " labels");
  }
  const std::size_t n = labels.size();
  auto out = make_tensor({std::size_t(1)});
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(static_cast<double>(probs->data[i]), kProbClamp,
                                1.0 - kProbClamp);
    total += labels[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  out->data[0] = static_cast<real_t>(total / static_cast<double>(n));
  if (probs->requires_grad) {
    out->requires_grad = true;
    tape.record(out, [probs, out, labels, n]() {
      probs->ensure_grad();
      const double g = out->grad[0] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs->data[i];
        if (p <= kProbClamp || p >= 1.0 - kProbClamp) continue;  // clamped flat
        const double d = labels[i] ? -1.0 / p : 1.0 / (1.0 - p);
        probs->grad[i] += static_cast<real_t>(g * d);
      }
    });
  }
  return out;
}

// --- optimization ---------------------------------------------------------

struct AdamState {
  struct Slot {
    std::vector<real_t> m, v;
  };
  std::vector<Slot> slots;
  std::size_t step = 0;
};

// Standard bias-corrected update; missing grads count as zero. Non-finite
// gradients abort, naming the parameter.
inline void adam_update(const std::vector<std::pair<std::string, TensorPtr>>& params,
                        AdamState& state, double lr, double beta1, double beta2,
                        double epsilon) {
  if (state.slots.empty()) state.slots.resize(params.size());
  if (state.slots.size() != params.size()) {
    throw config_error("adam_update: optimizer state tracks " +
                       std::to_string(state.slots.size()) + " parameters, got " +
                       std::to_string(params.size()));
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& tensor = *params[p].second;
    auto& slot = state.slots[p];
    if (slot.m.empty()) {
      slot.m.assign(tensor.size(), real_t(0));
      slot.v.assign(tensor.size(), real_t(0));
    }
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double g = tensor.grad.empty() ? 0.0 : tensor.grad[i];
      if (!std::isfinite(g)) {
        throw numeric_error("non-finite gradient in parameter '" + params[p].first +
                            "'");
      }
      slot.m[i] = static_cast<real_t>(beta1 * slot.m[i] + (1.0 - beta1) * g);
      slot.v[i] = static_cast<real_t>(beta2 * slot.v[i] + (1.0 - beta2) * g * g);
      const double m_hat = slot.m[i] / c1;
      const double v_hat = slot.v[i] / c2;
      tensor.data[i] -= static_cast<real_t>(lr * m_hat / (std::sqrt(v_hat) + epsilon));
    }
  }
}

inline void zero_gradients(const std::vector<std::pair<std::string, TensorPtr>>& params) {
  for (const auto& [name, tensor] : params) tensor->zero_grad();
}

// Scales all gradients so their global norm does not exceed max_norm.
// Returns the pre-clip norm.
inline double clip_gradients(
    const std::vector<std::pair<std::string, TensorPtr>>& params, double max_norm) {
  double sum_sq = 0.0;
  for (const auto& [name, tensor] : params) {
    for (const auto g : tensor->grad) sum_sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sum_sq);
  if (norm > max_norm && norm > 0.0) {
    const real_t scale = static_cast<real_t>(max_norm / norm);
    for (const auto& [name, tensor] : params) {
      for (auto& g : tensor->grad) g *= scale;
    }
  }
  return norm;
}

// --- training and prediction ------------------------------------------------

struct TrainResult {
  Vocabulary vocab;
  ModelParams params;
  std::vector<double> epoch_losses;  // mean per-example training loss
  std::size_t epochs_run = 0;
};

namespace detail {
inline std::vector<real_t> run_probabilities(
    const std::vector<const HeadlineExample*>& examples, const Vocabulary& vocab,
    const ModelParams& params, const ModelConfig& config) {
  std::vector<real_t> probs;
  probs.reserve(examples.size());
  Rng unused(0);
  for (std::size_t start = 0; start < examples.size(); start += config.batch_size) {
    const std::size_t end = std::min(examples.size(), start + config.batch_size);
    std::vector<const HeadlineExample*> chunk(examples.begin() + start,
                                              examples.begin() + end);
    auto batch = encode_batch(chunk, vocab);
    Tape tape;
    auto p = forward_headline(tape, batch, params, config, RunMode::eval, unused);
    probs.insert(probs.end(), p->data.begin(), p->data.end());
  }
  return probs;
}

inline std::vector<std::vector<real_t>> snapshot_tensors(
    const std::vector<std::pair<std::string, TensorPtr>>& params) {
  std::vector<std::vector<real_t>> data;
  data.reserve(params.size());
  for (const auto& [name, tensor] : params) data.push_back(tensor->data);
  return data;
}

inline void restore_tensors(const std::vector<std::pair<std::string, TensorPtr>>& params,
                            const std::vector<std::vector<real_t>>& data) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].second->data = data[i];
}
}  // namespace detail

// Shuffles each epoch with a seeded stream, trains on batches of
// config.batch_size (the final partial batch included), and logs the mean
// per-example loss per epoch. With patience > 0, a val_fraction split is held
// out and the best-validation parameters are restored on stopping.
inline TrainResult train(const std::vector<HeadlineExample>& data,
                         const ModelConfig& config, const EmbeddingTable* table,
                         std::ostream* progress = nullptr) {
  config.validate();
  if (data.empty()) throw config_error("train: empty dataset");

  TrainResult result;
  result.vocab = build_vocab(data);
  result.params = init_model(config, result.vocab, table);
  auto trainable = trainable_tensors(result.params);

  std::vector<std::size_t> indices(data.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

  std::vector<std::size_t> val_indices;
  if (config.patience > 0) {
    Rng split_rng(mix_seed(config.seed, 2));
    split_rng.shuffle(indices);
    std::size_t val_n = static_cast<std::size_t>(
        std::round(config.val_fraction * static_cast<double>(data.size())));
    val_n = std::max<std::size_t>(1, std::min(val_n, data.size() - 1));
    val_indices.assign(indices.end() - val_n, indices.end());
    indices.resize(indices.size() - val_n);
  }

  Rng train_rng(mix_seed(config.seed, 1));
  AdamState adam;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::vector<real_t>> best_snapshot;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    train_rng.shuffle(indices);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < indices.size();
         start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(indices.size(), start + config.batch_size);
      std::vector<const HeadlineExample*> chunk;
      chunk.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) chunk.push_back(&data[indices[i]]);
      auto batch = encode_batch(chunk, result.vocab);

      zero_gradients(trainable);
      Tape tape;
      auto probs = forward_headline(tape, batch, result.params, config,
                                    RunMode::train, train_rng);
      auto loss = bce_loss(tape, probs, batch.labels);
      if (!std::isfinite(loss->data[0])) {
        throw numeric_error("non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index));
      }
      tape.backward(loss);
      clip_gradients(trainable, config.grad_clip);
      adam_update(trainable, adam, config.learning_rate, config.beta1, config.beta2,
                  config.epsilon);
      epoch_loss += static_cast<double>(loss->data[0]) * static_cast<double>(end - start);
    }
    epoch_loss /= static_cast<double>(indices.size());
    result.epoch_losses.push_back(epoch_loss);
    result.epochs_run = epoch;
    if (progress) {
      *progress << "epoch " << epoch << " loss " << detail::format_double(epoch_loss);
    }

    if (config.patience > 0) {
      std::vector<const HeadlineExample*> val;
      val.reserve(val_indices.size());
      for (std::size_t i : val_indices) val.push_back(&data[i]);
      auto val_batch_probs =
          detail::run_probabilities(val, result.vocab, result.params, config);
      std::vector<int> val_labels;
      val_labels.reserve(val.size());
      for (const auto* ex : val) val_labels.push_back(ex->label);
      Tape scratch;
      auto vp = make_tensor({val_batch_probs.size()}, val_batch_probs);
      const double val_loss = bce_loss(scratch, vp, val_labels)->data[0];
      if (progress) *progress << " val_loss " << detail::format_double(val_loss);
      if (val_loss < best_val) {
        best_val = val_loss;
        since_best = 0;
        best_snapshot = detail::snapshot_tensors(trainable);
      } else if (++since_best > config.patience) {
        if (progress) *progress << " (early stop)\n";
        break;
      }
    }
    if (progress) *progress << '\n';
  }
  // with a validation split, the returned model is the best one seen
  if (!best_snapshot.empty()) detail::restore_tensors(trainable, best_snapshot);
  return result;
}

struct Prediction {
  bool ok = false;
  int label = 0;
  real_t probability = real_t(0);
  std::string error;
};

// Eval-mode, order-preserving classification of raw strings. Headlines that
// tokenize to nothing are reported per item rather than failing the batch.
inline std::vector<Prediction> predict(const std::vector<std::string>& texts,
                                       const Vocabulary& vocab,
                                       const ModelParams& params,
                                       const ModelConfig& config,
                                       real_t threshold = real_t(0.5)) {
  std::vector<Prediction> out(texts.size());
  std::vector<HeadlineExample> examples;
  std::vector<std::size_t> slot;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto ex = make_example(texts[i], 0);
    if (ex.tokens.empty()) {
      out[i].error = "headline has no tokens";
      continue;
    }
    examples.push_back(std::move(ex));
    slot.push_back(i);
  }
  if (!examples.empty()) {
    std::vector<const HeadlineExample*> ptrs;
    ptrs.reserve(examples.size());
    for (const auto& ex : examples) ptrs.push_back(&ex);
    auto probs = detail::run_probabilities(ptrs, vocab, params, config);
    for (std::size_t j = 0; j < probs.size(); ++j) {
      out[slot[j]].ok = true;
      out[slot[j]].probability = probs[j];
      out[slot[j]].label = probs[j] >= threshold ? 1 : 0;
    }
  }
  return out;
}

// Eval-mode probabilities for labeled data, used by the evaluation harness.
inline std::vector<real_t> predict_probabilities(
    const std::vector<const HeadlineExample*>& examples, const Vocabulary& vocab,
    const ModelParams& params, const ModelConfig& config) {
  return detail::run_probabilities(examples, vocab, params, config);
}

}  // namespace hrnn
