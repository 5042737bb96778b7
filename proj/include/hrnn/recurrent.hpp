#pragma once

// Recurrent cells (plain RNN, LSTM with peephole connections, GRU), run
// bidirectionally over masked padded sequences, plus inverted dropout.
//
// Everything is row-batched: an input step is [B x D], a state is [B x H].
// The single-sequence entry point wraps the batched one with B = 1.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "hrnn/embedding.hpp"
#include "hrnn/errors.hpp"
#include "hrnn/rng.hpp"
#include "hrnn/tensor.hpp"

namespace hrnn {

enum class CellKind { rnn, gru, lstm };

inline std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return "rnn";
    case CellKind::gru: return "gru";
    default: return "lstm";
  }
}

inline CellKind parse_cell_kind(const std::string& s) {
  if (s == "rnn") return CellKind::rnn;
  if (s == "gru") return CellKind::gru;
  if (s == "lstm") return CellKind::lstm;
  throw config_error("unknown architecture '" + s + "' (expected rnn, gru, or lstm)");
}

struct StepState {
  TensorPtr h;           // [B x H]
  TensorPtr c = nullptr; // [B x H], LSTM only
};

// h' = tanh(U h + W_x x + b)
struct RnnCellParams {
  TensorPtr U;    // [H x H]
  TensorPtr W_x;  // [H x D]
  TensorPtr b;    // [H]
};

// i  = sigmoid(W_xi x + W_hi h + W_ci c      + b_i)
// f  = sigmoid(W_xf x + W_hf h + W_cf c      + b_f)
// c' = f . c + i . tanh(W_xc x + W_hc h + b_c)
// o  = sigmoid(W_xo x + W_ho h + W_co c'     + b_o)
// h' = o . tanh(c')
// Peephole matrices are full [H x H] by default; the diagonal convention
// stores them as [1 x H] rows applied elementwise.
struct LstmCellParams {
  TensorPtr W_xi, W_hi, W_ci, b_i;
  TensorPtr W_xf, W_hf, W_cf, b_f;
  TensorPtr W_xc, W_hc, b_c;
  TensorPtr W_xo, W_ho, W_co, b_o;
  bool diagonal_peepholes = false;
};

// z  = sigmoid(W_z x + U_z h)
// r  = sigmoid(W_r x + U_r h)
// hc = tanh(W_h x + U (r . h))
// h' = (1 - z) . h + z . hc
struct GruCellParams {
  TensorPtr W_z, U_z;  // [H x D], [H x H]
  TensorPtr W_r, U_r;
  TensorPtr W_h, U;
};

using CellParams = std::variant<RnnCellParams, GruCellParams, LstmCellParams>;

inline CellKind kind_of(const CellParams& p) {
  if (std::holds_alternative<RnnCellParams>(p)) return CellKind::rnn;
  if (std::holds_alternative<GruCellParams>(p)) return CellKind::gru;
  return CellKind::lstm;
}

inline std::size_t hidden_size(const CellParams& p) {
  if (const auto* r = std::get_if<RnnCellParams>(&p)) return r->U->shape[0];
  if (const auto* g = std::get_if<GruCellParams>(&p)) return g->U_z->shape[0];
  return std::get<LstmCellParams>(p).W_hi->shape[0];
}

inline RnnCellParams init_rnn_cell(std::size_t hidden, std::size_t input, Rng& rng) {
  RnnCellParams p;
  p.U = make_tensor({hidden, hidden}, real_t(0), true);
  p.W_x = make_tensor({hidden, input}, real_t(0), true);
  p.b = make_tensor({hidden}, real_t(0), true);
  init_uniform(*p.U, hidden, hidden, rng);
  init_uniform(*p.W_x, input, hidden, rng);
  return p;
}

inline GruCellParams init_gru_cell(std::size_t hidden, std::size_t input, Rng& rng) {
  GruCellParams p;
  for (TensorPtr* w : {&p.W_z, &p.W_r, &p.W_h}) {
    *w = make_tensor({hidden, input}, real_t(0), true);
    init_uniform(**w, input, hidden, rng);
  }
  for (TensorPtr* u : {&p.U_z, &p.U_r, &p.U}) {
    *u = make_tensor({hidden, hidden}, real_t(0), true);
    init_uniform(**u, hidden, hidden, rng);
  }
  return p;
}

inline LstmCellParams init_lstm_cell(std::size_t hidden, std::size_t input,
                                     bool diagonal_peepholes, Rng& rng) {
  LstmCellParams p;
  p.diagonal_peepholes = diagonal_peepholes;
  for (TensorPtr* w : {&p.W_xi, &p.W_xf, &p.W_xc, &p.W_xo}) {
    *w = make_tensor({hidden, input}, real_t(0), true);
    init_uniform(**w, input, hidden, rng);
  }
  for (TensorPtr* w : {&p.W_hi, &p.W_hf, &p.W_hc, &p.W_ho}) {
    *w = make_tensor({hidden, hidden}, real_t(0), true);
    init_uniform(**w, hidden, hidden, rng);
  }
  const Shape peep_shape =
      diagonal_peepholes ? Shape{1, hidden} : Shape{hidden, hidden};
  for (TensorPtr* w : {&p.W_ci, &p.W_cf, &p.W_co}) {
    *w = make_tensor(peep_shape, real_t(0), true);
    init_uniform(**w, hidden, hidden, rng);
  }
  p.b_i = make_tensor({hidden}, real_t(0), true);
  p.b_f = make_tensor({hidden}, real_t(1), true);  // open forget gates early on
  p.b_c = make_tensor({hidden}, real_t(0), true);
  p.b_o = make_tensor({hidden}, real_t(0), true);
  return p;
}

namespace detail {
// c [B x H] through a peephole weight: full matrix product, or an elementwise
// product against the [1 x H] row tiled across the batch.
inline TensorPtr peephole(Tape& tape, const TensorPtr& w, const TensorPtr& c,
                          bool diagonal) {
  if (!diagonal) return tape.matmul(c, w, false, true);
  auto tiled = tape.gather_rows(w, std::vector<std::size_t>(c->shape[0], 0));
  return tape.mul(c, tiled);
}
}  // namespace detail

inline StepState rnn_step(Tape& tape, const TensorPtr& x, const StepState& state,
                          const RnnCellParams& p) {
  auto pre = tape.add(tape.matmul(state.h, p.U, false, true),
                      tape.matmul(x, p.W_x, false, true));
  return {tape.tanh(tape.add_row_bias(pre, p.b)), nullptr};
}

inline StepState lstm_step(Tape& tape, const TensorPtr& x, const StepState& state,
                           const LstmCellParams& p) {
  if (!state.c) throw shape_error("lstm_step: state is missing the cell tensor");
  const bool diag = p.diagonal_peepholes;

  auto pre_i = tape.add(tape.add(tape.matmul(x, p.W_xi, false, true),
                                 tape.matmul(state.h, p.W_hi, false, true)),
                        detail::peephole(tape, p.W_ci, state.c, diag));
  auto i_gate = tape.sigmoid(tape.add_row_bias(pre_i, p.b_i));

  auto pre_f = tape.add(tape.add(tape.matmul(x, p.W_xf, false, true),
                                 tape.matmul(state.h, p.W_hf, false, true)),
                        detail::peephole(tape, p.W_cf, state.c, diag));
  auto f_gate = tape.sigmoid(tape.add_row_bias(pre_f, p.b_f));

  auto candidate = tape.tanh(tape.add_row_bias(
      tape.add(tape.matmul(x, p.W_xc, false, true),
               tape.matmul(state.h, p.W_hc, false, true)),
      p.b_c));
  auto c_new = tape.add(tape.mul(f_gate, state.c), tape.mul(i_gate, candidate));

  // the output gate peeks at the *new* cell state
  auto pre_o = tape.add(tape.add(tape.matmul(x, p.W_xo, false, true),
                                 tape.matmul(state.h, p.W_ho, false, true)),
                        detail::peephole(tape, p.W_co, c_new, diag));
  auto o_gate = tape.sigmoid(tape.add_row_bias(pre_o, p.b_o));

  return {tape.mul(o_gate, tape.tanh(c_new)), c_new};
}

inline StepState gru_step(Tape& tape, const TensorPtr& x, const StepState& state,
                          const GruCellParams& p) {
  auto z = tape.sigmoid(tape.add(tape.matmul(x, p.W_z, false, true),
                                 tape.matmul(state.h, p.U_z, false, true)));
  auto r = tape.sigmoid(tape.add(tape.matmul(x, p.W_r, false, true),
                                 tape.matmul(state.h, p.U_r, false, true)));
  auto candidate = tape.tanh(tape.add(tape.matmul(x, p.W_h, false, true),
                                      tape.matmul(tape.mul(r, state.h), p.U, false, true)));
  auto ones = make_tensor(z->shape, real_t(1));
  auto keep = tape.sub(ones, z);
  return {tape.add(tape.mul(keep, state.h), tape.mul(z, candidate)), nullptr};
}

inline StepState cell_step(Tape& tape, const CellParams& params, const TensorPtr& x,
                           const StepState& state) {
  return std::visit(
      [&](const auto& p) -> StepState {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RnnCellParams>) return rnn_step(tape, x, state, p);
        else if constexpr (std::is_same_v<P, GruCellParams>) return gru_step(tape, x, state, p);
        else return lstm_step(tape, x, state, p);
      },
      params);
}

inline StepState initial_state(const CellParams& params, std::size_t batch) {
  const std::size_t hidden = hidden_size(params);
  StepState s;
  s.h = make_tensor({batch, hidden});
  if (kind_of(params) == CellKind::lstm) s.c = make_tensor({batch, hidden});
  return s;
}

namespace detail {
// Keeps the previous state wherever the step is padded, so padded timesteps
// never update the recurrence.
inline StepState mask_state(Tape& tape, const StepState& fresh, const StepState& prev,
                            const std::vector<std::uint8_t>& step_mask,
                            std::size_t hidden) {
  bool all_valid = true;
  for (auto m : step_mask) all_valid = all_valid && m;
  if (all_valid) return fresh;

  const std::size_t batch = step_mask.size();
  auto take = make_tensor({batch, hidden});
  auto keep = make_tensor({batch, hidden});
  for (std::size_t i = 0; i < batch; ++i) {
    const real_t v = step_mask[i] ? real_t(1) : real_t(0);
    for (std::size_t j = 0; j < hidden; ++j) {
      take->data[i * hidden + j] = v;
      keep->data[i * hidden + j] = real_t(1) - v;
    }
  }
  StepState out;
  out.h = tape.add(tape.mul(fresh.h, take), tape.mul(prev.h, keep));
  if (fresh.c) out.c = tape.add(tape.mul(fresh.c, take), tape.mul(prev.c, keep));
  return out;
}
}  // namespace detail

// Runs a forward pass over the valid steps in order and a backward pass in
// reverse, both from zero states, and concatenates the forward state after
// the last valid step with the backward state after the first step.
// steps: T tensors of shape [B x D]; lengths: per-row valid counts, all >= 1.
// Returns [B x 2H].
inline TensorPtr run_bidirectional(Tape& tape, const std::vector<TensorPtr>& steps,
                                   const std::vector<std::size_t>& lengths,
                                   const CellParams& fwd, const CellParams& bwd) {
  if (steps.empty()) throw shape_error("run_bidirectional: no timesteps");
  const std::size_t batch = steps[0]->shape[0];
  if (lengths.size() != batch) {
    throw shape_error("run_bidirectional: " + std::to_string(lengths.size()) +
                      " lengths for batch of " + std::to_string(batch));
  }
  for (std::size_t len : lengths) {
    if (len == 0) throw shape_error("run_bidirectional: fully masked sequence");
    if (len > steps.size()) {
      throw shape_error("run_bidirectional: length " + std::to_string(len) +
                        " exceeds " + std::to_string(steps.size()) + " steps");
    }
  }
  const std::size_t hidden = hidden_size(fwd);

  std::vector<std::uint8_t> step_mask(batch);
  auto valid_at = [&](std::size_t t) {
    for (std::size_t i = 0; i < batch; ++i) step_mask[i] = t < lengths[i] ? 1 : 0;
    return step_mask;
  };

  StepState fwd_state = initial_state(fwd, batch);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    auto fresh = cell_step(tape, fwd, steps[t], fwd_state);
    fwd_state = detail::mask_state(tape, fresh, fwd_state, valid_at(t), hidden);
  }

  StepState bwd_state = initial_state(bwd, batch);
  for (std::size_t t = steps.size(); t-- > 0;) {
    auto fresh = cell_step(tape, bwd, steps[t], bwd_state);
    bwd_state = detail::mask_state(tape, fresh, bwd_state, valid_at(t), hidden);
  }

  return tape.concat({fwd_state.h, bwd_state.h}, 1);
}

// Single sequence [T x D] with valid_len leading valid rows; returns [1 x 2H].
inline TensorPtr run_bidirectional(Tape& tape, const TensorPtr& seq,
                                   std::size_t valid_len, const CellParams& fwd,
                                   const CellParams& bwd) {
  detail::require_rank(seq, 2, "run_bidirectional");
  const std::size_t t_len = seq->shape[0];
  std::vector<TensorPtr> steps;
  steps.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    steps.push_back(tape.gather_rows(seq, {t}));
  }
  return run_bidirectional(tape, steps, {valid_len}, fwd, bwd);
}

enum class RunMode { train, eval };

// Inverted dropout: training zeroes each component with probability `rate`
// and scales survivors by 1/(1-rate); evaluation is the identity.
inline TensorPtr apply_dropout(Tape& tape, const TensorPtr& x, double rate,
                               RunMode mode, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw config_error("dropout rate " + std::to_string(rate) + " outside [0, 1)");
  }
  if (mode == RunMode::eval || rate == 0.0) return x;
  auto mask = make_tensor(x->shape);
  const real_t scale = real_t(1) / static_cast<real_t>(1.0 - rate);
  for (auto& v : mask->data) v = rng.bernoulli(rate) ? real_t(0) : scale;
  return tape.mul(x, mask);
}

}  // namespace hrnn
