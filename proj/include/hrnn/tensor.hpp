#pragma once

// Dense tensors plus a define-by-run reverse-mode differentiation tape.
//
// A Tape owns the op records of one forward pass. Ops are Tape methods: they
// compute eagerly, and when any input requires gradients they append a node
// whose closure implements the backward rule. backward(loss) walks the nodes
// in reverse, accumulating into Tensor::grad, then clears the tape.
//
// Conventions:
//  - row-major storage; batches are rows;
//  - the only broadcasts are add_row_bias (a row added to every row of a
//    matrix) and gather_rows used for row tiling;
//  - tensors are treated as immutable once produced by an op; grad is the
//    single mutable accumulator. A tape and its tensors belong to one thread;
//    parameter tensors may be shared read-only across threads for inference.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hrnn/errors.hpp"

namespace hrnn {

#ifdef HRNN_SINGLE_PRECISION
using real_t = float;  // speed mode; gradient checks require the double build
#else
using real_t = double;
#endif

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

struct Tensor {
  Shape shape;
  std::vector<real_t> data;
  bool requires_grad = false;
  std::vector<real_t> grad;  // empty until first accumulation; else data-sized

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), real_t(0));
  }
  void zero_grad() { grad.assign(data.size(), real_t(0)); }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(Shape shape, real_t fill = real_t(0),
                             bool requires_grad = false) {
  auto t = std::make_shared<Tensor>();
  t->data.assign(numel(shape), fill);
  t->shape = std::move(shape);
  t->requires_grad = requires_grad;
  return t;
}

inline TensorPtr make_tensor(Shape shape, std::vector<real_t> data,
                             bool requires_grad = false) {
  if (numel(shape) != data.size()) {
    throw shape_error("tensor: " + shape_str(shape) + " cannot hold " +
                      std::to_string(data.size()) + " values");
  }
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->data = std::move(data);
  t->requires_grad = requires_grad;
  return t;
}

namespace detail {
using EMat = Eigen::Matrix<real_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

inline void require_rank(const TensorPtr& t, std::size_t rank, const char* op) {
  if (t->rank() != rank) {
    throw shape_error(std::string(op) + ": expected rank-" + std::to_string(rank) +
                      " tensor, got " + shape_str(t->shape));
  }
}

inline void require_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
  if (a->shape != b->shape) {
    throw shape_error(std::string(op) + ": shape mismatch " + shape_str(a->shape) +
                      " vs " + shape_str(b->shape));
  }
}
}  // namespace detail

class Tape {
 public:
  // Raw extension point: appends a backward closure for an op computed by the
  // caller. The closure runs once, in reverse recording order, and may assume
  // the output's grad buffer is non-empty.
  void record(TensorPtr output, std::function<void()> backward_fn) {
    nodes_.push_back(Node{std::move(output), std::move(backward_fn)});
  }

  std::size_t size() const { return nodes_.size(); }

  // --- matrix product -------------------------------------------------------

  TensorPtr matmul(const TensorPtr& a, const TensorPtr& b,
                   bool transpose_a = false, bool transpose_b = false) {
    detail::require_rank(a, 2, "matmul");
    detail::require_rank(b, 2, "matmul");
    const std::size_t m = transpose_a ? a->shape[1] : a->shape[0];
    const std::size_t k = transpose_a ? a->shape[0] : a->shape[1];
    const std::size_t kb = transpose_b ? b->shape[1] : b->shape[0];
    const std::size_t n = transpose_b ? b->shape[0] : b->shape[1];
    if (k != kb) {
      throw shape_error("matmul: inner extents differ: " + shape_str(a->shape) +
                        (transpose_a ? "^T" : "") + " vs " + shape_str(b->shape) +
                        (transpose_b ? "^T" : ""));
    }
    auto out = make_tensor({m, n});
    {
      detail::CMap A(a->data.data(), a->shape[0], a->shape[1]);
      detail::CMap B(b->data.data(), b->shape[0], b->shape[1]);
      detail::MMap C(out->data.data(), m, n);
      if (!transpose_a && !transpose_b)      C.noalias() = A * B;
      else if (transpose_a && !transpose_b)  C.noalias() = A.transpose() * B;
      else if (!transpose_a && transpose_b)  C.noalias() = A * B.transpose();
      else                                   C.noalias() = A.transpose() * B.transpose();
    }
    if (a->requires_grad || b->requires_grad) {
      out->requires_grad = true;
      record(out, [a, b, out, transpose_a, transpose_b, m, n]() {
        detail::CMap A(a->data.data(), a->shape[0], a->shape[1]);
        detail::CMap B(b->data.data(), b->shape[0], b->shape[1]);
        detail::CMap dC(out->grad.data(), m, n);
        if (a->requires_grad) {
          a->ensure_grad();
          detail::MMap dA(a->grad.data(), a->shape[0], a->shape[1]);
          if (!transpose_a) {
            if (!transpose_b) dA.noalias() += dC * B.transpose();
            else              dA.noalias() += dC * B;
          } else {
            if (!transpose_b) dA.noalias() += B * dC.transpose();
            else              dA.noalias() += B.transpose() * dC.transpose();
          }
        }
        if (b->requires_grad) {
          b->ensure_grad();
          detail::MMap dB(b->grad.data(), b->shape[0], b->shape[1]);
          if (!transpose_b) {
            if (!transpose_a) dB.noalias() += A.transpose() * dC;
            else              dB.noalias() += A * dC;
          } else {
            if (!transpose_a) dB.noalias() += dC.transpose() * A;
            else              dB.noalias() += dC.transpose() * A.transpose();
          }
        }
      });
    }
    return out;
  }

  // --- elementwise ----------------------------------------------------------

  TensorPtr sigmoid(const TensorPtr& x) {
    auto out = make_tensor(x->shape);
    for (std::size_t i = 0; i < x->size(); ++i) {
      out->data[i] = real_t(1) / (real_t(1) + std::exp(-x->data[i]));
    }
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < out->size(); ++i) {
          const real_t y = out->data[i];
          x->grad[i] += out->grad[i] * y * (real_t(1) - y);
        }
      });
    }
    return out;
  }

  TensorPtr tanh(const TensorPtr& x) {
    auto out = make_tensor(x->shape);
    for (std::size_t i = 0; i < x->size(); ++i) out->data[i] = std::tanh(x->data[i]);
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < out->size(); ++i) {
          const real_t y = out->data[i];
          x->grad[i] += out->grad[i] * (real_t(1) - y * y);
        }
      });
    }
    return out;
  }

  TensorPtr relu(const TensorPtr& x) {
    auto out = make_tensor(x->shape);
    for (std::size_t i = 0; i < x->size(); ++i) {
      out->data[i] = x->data[i] > real_t(0) ? x->data[i] : real_t(0);
    }
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < out->size(); ++i) {
          if (x->data[i] > real_t(0)) x->grad[i] += out->grad[i];
        }
      });
    }
    return out;
  }

  TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    detail::require_same_shape(a, b, "add");
    auto out = make_tensor(a->shape);
    for (std::size_t i = 0; i < a->size(); ++i) out->data[i] = a->data[i] + b->data[i];
    if (a->requires_grad || b->requires_grad) {
      out->requires_grad = true;
      record(out, [a, b, out]() {
        if (a->requires_grad) {
          a->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) a->grad[i] += out->grad[i];
        }
        if (b->requires_grad) {
          b->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) b->grad[i] += out->grad[i];
        }
      });
    }
    return out;
  }

  TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
    detail::require_same_shape(a, b, "sub");
    auto out = make_tensor(a->shape);
    for (std::size_t i = 0; i < a->size(); ++i) out->data[i] = a->data[i] - b->data[i];
    if (a->requires_grad || b->requires_grad) {
      out->requires_grad = true;
      record(out, [a, b, out]() {
        if (a->requires_grad) {
          a->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) a->grad[i] += out->grad[i];
        }
        if (b->requires_grad) {
          b->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) b->grad[i] -= out->grad[i];
        }
      });
    }
    return out;
  }

  TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    detail::require_same_shape(a, b, "mul");
    auto out = make_tensor(a->shape);
    for (std::size_t i = 0; i < a->size(); ++i) out->data[i] = a->data[i] * b->data[i];
    if (a->requires_grad || b->requires_grad) {
      out->requires_grad = true;
      record(out, [a, b, out]() {
        if (a->requires_grad) {
          a->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) {
            a->grad[i] += out->grad[i] * b->data[i];
          }
        }
        if (b->requires_grad) {
          b->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) {
            b->grad[i] += out->grad[i] * a->data[i];
          }
        }
      });
    }
    return out;
  }

  // x: [m x n], bias: [n]; adds the bias row to every row. The one broadcast.
  TensorPtr add_row_bias(const TensorPtr& x, const TensorPtr& bias) {
    detail::require_rank(x, 2, "add_row_bias");
    detail::require_rank(bias, 1, "add_row_bias");
    const std::size_t m = x->shape[0], n = x->shape[1];
    if (bias->shape[0] != n) {
      throw shape_error("add_row_bias: bias " + shape_str(bias->shape) +
                        " does not match row width of " + shape_str(x->shape));
    }
    auto out = make_tensor(x->shape);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out->data[i * n + j] = x->data[i * n + j] + bias->data[j];
      }
    }
    if (x->requires_grad || bias->requires_grad) {
      out->requires_grad = true;
      record(out, [x, bias, out, m, n]() {
        if (x->requires_grad) {
          x->ensure_grad();
          for (std::size_t i = 0; i < out->size(); ++i) x->grad[i] += out->grad[i];
        }
        if (bias->requires_grad) {
          bias->ensure_grad();
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              bias->grad[j] += out->grad[i * n + j];
            }
          }
        }
      });
    }
    return out;
  }

  // --- structure ------------------------------------------------------------

  TensorPtr concat(const std::vector<TensorPtr>& parts, std::size_t axis) {
    if (parts.empty()) throw shape_error("concat: empty part list");
    const std::size_t rank = parts[0]->rank();
    if (axis >= rank) {
      throw shape_error("concat: axis " + std::to_string(axis) +
                        " out of range for rank " + std::to_string(rank));
    }
    Shape out_shape = parts[0]->shape;
    for (std::size_t p = 1; p < parts.size(); ++p) {
      if (parts[p]->rank() != rank) {
        throw shape_error("concat: rank mismatch " + shape_str(parts[0]->shape) +
                          " vs " + shape_str(parts[p]->shape));
      }
      for (std::size_t d = 0; d < rank; ++d) {
        if (d != axis && parts[p]->shape[d] != out_shape[d]) {
          throw shape_error("concat: extent mismatch on axis " + std::to_string(d) +
                            ": " + shape_str(parts[0]->shape) + " vs " +
                            shape_str(parts[p]->shape));
        }
      }
      out_shape[axis] += parts[p]->shape[axis];
    }

    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= out_shape[d];
    for (std::size_t d = axis + 1; d < rank; ++d) inner *= out_shape[d];

    auto out = make_tensor(out_shape);
    const std::size_t out_stride = out_shape[axis] * inner;
    bool any_grad = false;
    for (std::size_t o = 0; o < outer; ++o) {
      std::size_t offset = o * out_stride;
      for (const auto& part : parts) {
        const std::size_t chunk = part->shape[axis] * inner;
        std::copy(part->data.begin() + o * chunk, part->data.begin() + (o + 1) * chunk,
                  out->data.begin() + offset);
        offset += chunk;
      }
    }
    for (const auto& part : parts) any_grad = any_grad || part->requires_grad;
    if (any_grad) {
      out->requires_grad = true;
      record(out, [parts, out, outer, inner, out_stride]() {
        for (std::size_t o = 0; o < outer; ++o) {
          std::size_t offset = o * out_stride;
          for (const auto& part : parts) {
            const std::size_t block = part->size() / outer;
            if (part->requires_grad) {
              part->ensure_grad();
              for (std::size_t i = 0; i < block; ++i) {
                part->grad[o * block + i] += out->grad[offset + i];
              }
            }
            offset += block;
          }
        }
      });
    }
    return out;
  }

  // Copies data into a new extent list with the same element count.
  TensorPtr reshape(const TensorPtr& x, Shape new_shape) {
    if (numel(new_shape) != x->size()) {
      throw shape_error("reshape: " + shape_str(x->shape) + " to " +
                        shape_str(new_shape) + " changes element count");
    }
    auto out = make_tensor(std::move(new_shape), x->data);
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < out->size(); ++i) x->grad[i] += out->grad[i];
      });
    }
    return out;
  }

  // x: [V x E]; returns the listed rows as [ids.size() x E]. Gradient is
  // scatter-added back, so repeated ids accumulate (embedding lookup, tiling).
  TensorPtr gather_rows(const TensorPtr& x, std::vector<std::size_t> ids) {
    detail::require_rank(x, 2, "gather_rows");
    const std::size_t v = x->shape[0], e = x->shape[1];
    for (std::size_t id : ids) {
      if (id >= v) {
        throw shape_error("gather_rows: row " + std::to_string(id) +
                          " out of range for " + shape_str(x->shape));
      }
    }
    auto out = make_tensor({ids.size(), e});
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::copy(x->data.begin() + ids[i] * e, x->data.begin() + (ids[i] + 1) * e,
                out->data.begin() + i * e);
    }
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out, ids = std::move(ids), e]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < ids.size(); ++i) {
          for (std::size_t j = 0; j < e; ++j) {
            x->grad[ids[i] * e + j] += out->grad[i * e + j];
          }
        }
      });
    }
    return out;
  }

  // --- pooling and convolution ----------------------------------------------

  // x: [T x F]; per-feature maximum over the first valid_len rows. Gradient
  // goes to exactly one row per feature; ties take the lowest index.
  TensorPtr max_over_time(const TensorPtr& x, std::size_t valid_len) {
    detail::require_rank(x, 2, "max_over_time");
    const std::size_t t = x->shape[0], f = x->shape[1];
    if (valid_len == 0 || valid_len > t) {
      throw shape_error("max_over_time: valid_len " + std::to_string(valid_len) +
                        " outside [1, " + std::to_string(t) + "]");
    }
    auto rows = reshape(x, {1, t, f});
    auto pooled = max_over_time_batch(rows, {valid_len});
    return reshape(pooled, {f});
  }

  // x: [N x C x F] with per-row valid lengths in [1, C].
  TensorPtr max_over_time_batch(const TensorPtr& x, std::vector<std::size_t> lengths) {
    detail::require_rank(x, 3, "max_over_time_batch");
    const std::size_t n = x->shape[0], c = x->shape[1], f = x->shape[2];
    if (lengths.size() != n) {
      throw shape_error("max_over_time_batch: " + std::to_string(lengths.size()) +
                        " lengths for " + shape_str(x->shape));
    }
    for (std::size_t len : lengths) {
      if (len == 0 || len > c) {
        throw shape_error("max_over_time_batch: length " + std::to_string(len) +
                          " outside [1, " + std::to_string(c) + "]");
      }
    }
    auto out = make_tensor({n, f});
    auto argmax = std::make_shared<std::vector<std::uint32_t>>(n * f);
    for (std::size_t i = 0; i < n; ++i) {
      const real_t* base = x->data.data() + i * c * f;
      for (std::size_t j = 0; j < f; ++j) {
        real_t best = base[j];
        std::uint32_t best_pos = 0;
        for (std::size_t pos = 1; pos < lengths[i]; ++pos) {
          const real_t v = base[pos * f + j];
          if (v > best) {
            best = v;
            best_pos = static_cast<std::uint32_t>(pos);
          }
        }
        out->data[i * f + j] = best;
        (*argmax)[i * f + j] = best_pos;
      }
    }
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out, argmax, c, f]() {
        x->ensure_grad();
        const std::size_t n = out->shape[0];
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < f; ++j) {
            const std::size_t pos = (*argmax)[i * f + j];
            x->grad[(i * c + pos) * f + j] += out->grad[i * f + j];
          }
        }
      });
    }
    return out;
  }

  // Same-padded 1-D convolution over the middle axis, masked per row:
  // positions at or beyond lengths[n] read as zero and produce zero output.
  // x: [N x C x I], w: [k x I x O] with k odd, bias: [O]; result [N x C x O].
  TensorPtr conv1d_same(const TensorPtr& x, const TensorPtr& w, const TensorPtr& bias,
                        std::vector<std::size_t> lengths) {
    detail::require_rank(x, 3, "conv1d_same");
    detail::require_rank(w, 3, "conv1d_same");
    detail::require_rank(bias, 1, "conv1d_same");
    const std::size_t n = x->shape[0], c = x->shape[1], in_ch = x->shape[2];
    const std::size_t k = w->shape[0], out_ch = w->shape[2];
    if (k % 2 == 0) {
      throw shape_error("conv1d_same: kernel width " + std::to_string(k) +
                        " must be odd");
    }
    if (w->shape[1] != in_ch) {
      throw shape_error("conv1d_same: filter " + shape_str(w->shape) +
                        " does not accept input " + shape_str(x->shape));
    }
    if (bias->shape[0] != out_ch) {
      throw shape_error("conv1d_same: bias " + shape_str(bias->shape) +
                        " does not match " + std::to_string(out_ch) + " channels");
    }
    if (lengths.size() != n) {
      throw shape_error("conv1d_same: " + std::to_string(lengths.size()) +
                        " lengths for " + shape_str(x->shape));
    }
    for (std::size_t len : lengths) {
      if (len > c) {
        throw shape_error("conv1d_same: length " + std::to_string(len) +
                          " exceeds extent " + std::to_string(c));
      }
    }
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(k / 2);
    auto out = make_tensor({n, c, out_ch});
    for (std::size_t i = 0; i < n; ++i) {
      const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(lengths[i]);
      for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
        real_t* out_row = out->data.data() + (i * c + pos) * out_ch;
        for (std::size_t oc = 0; oc < out_ch; ++oc) out_row[oc] = bias->data[oc];
        for (std::size_t d = 0; d < k; ++d) {
          const std::ptrdiff_t q = pos + static_cast<std::ptrdiff_t>(d) - half;
          if (q < 0 || q >= len) continue;
          const real_t* x_row = x->data.data() + (i * c + q) * in_ch;
          const real_t* w_row = w->data.data() + d * in_ch * out_ch;
          for (std::size_t ic = 0; ic < in_ch; ++ic) {
            const real_t xv = x_row[ic];
            const real_t* wv = w_row + ic * out_ch;
            for (std::size_t oc = 0; oc < out_ch; ++oc) out_row[oc] += xv * wv[oc];
          }
        }
      }
    }
    if (x->requires_grad || w->requires_grad || bias->requires_grad) {
      out->requires_grad = true;
      record(out, [x, w, bias, out, lengths = std::move(lengths), c, in_ch, k,
                   out_ch, half]() {
        if (x->requires_grad) x->ensure_grad();
        if (w->requires_grad) w->ensure_grad();
        if (bias->requires_grad) bias->ensure_grad();
        const std::size_t n = x->shape[0];
        for (std::size_t i = 0; i < n; ++i) {
          const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(lengths[i]);
          for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
            const real_t* g_row = out->grad.data() + (i * c + pos) * out_ch;
            if (bias->requires_grad) {
              for (std::size_t oc = 0; oc < out_ch; ++oc) bias->grad[oc] += g_row[oc];
            }
            for (std::size_t d = 0; d < k; ++d) {
              const std::ptrdiff_t q = pos + static_cast<std::ptrdiff_t>(d) - half;
              if (q < 0 || q >= len) continue;
              const real_t* x_row = x->data.data() + (i * c + q) * in_ch;
              const real_t* w_row = w->data.data() + d * in_ch * out_ch;
              for (std::size_t ic = 0; ic < in_ch; ++ic) {
                real_t acc = real_t(0);
                const real_t* wv = w_row + ic * out_ch;
                for (std::size_t oc = 0; oc < out_ch; ++oc) {
                  acc += wv[oc] * g_row[oc];
                  if (w->requires_grad) {
                    w->grad[(d * in_ch + ic) * out_ch + oc] += x_row[ic] * g_row[oc];
                  }
                }
                if (x->requires_grad) x->grad[(i * c + q) * in_ch + ic] += acc;
              }
            }
          }
        }
      });
    }
    return out;
  }

  // --- reduction and backward -----------------------------------------------

  TensorPtr sum(const TensorPtr& x) {
    auto out = make_tensor({std::size_t(1)});
    out->data[0] = std::accumulate(x->data.begin(), x->data.end(), real_t(0));
    if (x->requires_grad) {
      out->requires_grad = true;
      record(out, [x, out]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < x->size(); ++i) x->grad[i] += out->grad[0];
      });
    }
    return out;
  }

  // Accumulates d(loss)/d(leaf) into every requires_grad leaf reachable from
  // loss, then clears the tape. Grads are += accumulated: callers reset
  // parameter grads between steps. A second call on the same loss fails,
  // because the producing nodes are gone.
  void backward(const TensorPtr& loss) {
    if (loss->size() != 1) {
      throw shape_error("backward: loss must be scalar, got " + shape_str(loss->shape));
    }
    bool on_tape = false;
    for (const auto& node : nodes_) {
      if (node.output == loss) {
        on_tape = true;
        break;
      }
    }
    if (!on_tape) {
      throw shape_error("backward: loss tensor was not produced on this tape");
    }
    loss->grad.assign(1, real_t(1));
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if (it->output->grad.empty()) continue;  // dead branch
      it->backward_fn();
    }
    nodes_.clear();
  }

 private:
  struct Node {
    TensorPtr output;
    std::function<void()> backward_fn;
  };
  std::vector<Node> nodes_;
};

// Inverse of concat along `axis`: slices x into parts of the given extents.
// Plain values, not tape-recorded.
inline std::vector<TensorPtr> split(const TensorPtr& x, std::size_t axis,
                                    const std::vector<std::size_t>& sizes) {
  if (axis >= x->rank()) {
    throw shape_error("split: axis " + std::to_string(axis) + " out of range for " +
                      shape_str(x->shape));
  }
  std::size_t total = 0;
  for (std::size_t s : sizes) total += s;
  if (total != x->shape[axis]) {
    throw shape_error("split: sizes sum to " + std::to_string(total) +
                      ", extent is " + std::to_string(x->shape[axis]));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= x->shape[d];
  for (std::size_t d = axis + 1; d < x->rank(); ++d) inner *= x->shape[d];

  std::vector<TensorPtr> parts;
  parts.reserve(sizes.size());
  std::size_t start = 0;
  for (std::size_t s : sizes) {
    Shape shape = x->shape;
    shape[axis] = s;
    auto part = make_tensor(shape);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t src = (o * x->shape[axis] + start) * inner;
      std::copy(x->data.begin() + src, x->data.begin() + src + s * inner,
                part->data.begin() + o * s * inner);
    }
    parts.push_back(std::move(part));
    start += s;
  }
  return parts;
}

}  // namespace hrnn
