#pragma once

// Test-only oracles. Everything here is independent of the library's
// differentiation and cell code: plain loops over plain vectors, or numeric
// differentiation of a caller-supplied forward function.

#include <gtest/gtest.h>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hrnn/tensor.hpp"

namespace oracles {

// Central finite differences against already-populated analytic grads.
// `forward` must rebuild the computation from the params' current values and
// return the scalar loss value.
inline ::testing::AssertionResult gradients_match(
    const std::vector<hrnn::TensorPtr>& params,
    const std::function<double()>& forward, double h = 1e-5,
    double rel_tol = 1e-4, double abs_tol = 1e-7) {
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& t = *params[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t.data[i];
      t.data[i] = saved + h;
      const double f_plus = forward();
      t.data[i] = saved - h;
      const double f_minus = forward();
      t.data[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = t.grad.empty() ? 0.0 : t.grad[i];
      const double err = std::abs(analytic - numeric);
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      if (err > std::max(abs_tol, rel_tol * scale)) {
        return ::testing::AssertionFailure()
               << "param " << p << " element " << i << ": analytic " << analytic
               << " vs numeric " << numeric << " (err " << err << ")";
      }
    }
  }
  return ::testing::AssertionSuccess();
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Row-major [rows x cols] * vector.
inline std::vector<double> matvec(const std::vector<double>& m,
                                  const std::vector<double>& v, std::size_t rows,
                                  std::size_t cols) {
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i] += m[i * cols + j] * v[j];
  }
  return out;
}

// h' = tanh(U h + W_x x + b)
inline std::vector<double> rnn_step(const std::vector<double>& x,
                                    const std::vector<double>& h,
                                    const std::vector<double>& U,
                                    const std::vector<double>& W_x,
                                    const std::vector<double>& b, std::size_t H,
                                    std::size_t D) {
  const auto uh = matvec(U, h, H, H);
  const auto wx = matvec(W_x, x, H, D);
  std::vector<double> out(H);
  for (std::size_t i = 0; i < H; ++i) out[i] = std::tanh(uh[i] + wx[i] + b[i]);
  return out;
}

struct LstmOracleParams {
  std::vector<double> W_xi, W_hi, W_ci, b_i;
  std::vector<double> W_xf, W_hf, W_cf, b_f;
  std::vector<double> W_xc, W_hc, b_c;
  std::vector<double> W_xo, W_ho, W_co, b_o;
};

// i = sigma(W_xi x + W_hi h + W_ci c + b_i)
// f = sigma(W_xf x + W_hf h + W_cf c + b_f)
// c' = f.c + i.tanh(W_xc x + W_hc h + b_c)
// o = sigma(W_xo x + W_ho h + W_co c' + b_o)   <- new cell state
// h' = o.tanh(c')
inline void lstm_step(const std::vector<double>& x, std::vector<double>& h,
                      std::vector<double>& c, const LstmOracleParams& p,
                      std::size_t H, std::size_t D) {
  const auto xi = matvec(p.W_xi, x, H, D), hi = matvec(p.W_hi, h, H, H),
             ci = matvec(p.W_ci, c, H, H);
  const auto xf = matvec(p.W_xf, x, H, D), hf = matvec(p.W_hf, h, H, H),
             cf = matvec(p.W_cf, c, H, H);
  const auto xc = matvec(p.W_xc, x, H, D), hc = matvec(p.W_hc, h, H, H);
  std::vector<double> i_gate(H), f_gate(H), c_new(H);
  for (std::size_t k = 0; k < H; ++k) {
    i_gate[k] = sigmoid(xi[k] + hi[k] + ci[k] + p.b_i[k]);
    f_gate[k] = sigmoid(xf[k] + hf[k] + cf[k] + p.b_f[k]);
    c_new[k] = f_gate[k] * c[k] + i_gate[k] * std::tanh(xc[k] + hc[k] + p.b_c[k]);
  }
  const auto xo = matvec(p.W_xo, x, H, D), ho = matvec(p.W_ho, h, H, H),
             co = matvec(p.W_co, c_new, H, H);
  for (std::size_t k = 0; k < H; ++k) {
    const double o_gate = sigmoid(xo[k] + ho[k] + co[k] + p.b_o[k]);
    h[k] = o_gate * std::tanh(c_new[k]);
  }
  c = c_new;
}

struct GruOracleParams {
  std::vector<double> W_z, U_z, W_r, U_r, W_h, U;
};

// z = sigma(W_z x + U_z h); r = sigma(W_r x + U_r h)
// hc = tanh(W_h x + U (r.h)); h' = (1-z).h + z.hc
inline std::vector<double> gru_step(const std::vector<double>& x,
                                    const std::vector<double>& h,
                                    const GruOracleParams& p, std::size_t H,
                                    std::size_t D) {
  const auto wz = matvec(p.W_z, x, H, D), uz = matvec(p.U_z, h, H, H);
  const auto wr = matvec(p.W_r, x, H, D), ur = matvec(p.U_r, h, H, H);
  const auto wh = matvec(p.W_h, x, H, D);
  std::vector<double> z(H), r(H), rh(H);
  for (std::size_t k = 0; k < H; ++k) {
    z[k] = sigmoid(wz[k] + uz[k]);
    r[k] = sigmoid(wr[k] + ur[k]);
  }
  for (std::size_t k = 0; k < H; ++k) rh[k] = r[k] * h[k];
  const auto urh = matvec(p.U, rh, H, H);
  std::vector<double> out(H);
  for (std::size_t k = 0; k < H; ++k) {
    const double hc = std::tanh(wh[k] + urh[k]);
    out[k] = (1.0 - z[k]) * h[k] + z[k] * hc;
  }
  return out;
}

struct AdamOracleState {
  std::vector<double> m, v;
  std::size_t t = 0;
};

// m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2
// theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step(std::vector<double>& theta, const std::vector<double>& g,
                      AdamOracleState& s, double lr, double b1, double b2,
                      double eps) {
  if (s.m.empty()) {
    s.m.assign(theta.size(), 0.0);
    s.v.assign(theta.size(), 0.0);
  }
  s.t += 1;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    s.m[i] = b1 * s.m[i] + (1.0 - b1) * g[i];
    s.v[i] = b2 * s.v[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

// Fraction of (positive, negative) pairs ranked correctly, ties as 1/2.
inline double brute_force_auc(const std::vector<double>& probs,
                              const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (probs[i] > probs[j]) wins += 1.0;
      else if (probs[i] == probs[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace oracles
