#pragma once

// Differentiable layer set: dense, sigmoid/relu/tanh, softmax with cross
// entropy, batch normalization, plus the Adam update. Every layer caches what
// its backward pass needs; backward accumulates parameter gradients and
// returns the input gradient.

#include <cmath>
#include <string>
#include <vector>

#include "dap/nn/matrix.hpp"

namespace dap::nn {

enum class Mode { train, eval };

// A named parameter block with its gradient and Adam moments.
struct Param {
  std::string name;
  Matrix2D value;
  Matrix2D grad;
  Matrix2D m;
  Matrix2D v;

  Param() = default;
  Param(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)),
        value(rows, cols),
        grad(rows, cols),
        m(rows, cols),
        v(rows, cols) {}

  void zero_grad() { grad.fill(0.0); }
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)); biases stay zero.
inline void init_uniform(Param& p, std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < p.value.size(); ++i)
    p.value.data()[i] = rng.next_uniform(-limit, limit);
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

inline Matrix2D sigmoid_forward(const Matrix2D& x) {
  Matrix2D y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = 1.0 / (1.0 + std::exp(-y.data()[i]));
  return y;
}

inline Matrix2D sigmoid_backward(const Matrix2D& y, const Matrix2D& dy) {
  check_shape(y.rows() == dy.rows() && y.cols() == dy.cols(), "sigmoid_backward");
  Matrix2D dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double s = y.data()[i];
    dx.data()[i] *= s * (1.0 - s);
  }
  return dx;
}

inline Matrix2D relu_forward(const Matrix2D& x) {
  Matrix2D y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = y.data()[i] > 0.0 ? y.data()[i] : 0.0;
  return y;
}

inline Matrix2D relu_backward(const Matrix2D& y, const Matrix2D& dy) {
  check_shape(y.rows() == dy.rows() && y.cols() == dy.cols(), "relu_backward");
  Matrix2D dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (y.data()[i] <= 0.0) dx.data()[i] = 0.0;
  return dx;
}

inline Matrix2D tanh_forward(const Matrix2D& x) {
  Matrix2D y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = std::tanh(y.data()[i]);
  return y;
}

inline Matrix2D tanh_backward(const Matrix2D& y, const Matrix2D& dy) {
  check_shape(y.rows() == dy.rows() && y.cols() == dy.cols(), "tanh_backward");
  Matrix2D dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double t = y.data()[i];
    dx.data()[i] *= 1.0 - t * t;
  }
  return dx;
}

// Row-stochastic softmax with per-row max subtraction.
inline Matrix2D softmax(const Matrix2D& logits) {
  Matrix2D y = logits;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double* row = y.row(i);
    double mx = row[0];
    for (std::size_t j = 1; j < y.cols(); ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < y.cols(); ++j) row[j] /= sum;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Dense layer: y = x W + b
// ---------------------------------------------------------------------------

struct Dense {
  Param W;  // [in x out]
  Param b;  // [1 x out]

  Dense() = default;
  Dense(const std::string& name, std::size_t in, std::size_t out, RngStream& rng)
      : W(name + ".W", in, out), b(name + ".b", 1, out) {
    init_uniform(W, in, out, rng);
  }

  std::size_t in_dim() const { return W.value.rows(); }
  std::size_t out_dim() const { return W.value.cols(); }

  Matrix2D forward(const Matrix2D& x) const {
    check_shape(x.cols() == W.value.rows(), "dense forward " + W.name);
    Matrix2D y = matmul(x, W.value);
    add_row_vector(y, b.value);
    return y;
  }

  // Accumulates dW, db; returns dx.
  Matrix2D backward(const Matrix2D& x, const Matrix2D& dy) {
    check_shape(dy.cols() == W.value.cols() && x.rows() == dy.rows(), "dense backward " + W.name);
    matmul_tn_add(W.grad, x, dy);
    add_col_sums(b.grad, dy);
    return matmul_nt(dy, W.value);
  }
};

// ---------------------------------------------------------------------------
// Batch normalization over features (columns). Train mode standardizes by
// batch statistics and updates running statistics with momentum 0.9; eval
// mode uses the running statistics.
// ---------------------------------------------------------------------------

struct BatchNorm {
  Param gamma;  // [1 x dim]
  Param beta;   // [1 x dim]
  Matrix2D running_mean;  // buffers, saved with checkpoints
  Matrix2D running_var;
  double momentum = 0.9;
  double eps = 1e-5;

  // backward cache
  Matrix2D xhat_;
  std::vector<double> inv_std_;
  Mode mode_ = Mode::train;

  BatchNorm() = default;
  BatchNorm(const std::string& name, std::size_t dim)
      : gamma(name + ".gamma", 1, dim),
        beta(name + ".beta", 1, dim),
        running_mean(1, dim),
        running_var(1, dim) {
    gamma.value.fill(1.0);
  }

  std::size_t dim() const { return gamma.value.cols(); }

  Matrix2D forward(const Matrix2D& x, Mode mode) {
    check_shape(x.cols() == dim(), "batchnorm forward");
    if (mode == Mode::train && x.rows() < 2)
      fail(Errc::batch_too_small, "batchnorm requires batch >= 2 in train mode");
    mode_ = mode;
    const std::size_t n = x.rows(), d = x.cols();
    Matrix2D y(n, d);
    xhat_ = Matrix2D(n, d);
    inv_std_.assign(d, 0.0);

    for (std::size_t j = 0; j < d; ++j) {
      double mean, var;
      if (mode == Mode::train) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += x.at(i, j);
        mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dvi = x.at(i, j) - mean;
          sq += dvi * dvi;
        }
        var = sq / static_cast<double>(n);
        running_mean.at(0, j) = momentum * running_mean.at(0, j) + (1.0 - momentum) * mean;
        running_var.at(0, j) = momentum * running_var.at(0, j) + (1.0 - momentum) * var;
      } else {
        mean = running_mean.at(0, j);
        var = running_var.at(0, j);
      }
      const double inv = 1.0 / std::sqrt(var + eps);
      inv_std_[j] = inv;
      for (std::size_t i = 0; i < n; ++i) {
        const double xh = (x.at(i, j) - mean) * inv;
        xhat_.at(i, j) = xh;
        y.at(i, j) = gamma.value.at(0, j) * xh + beta.value.at(0, j);
      }
    }
    return y;
  }

  Matrix2D backward(const Matrix2D& dy) {
    check_shape(dy.rows() == xhat_.rows() && dy.cols() == xhat_.cols(), "batchnorm backward");
    const std::size_t n = dy.rows(), d = dy.cols();
    Matrix2D dx(n, d);
    for (std::size_t j = 0; j < d; ++j) {
      const double g = gamma.value.at(0, j);
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum_dy += dy.at(i, j);
        sum_dy_xhat += dy.at(i, j) * xhat_.at(i, j);
      }
      gamma.grad.at(0, j) += sum_dy_xhat;
      beta.grad.at(0, j) += sum_dy;
      if (mode_ == Mode::eval) {
        // Running statistics are constants; the layer is affine per feature.
        for (std::size_t i = 0; i < n; ++i) dx.at(i, j) = dy.at(i, j) * g * inv_std_[j];
      } else {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          dx.at(i, j) = g * inv_std_[j] *
                        (dy.at(i, j) - inv_n * sum_dy - xhat_.at(i, j) * inv_n * sum_dy_xhat);
        }
      }
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// Softmax cross-entropy. Mean negative log-likelihood over the batch; the
// combined gradient with respect to the logits is (probs - onehot) / n.
// ---------------------------------------------------------------------------

inline double cross_entropy(const Matrix2D& probs, const std::vector<int>& labels) {
  check_shape(probs.rows() == labels.size(), "cross_entropy");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const double p = std::max(probs.at(i, static_cast<std::size_t>(labels[i])), 1e-300);
    loss -= std::log(p);
  }
  return loss / static_cast<double>(probs.rows());
}

inline Matrix2D softmax_ce_grad(const Matrix2D& probs, const std::vector<int>& labels) {
  check_shape(probs.rows() == labels.size(), "softmax_ce_grad");
  Matrix2D g = probs;
  const double inv_n = 1.0 / static_cast<double>(probs.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    g.at(i, static_cast<std::size_t>(labels[i])) -= 1.0;
    for (std::size_t j = 0; j < g.cols(); ++j) g.at(i, j) *= inv_n;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Adam. Bias-corrected moment update applied to every parameter block.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adam_step(const std::vector<Param*>& params, const AdamConfig& cfg, int t) {
  if (t < 1) fail(Errc::config, "adam_step: step index must be >= 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (Param* p : params) {
    double* w = p->value.data();
    double* g = p->grad.data();
    double* m = p->m.data();
    double* v = p->v.data();
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

inline void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

}  // namespace dap::nn
