#pragma once

// Stacked LSTM with standard cell equations (sigmoid input/forget/output
// gates, tanh candidate) and full backpropagation through time. Layer 1's
// hidden sequence feeds layer 2; the stack's output is the final hidden
// state of the top layer. Gate blocks are packed [i | f | g | o].
//
// The input-side projections are batched across all time steps into a single
// matmul per layer; only the recurrent terms run step by step.

#include <vector>

#include "dap/nn/layers.hpp"
#include "dap/nn/matrix.hpp"

namespace dap::nn {

struct LstmLayer {
  Param Wx;  // [in x 4H]
  Param Wh;  // [H x 4H]
  Param b;   // [1 x 4H]

  LstmLayer() = default;
  LstmLayer(const std::string& name, std::size_t in, std::size_t hidden, RngStream& rng)
      : Wx(name + ".Wx", in, 4 * hidden),
        Wh(name + ".Wh", hidden, 4 * hidden),
        b(name + ".b", 1, 4 * hidden) {
    init_uniform(Wx, in, hidden, rng);
    init_uniform(Wh, hidden, hidden, rng);
    // Forget-gate bias starts at +1 so cells retain state early in training.
    for (std::size_t j = hidden; j < 2 * hidden; ++j) b.value.at(0, j) = 1.0;
  }

  std::size_t hidden() const { return Wh.value.rows(); }
  std::size_t input_dim() const { return Wx.value.rows(); }
};

// Per-layer forward cache for one sequence.
struct LstmLayerCache {
  std::vector<Matrix2D> i, f, g, o;  // gate activations per step
  std::vector<Matrix2D> c, h;        // states per step
  std::vector<Matrix2D> tanh_c;
  Matrix2D h0, c0;                   // initial state
  Matrix2D inputs_all;               // step-stacked inputs [steps*n x in]
};

namespace lstmdetail {

inline Matrix2D stack_steps(const std::vector<Matrix2D>& seq) {
  const std::size_t n = seq.front().rows();
  const std::size_t dim = seq.front().cols();
  Matrix2D all(seq.size() * n, dim);
  for (std::size_t t = 0; t < seq.size(); ++t)
    std::copy(seq[t].data(), seq[t].data() + n * dim, all.row(t * n));
  return all;
}

inline Matrix2D transpose(const Matrix2D& m) {
  Matrix2D out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* mi = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out.at(j, i) = mi[j];
  }
  return out;
}

// C = A * Bt where Bt is already transposed; vectorizable i-k-j form.
inline Matrix2D matmul_pret(const Matrix2D& a, const Matrix2D& bt) {
  check_shape(a.cols() == bt.rows(), "matmul_pret");
  Matrix2D c(a.rows(), bt.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double av = ai[p];
      const double* bp = bt.row(p);
      for (std::size_t j = 0; j < bt.cols(); ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

}  // namespace lstmdetail

struct LstmStack {
  std::vector<LstmLayer> layers;

  LstmStack() = default;
  LstmStack(const std::string& name, std::size_t input_dim, std::size_t hidden,
            std::size_t n_layers, RngStream& rng) {
    for (std::size_t l = 0; l < n_layers; ++l)
      layers.emplace_back(name + ".l" + std::to_string(l), l == 0 ? input_dim : hidden, hidden,
                          rng);
  }

  std::size_t hidden() const { return layers.front().hidden(); }

  // Forward over the whole sequence; returns the final hidden state of the
  // top layer. h0/c0 optionally set the initial state shared by all layers.
  Matrix2D forward(const std::vector<Matrix2D>& sequence, std::vector<LstmLayerCache>& caches,
                   const Matrix2D* h0 = nullptr, const Matrix2D* c0 = nullptr) const {
    check_shape(!sequence.empty(), "lstm forward: empty sequence");
    const std::size_t n = sequence.front().rows();
    const std::size_t steps = sequence.size();
    caches.assign(layers.size(), LstmLayerCache{});

    Matrix2D layer_input = lstmdetail::stack_steps(sequence);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const LstmLayer& layer = layers[l];
      const std::size_t H = layer.hidden();
      check_shape(layer_input.cols() == layer.input_dim(), "lstm layer input width");
      LstmLayerCache& cache = caches[l];
      cache.inputs_all = std::move(layer_input);
      cache.h0 = h0 ? *h0 : Matrix2D(n, H);
      cache.c0 = c0 ? *c0 : Matrix2D(n, H);

      // Input projections for every step in one pass.
      Matrix2D pre_all = matmul(cache.inputs_all, layer.Wx.value);
      add_row_vector(pre_all, layer.b.value);

      Matrix2D h_prev = cache.h0;
      Matrix2D c_prev = cache.c0;
      Matrix2D h_all(steps * n, H);  // becomes the next layer's stacked input
      for (std::size_t t = 0; t < steps; ++t) {
        const Matrix2D rec = matmul(h_prev, layer.Wh.value);
        Matrix2D gi(n, H), gf(n, H), gg(n, H), go(n, H), c_t(n, H), h_t(n, H), tc(n, H);
        for (std::size_t r = 0; r < n; ++r) {
          double* p = pre_all.row(t * n + r);
          const double* rr = rec.row(r);
          const double* cp = c_prev.row(r);
          double* pi = gi.row(r);
          double* pf = gf.row(r);
          double* pg = gg.row(r);
          double* po = go.row(r);
          double* pc = c_t.row(r);
          double* ph = h_t.row(r);
          double* pt = tc.row(r);
          for (std::size_t j = 0; j < H; ++j) {
            const double iv = 1.0 / (1.0 + std::exp(-(p[j] + rr[j])));
            const double fv = 1.0 / (1.0 + std::exp(-(p[H + j] + rr[H + j])));
            const double gv = std::tanh(p[2 * H + j] + rr[2 * H + j]);
            const double ov = 1.0 / (1.0 + std::exp(-(p[3 * H + j] + rr[3 * H + j])));
            const double cv = fv * cp[j] + iv * gv;
            const double tv = std::tanh(cv);
            pi[j] = iv;
            pf[j] = fv;
            pg[j] = gv;
            po[j] = ov;
            pc[j] = cv;
            pt[j] = tv;
            ph[j] = ov * tv;
          }
        }
        std::copy(h_t.data(), h_t.data() + n * H, h_all.row(t * n));
        cache.i.push_back(std::move(gi));
        cache.f.push_back(std::move(gf));
        cache.g.push_back(std::move(gg));
        cache.o.push_back(std::move(go));
        cache.c.push_back(c_t);
        cache.tanh_c.push_back(std::move(tc));
        cache.h.push_back(h_t);
        h_prev = std::move(h_t);
        c_prev = std::move(c_t);
      }
      layer_input = std::move(h_all);
    }
    return caches.back().h.back();
  }

  // Backward from the gradient of the top layer's final hidden state.
  // Accumulates parameter gradients; returns per-step input gradients.
  std::vector<Matrix2D> backward(const Matrix2D& d_final_h,
                                 std::vector<LstmLayerCache>& caches) {
    const std::size_t steps = caches.front().h.size();
    const std::size_t n = d_final_h.rows();

    // dh flowing into each layer from above, stacked [steps*n x H].
    Matrix2D d_from_above(steps * n, layers.back().hidden());
    std::copy(d_final_h.data(), d_final_h.data() + n * d_final_h.cols(),
              d_from_above.row((steps - 1) * n));

    for (std::size_t li = layers.size(); li-- > 0;) {
      LstmLayer& layer = layers[li];
      LstmLayerCache& cache = caches[li];
      const std::size_t H = layer.hidden();

      const Matrix2D wh_t = lstmdetail::transpose(layer.Wh.value);
      Matrix2D dpre_all(steps * n, 4 * H);
      Matrix2D dh_next(n, H);
      Matrix2D dc_next(n, H);

      for (std::size_t t = steps; t-- > 0;) {
        const Matrix2D& c_prev = t == 0 ? cache.c0 : cache.c[t - 1];
        Matrix2D dc(n, H);
        for (std::size_t r = 0; r < n; ++r) {
          const double* pi = cache.i[t].row(r);
          const double* pf = cache.f[t].row(r);
          const double* pg = cache.g[t].row(r);
          const double* po = cache.o[t].row(r);
          const double* pt = cache.tanh_c[t].row(r);
          const double* pcp = c_prev.row(r);
          const double* pda = d_from_above.row(t * n + r);
          const double* pdhn = dh_next.row(r);
          const double* pdcn = dc_next.row(r);
          double* pdpre = dpre_all.row(t * n + r);
          double* pdc = dc.row(r);
          for (std::size_t j = 0; j < H; ++j) {
            const double dhv = pda[j] + pdhn[j];
            const double dcv = pdcn[j] + dhv * po[j] * (1.0 - pt[j] * pt[j]);
            const double div = dcv * pg[j];
            const double dfv = dcv * pcp[j];
            const double dgv = dcv * pi[j];
            const double dov = dhv * pt[j];
            pdpre[j] = div * pi[j] * (1.0 - pi[j]);
            pdpre[H + j] = dfv * pf[j] * (1.0 - pf[j]);
            pdpre[2 * H + j] = dgv * (1.0 - pg[j] * pg[j]);
            pdpre[3 * H + j] = dov * po[j] * (1.0 - po[j]);
            pdc[j] = dcv * pf[j];  // flows to c_{t-1}
          }
        }
        // recurrent terms stay per step
        const Matrix2D dpre_t = rows_slice(dpre_all, t * n, n);
        const Matrix2D& h_prev = t == 0 ? cache.h0 : cache.h[t - 1];
        matmul_tn_add(layer.Wh.grad, h_prev, dpre_t);
        dh_next = lstmdetail::matmul_pret(dpre_t, wh_t);
        dc_next = std::move(dc);
      }

      // input-side terms batched over all steps
      matmul_tn_add(layer.Wx.grad, cache.inputs_all, dpre_all);
      add_col_sums(layer.b.grad, dpre_all);
      d_from_above = matmul_nt(dpre_all, layer.Wx.value);
    }

    std::vector<Matrix2D> d_inputs(steps, Matrix2D(n, layers.front().input_dim()));
    for (std::size_t t = 0; t < steps; ++t)
      std::copy(d_from_above.row(t * n), d_from_above.row(t * n) + n * d_inputs[t].cols(),
                d_inputs[t].data());
    return d_inputs;
  }

  std::vector<Param*> parameters() {
    std::vector<Param*> out;
    for (auto& l : layers) {
      out.push_back(&l.Wx);
      out.push_back(&l.Wh);
      out.push_back(&l.b);
    }
    return out;
  }

private:
  static Matrix2D rows_slice(const Matrix2D& m, std::size_t row0, std::size_t count) {
    Matrix2D out(count, m.cols());
    std::copy(m.row(row0), m.row(row0) + count * m.cols(), out.data());
    return out;
  }
};

}  // namespace dap::nn
