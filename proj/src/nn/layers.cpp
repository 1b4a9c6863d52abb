#include "afeng/nn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace afeng::nn {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

Tensor conv1d_forward(const Tensor& input, const ConvKernels& k) {
  const auto seq = input.dim(0);
  const auto dim = input.dim(1);
  const auto width = k.width();
  if (dim != k.in_dim()) {
    throw ShapeMismatch("conv input dim " + std::to_string(dim) + " != kernel dim " +
                        std::to_string(k.in_dim()));
  }
  if (seq < width) {
    throw ShapeMismatch("sequence length " + std::to_string(seq) + " shorter than kernel width " +
                        std::to_string(width));
  }
  const auto out_len = seq - width + 1;
  const auto filters = k.filters();
  const auto span = width * dim;
  Tensor out({out_len, filters});
  for (std::size_t t = 0; t < out_len; ++t) {
    // Rows t..t+width-1 are contiguous in the row-major input.
    const double* window = input.data() + t * dim;
    for (std::size_t f = 0; f < filters; ++f) {
      out.at(t, f) = k.bias[f] + dot(window, k.weight.data() + f * span, span);
    }
  }
  return out;
}

void conv1d_backward(const Tensor& input, const ConvKernels& k, const Tensor& d_out,
                     Tensor& d_weight, Tensor& d_bias, Tensor* d_input) {
  const auto dim = input.dim(1);
  const auto span = k.width() * dim;
  const auto filters = k.filters();
  for (std::size_t t = 0; t < d_out.dim(0); ++t) {
    const double* window = input.data() + t * dim;
    double* d_window = d_input ? d_input->data() + t * dim : nullptr;
    for (std::size_t f = 0; f < filters; ++f) {
      const double g = d_out.at(t, f);
      if (g == 0.0) continue;
      d_bias[f] += g;
      axpy(g, window, d_weight.data() + f * span, span);
      if (d_window) axpy(g, k.weight.data() + f * span, d_window, span);
    }
  }
}

PoolResult maxpool1d(const Tensor& input, std::size_t pool) {
  const auto rows = input.dim(0);
  const auto cols = input.dim(1);
  const auto out_rows = (rows + pool - 1) / pool;
  PoolResult r{Tensor({out_rows, cols}), std::vector<std::size_t>(out_rows * cols)};
  for (std::size_t o = 0; o < out_rows; ++o) {
    const auto begin = o * pool;
    const auto end = std::min(rows, begin + pool);
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t best = begin;
      for (std::size_t t = begin + 1; t < end; ++t) {
        if (input.at(t, c) > input.at(best, c)) best = t;
      }
      r.output.at(o, c) = input.at(best, c);
      r.argmax[o * cols + c] = best;
    }
  }
  return r;
}

void maxpool1d_backward(const PoolResult& pooled, const Tensor& d_out, Tensor& d_input) {
  const auto cols = d_out.dim(1);
  for (std::size_t o = 0; o < d_out.dim(0); ++o) {
    for (std::size_t c = 0; c < cols; ++c) {
      d_input.at(pooled.argmax[o * cols + c], c) += d_out.at(o, c);
    }
  }
}

void relu_inplace(Tensor& t) {
  for (auto& v : t.values()) v = v > 0.0 ? v : 0.0;
}

void relu_backward(const Tensor& pre, Tensor& d_inout) {
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (!(pre[i] > 0.0)) d_inout[i] = 0.0;
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LstmCache lstm_forward(const Tensor& input, const LstmParams& p) {
  const auto steps = input.dim(0);
  const auto in = input.dim(1);
  const auto h = p.hidden();
  if (steps == 0) throw ShapeMismatch("LSTM needs at least one step");
  if (in != p.in_dim()) {
    throw ShapeMismatch("LSTM input dim " + std::to_string(in) + " != " +
                        std::to_string(p.in_dim()));
  }
  LstmCache c{input, Tensor({steps, 4 * h}), Tensor({steps, h}), Tensor({steps, h})};
  std::vector<double> pre(4 * h);
  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = input.data() + t * in;
    const double* h_prev = t ? c.hidden.data() + (t - 1) * h : nullptr;
    const double* c_prev = t ? c.cell.data() + (t - 1) * h : nullptr;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double s = p.b[r] + dot(p.wx.data() + r * in, x, in);
      if (h_prev) s += dot(p.wh.data() + r * h, h_prev, h);
      pre[r] = s;
    }
    double* g = c.gates.data() + t * 4 * h;
    double* cell = c.cell.data() + t * h;
    double* hid = c.hidden.data() + t * h;
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = sigmoid(pre[j]);
      const double fg = sigmoid(pre[h + j]);
      const double cg = std::tanh(pre[2 * h + j]);
      const double og = sigmoid(pre[3 * h + j]);
      g[j] = ig;
      g[h + j] = fg;
      g[2 * h + j] = cg;
      g[3 * h + j] = og;
      cell[j] = (c_prev ? fg * c_prev[j] : 0.0) + ig * cg;
      hid[j] = og * std::tanh(cell[j]);
    }
  }
  return c;
}

void lstm_backward(const LstmCache& cache, const LstmParams& p, const Tensor& d_hidden,
                   LstmParams& grads, Tensor* d_input) {
  const auto steps = cache.input.dim(0);
  const auto in = cache.input.dim(1);
  const auto h = p.hidden();
  std::vector<double> dh_next(h, 0.0), dc_next(h, 0.0), da(4 * h), dh(h);
  for (std::size_t t = steps; t-- > 0;) {
    const double* g = cache.gates.data() + t * 4 * h;
    const double* cell = cache.cell.data() + t * h;
    const double* c_prev = t ? cache.cell.data() + (t - 1) * h : nullptr;
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = g[j], fg = g[h + j], cg = g[2 * h + j], og = g[3 * h + j];
      const double dhj = d_hidden.at(t, j) + dh_next[j];
      const double tc = std::tanh(cell[j]);
      const double dc = dhj * og * (1.0 - tc * tc) + dc_next[j];
      const double cp = c_prev ? c_prev[j] : 0.0;
      da[j] = dc * cg * ig * (1.0 - ig);
      da[h + j] = dc * cp * fg * (1.0 - fg);
      da[2 * h + j] = dc * ig * (1.0 - cg * cg);
      da[3 * h + j] = dhj * tc * og * (1.0 - og);
      dc_next[j] = dc * fg;
    }
    const double* x = cache.input.data() + t * in;
    const double* h_prev = t ? cache.hidden.data() + (t - 1) * h : nullptr;
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    double* dx = d_input ? d_input->data() + t * in : nullptr;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double a = da[r];
      if (a == 0.0) continue;
      grads.b[r] += a;
      axpy(a, x, grads.wx.data() + r * in, in);
      if (dx) axpy(a, p.wx.data() + r * in, dx, in);
      if (h_prev) {
        axpy(a, h_prev, grads.wh.data() + r * h, h);
        axpy(a, p.wh.data() + r * h, dh_next.data(), h);
      }
    }
  }
}

void linear_forward(const Tensor& w, const Tensor& b, std::span<const double> x,
                    std::span<double> y) {
  const auto in = w.dim(1);
  if (x.size() != in || y.size() != w.dim(0)) throw ShapeMismatch("linear layer shape mismatch");
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = b[r] + dot(w.data() + r * in, x.data(), in);
}

void linear_backward(const Tensor& w, std::span<const double> x, std::span<const double> dy,
                     Tensor& dw, Tensor& db, std::span<double> dx) {
  const auto in = w.dim(1);
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
  for (std::size_t r = 0; r < dy.size(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    db[r] += g;
    axpy(g, x.data(), dw.data() + r * in, in);
    if (!dx.empty()) axpy(g, w.data() + r * in, dx.data(), in);
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace afeng::nn
