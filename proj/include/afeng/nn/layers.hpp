#pragma once

#include <span>
#include <vector>

#include "afeng/nn/tensor.hpp"

// Forward and backward kernels for the fixed layer set of the classifier.
// Backward functions accumulate (+=) into their gradient outputs.
namespace afeng::nn {

// One kernel-width group: weight [filters x width x dim], bias [filters].
struct ConvKernels {
  Tensor weight;
  Tensor bias;

  std::size_t filters() const { return weight.dim(0); }
  std::size_t width() const { return weight.dim(1); }
  std::size_t in_dim() const { return weight.dim(2); }
};

// Valid cross-correlation over the time axis: [seq x dim] -> [(seq-width+1) x filters].
Tensor conv1d_forward(const Tensor& input, const ConvKernels& k);
void conv1d_backward(const Tensor& input, const ConvKernels& k, const Tensor& d_out,
                     Tensor& d_weight, Tensor& d_bias, Tensor* d_input);

struct PoolResult {
  Tensor output;                   // [ceil(t/pool) x f]
  std::vector<std::size_t> argmax;  // input row of each output element
};

// Max over consecutive windows of `pool` rows; the last window may be short.
// Ties go to the earliest row.
PoolResult maxpool1d(const Tensor& input, std::size_t pool);
// Routes each output gradient to its argmax row of a [rows x f] input gradient.
void maxpool1d_backward(const PoolResult& pooled, const Tensor& d_out, Tensor& d_input);

void relu_inplace(Tensor& t);
// d_inout *= (pre > 0)
void relu_backward(const Tensor& pre, Tensor& d_inout);

// Gate blocks stacked in the order input, forget, candidate, output.
struct LstmParams {
  Tensor wx;  // [4H x in]
  Tensor wh;  // [4H x H]
  Tensor b;   // [4H]

  std::size_t hidden() const { return wh.dim(1); }
  std::size_t in_dim() const { return wx.dim(1); }
};

struct LstmCache {
  Tensor input;  // [T x in]
  Tensor gates;  // [T x 4H], post-activation i, f, g, o
  Tensor cell;   // [T x H]
  Tensor hidden; // [T x H]
};

double sigmoid(double x);

// Runs the recurrence from zero state over every row of `input`.
LstmCache lstm_forward(const Tensor& input, const LstmParams& p);
// `d_hidden` holds dLoss/dh_t for every step (zeros where a step is unused).
void lstm_backward(const LstmCache& cache, const LstmParams& p, const Tensor& d_hidden,
                   LstmParams& grads, Tensor* d_input);

// y = W x + b with W [out x in].
void linear_forward(const Tensor& w, const Tensor& b, std::span<const double> x,
                    std::span<double> y);
// dW += dy x^T, db += dy, dx = W^T dy (overwritten when non-empty).
void linear_backward(const Tensor& w, std::span<const double> x, std::span<const double> dy,
                     Tensor& dw, Tensor& db, std::span<double> dx);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace afeng::nn
