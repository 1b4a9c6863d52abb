#pragma once

#include <span>
#include <vector>

#include "afeng/nn/tensor.hpp"

namespace afeng::nn {

struct AdadeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
};

// Per-parameter running averages of squared gradients and squared updates.
struct AdadeltaState {
  AdadeltaConfig config;
  std::vector<Tensor> mean_sq_grad;
  std::vector<Tensor> mean_sq_update;

  AdadeltaState() = default;
  AdadeltaState(std::span<Tensor* const> params, AdadeltaConfig cfg);
};

// Applies one element-wise Adadelta update to every parameter tensor.
void adadelta_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
                   AdadeltaState& state);

// Rescales every output unit's incoming weight vector (a row of a
// [out x in] matrix) whose l2 norm exceeds max_norm to norm max_norm.
void clip_l2(Tensor& weight, double max_norm);

}  // namespace afeng::nn
