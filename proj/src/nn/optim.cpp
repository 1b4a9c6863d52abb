#include "afeng/nn/optim.hpp"

#include <cmath>

namespace afeng::nn {

AdadeltaState::AdadeltaState(std::span<Tensor* const> params, AdadeltaConfig cfg) : config(cfg) {
  for (const Tensor* p : params) {
    mean_sq_grad.emplace_back(p->shape());
    mean_sq_update.emplace_back(p->shape());
  }
}

void adadelta_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
                   AdadeltaState& state) {
  if (params.size() != grads.size() || params.size() != state.mean_sq_grad.size()) {
    throw ShapeMismatch("adadelta: parameter, gradient and state counts differ");
  }
  const double rho = state.config.rho;
  const double eps = state.config.epsilon;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    Tensor& eg2 = state.mean_sq_grad[i];
    Tensor& edx2 = state.mean_sq_update[i];
    if (!p.same_shape(g) || !p.same_shape(eg2)) {
      throw ShapeMismatch("adadelta: shape mismatch at tensor " + std::to_string(i));
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      eg2[j] = rho * eg2[j] + (1.0 - rho) * g[j] * g[j];
      const double delta = -(std::sqrt(edx2[j] + eps) / std::sqrt(eg2[j] + eps)) * g[j];
      edx2[j] = rho * edx2[j] + (1.0 - rho) * delta * delta;
      p[j] += delta;
    }
  }
}

void clip_l2(Tensor& weight, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("max_norm must be positive");
  for (std::size_t r = 0; r < weight.dim(0); ++r) {
    auto row = weight.row(r);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
      const double s = max_norm / norm;
      for (double& v : row) v *= s;
    }
  }
}

}  // namespace afeng::nn
