#include "optimizer.hpp"

#include <cmath>

namespace preffend {

AdamOptimizer::AdamOptimizer(ParamRegistry& params, double learning_rate,
                             double decay1, double decay2, double epsilon)
    : params_(params),
      learning_rate_(learning_rate),
      decay1_(decay1),
      decay2_(decay2),
      epsilon_(epsilon) {
  for (const auto& [_, tensor] : params_.items()) {
    first_moment_.emplace_back(tensor.size(), 0.0);
    second_moment_.emplace_back(tensor.size(), 0.0);
  }
}

void AdamOptimizer::step() {
  ++steps_;
  const double correction1 = 1.0 - std::pow(decay1_, steps_);
  const double correction2 = 1.0 - std::pow(decay2_, steps_);
  std::size_t param_idx = 0;
  for (const auto& [_, item] : params_.items()) {
    Tensor tensor = item;  // shallow handle onto the shared storage
    auto& m = first_moment_[param_idx];
    auto& v = second_moment_[param_idx];
    ++param_idx;
    auto values = tensor.values_mut();
    const bool has_grad = tensor.has_grad();
    std::span<const double> grad;
    if (has_grad) grad = tensor.grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = has_grad ? grad[i] : 0.0;
      m[i] = decay1_ * m[i] + (1.0 - decay1_) * g;
      v[i] = decay2_ * v[i] + (1.0 - decay2_) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

}  // namespace preffend
