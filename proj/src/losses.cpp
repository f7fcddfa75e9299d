#include "losses.hpp"

#include <stdexcept>

namespace preffend {

namespace {
constexpr double kClampEps = 1e-12;
}

Tensor ce_loss(double label, const Tensor& prediction) {
  if (label != 0.0 && label != 1.0) {
    throw std::invalid_argument("ce_loss: label must be 0 or 1, got " +
                                std::to_string(label));
  }
  if (!prediction.is_scalar()) {
    throw std::invalid_argument("ce_loss: prediction must be scalar, got " +
                                prediction.shape_str());
  }
  Tensor p = clamp(prediction, kClampEps, 1.0 - kClampEps);
  Tensor nll = scale(log(p), -label);
  Tensor complement = sub(Tensor::scalar(1.0), p);
  return add(nll, scale(log(complement), -(1.0 - label)));
}

Tensor cos_loss(const Tensor& pattern_map, const Tensor& fact_map) {
  return cosine(pattern_map, fact_map);
}

Tensor reversed_loss(double label, const Tensor& swapped_prediction) {
  return ce_loss(std::abs(1.0 - label), swapped_prediction);
}

Tensor total_loss(const Tensor& cls, const Tensor& cos, const Tensor& rev,
                  double beta1, double beta2, double beta3) {
  return add(add(scale(cls, beta1), scale(cos, beta2)), scale(rev, beta3));
}

}  // namespace preffend
