#pragma once

#include "tensor.hpp"

namespace preffend {

// Binary cross-entropy -y ln p - (1-y) ln(1-p) with the prediction clamped
// to [1e-12, 1-1e-12], so the loss is finite even for p in {0, 1}.
Tensor ce_loss(double label, const Tensor& prediction);

// Cosine similarity of the two preference maps; minimized to push them apart.
Tensor cos_loss(const Tensor& pattern_map, const Tensor& fact_map);

// Cross-entropy against the reversed label |1-y|, applied to the prediction
// produced with the preference maps exchanged.
Tensor reversed_loss(double label, const Tensor& swapped_prediction);

Tensor total_loss(const Tensor& cls, const Tensor& cos, const Tensor& rev,
                  double beta1, double beta2, double beta3);

struct LossBreakdown {
  double cls = 0.0;
  double cos = 0.0;
  double rev = 0.0;
  double total = 0.0;
};

}  // namespace preffend
