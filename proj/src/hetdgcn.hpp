#pragma once

#include "gazetteer.hpp"
#include "tensor.hpp"

namespace preffend {

// Constant selector tensors derived from a post's type partition. Column
// masks zero out correlations with nodes of the other types, which realizes
// the per-type column blocks of the correlation matrix without reordering
// nodes; token position i stays node i throughout.
struct TypeMasks {
  Tensor col_stylistic;  // n x n, (i,j) = 1 iff node j is stylistic
  Tensor col_entity;
  Tensor col_other;
  Tensor vec_stylistic;  // n x 1 indicator
  Tensor vec_entity;

  static TypeMasks build(const TypedPost& typed);
};

struct HetGraphState {
  Tensor node_features;  // H(l), n x d
  Tensor correlations;   // A(l), n x n, entries in [0,1]
  TypeMasks masks;
  int layer = 0;
};

// Per-layer weights: one matrix per node type plus the correlation-update
// bilinear form.
struct GraphLayerParams {
  Tensor w_stylistic;
  Tensor w_entity;
  Tensor w_other;
  Tensor w_update;
};

struct PreferenceMaps {
  Tensor pattern;  // n x 1, nonnegative, sums to 1
  Tensor fact;
  bool pattern_uniform_fallback = false;
  bool fact_uniform_fallback = false;
};

// Layer-0 state: node features are the embeddings, correlations are cosine
// similarities scaled into [0,1] with a unit diagonal. A zero-norm embedding
// row contributes cosine 0 (edge weight 0.5) and emits a warning.
HetGraphState init_graph(const Tensor& embeddings, const TypedPost& typed);

// Symmetric degree normalization D^{-1/2} A D^{-1/2}. Nodes with zero
// degree are treated as degree 1 and reported.
Tensor normalize_correlations(const Tensor& correlations);

// One heterogeneous convolution plus the blended correlation update. The
// update is symmetrized so the correlation matrix stays symmetric.
HetGraphState het_conv_layer(const HetGraphState& state,
                             const GraphLayerParams& params, double blend);

// Converts the final (unnormalized) correlation matrix into the two maps:
// row totals minus the opposing type's columns, each normalized to sum 1.
// An all-zero raw map falls back to uniform with a warning.
PreferenceMaps readout_maps(const Tensor& final_correlations, const TypedPost& typed);

PreferenceMaps uniform_maps(std::size_t n);

}  // namespace preffend
