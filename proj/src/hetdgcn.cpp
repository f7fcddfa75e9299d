#include "hetdgcn.hpp"

#include <stdexcept>
#include <string>

#include "logging.hpp"

namespace preffend {

TypeMasks TypeMasks::build(const TypedPost& typed) {
  const std::size_t n = typed.size();
  TypeMasks masks;
  masks.col_stylistic = Tensor::zeros(n, n);
  masks.col_entity = Tensor::zeros(n, n);
  masks.col_other = Tensor::zeros(n, n);
  masks.vec_stylistic = Tensor::zeros(n, 1);
  masks.vec_entity = Tensor::zeros(n, 1);
  auto cs = masks.col_stylistic.values_mut();
  auto ce = masks.col_entity.values_mut();
  auto co = masks.col_other.values_mut();
  auto vs = masks.vec_stylistic.values_mut();
  auto ve = masks.vec_entity.values_mut();
  for (std::size_t j = 0; j < n; ++j) {
    std::span<double> col;
    switch (typed.type_of[j]) {
      case TokenType::Stylistic: col = cs; vs[j] = 1.0; break;
      case TokenType::Entity: col = ce; ve[j] = 1.0; break;
      case TokenType::Other: col = co; break;
    }
    for (std::size_t i = 0; i < n; ++i) col[i * n + j] = 1.0;
  }
  return masks;
}

HetGraphState init_graph(const Tensor& embeddings, const TypedPost& typed) {
  const std::size_t n = embeddings.rows();
  if (n == 0 || embeddings.cols() == 0) {
    throw std::invalid_argument("init_graph: empty embedding matrix " +
                                embeddings.shape_str());
  }
  if (n != typed.size()) {
    throw std::invalid_argument("init_graph: " + std::to_string(n) +
                                " embedding rows for " + std::to_string(typed.size()) +
                                " tokens");
  }

  Tensor gram = matmul(embeddings, transpose(embeddings));
  Tensor norm_sq = row_sum(mul(embeddings, embeddings));

  // Zero-norm rows get a unit denominator; their Gram entries are zero, so
  // the substituted cosine is 0 and the edge weight 0.5.
  Tensor guard = Tensor::zeros(n, 1);
  {
    auto ns = norm_sq.values();
    auto gv = guard.values_mut();
    for (std::size_t i = 0; i < n; ++i) {
      if (ns[i] == 0.0) {
        gv[i] = 1.0;
        log_warn("init_graph: zero-norm embedding for token " + std::to_string(i) +
                 ", using cosine 0");
      }
    }
  }
  Tensor norms = sqrt(add(norm_sq, guard));
  Tensor cos_pairs = divide(gram, matmul(norms, transpose(norms)));
  Tensor scaled = add(scale(cos_pairs, 0.5), Tensor::full(n, n, 0.5));

  // cos(h_i, h_i) is identically 1 with zero derivative, so the diagonal is
  // pinned to the constant 1 directly.
  Tensor eye = Tensor::identity(n);
  Tensor off_diag_mask = sub(Tensor::full(n, n, 1.0), eye);
  Tensor correlations = add(mul(scaled, off_diag_mask), eye);

  HetGraphState state;
  state.node_features = embeddings;
  state.correlations = correlations;
  state.masks = TypeMasks::build(typed);
  state.layer = 0;
  return state;
}

Tensor normalize_correlations(const Tensor& correlations) {
  const std::size_t n = correlations.rows();
  if (n == 0 || correlations.cols() != n) {
    throw std::invalid_argument("normalize_correlations: expected square matrix, got " +
                                correlations.shape_str());
  }
  Tensor degrees = row_sum(correlations);
  Tensor guard = Tensor::zeros(n, 1);
  {
    auto dv = degrees.values();
    auto gv = guard.values_mut();
    for (std::size_t i = 0; i < n; ++i) {
      if (dv[i] <= 0.0) {
        gv[i] = 1.0;
        log_warn("normalize_correlations: node " + std::to_string(i) +
                 " is isolated, using degree 1");
      }
    }
  }
  Tensor inv_sqrt_base = sqrt(add(degrees, guard));
  return divide(correlations, matmul(inv_sqrt_base, transpose(inv_sqrt_base)));
}

HetGraphState het_conv_layer(const HetGraphState& state,
                             const GraphLayerParams& params, double blend) {
  if (blend < 0.0 || blend > 1.0) {
    throw std::invalid_argument("het_conv_layer: blend factor " +
                                std::to_string(blend) + " outside [0,1]");
  }
  const Tensor& h = state.node_features;
  Tensor normalized = normalize_correlations(state.correlations);

  // An empty type block leaves its column mask all-zero, so the term is a
  // zero matrix and simply drops out of the sum.
  Tensor agg = matmul(matmul(mul(normalized, state.masks.col_stylistic), h),
                      params.w_stylistic);
  agg = add(agg, matmul(matmul(mul(normalized, state.masks.col_entity), h),
                        params.w_entity));
  agg = add(agg, matmul(matmul(mul(normalized, state.masks.col_other), h),
                        params.w_other));
  Tensor next_features = relu(agg);

  Tensor delta = sigmoid(
      matmul(matmul(next_features, params.w_update), transpose(next_features)));
  Tensor delta_sym = scale(add(delta, transpose(delta)), 0.5);
  Tensor next_correlations =
      add(scale(state.correlations, blend), scale(delta_sym, 1.0 - blend));

  HetGraphState next;
  next.node_features = next_features;
  next.correlations = next_correlations;
  next.masks = state.masks;
  next.layer = state.layer + 1;
  return next;
}

namespace {

Tensor normalize_map(const Tensor& raw, const char* which, bool& fell_back) {
  const std::size_t n = raw.rows();
  double total = 0.0;
  for (double v : raw.values()) total += v;
  if (total <= 0.0) {
    log_warn(std::string("readout_maps: ") + which +
             " map has zero mass, falling back to uniform");
    fell_back = true;
    return Tensor::full(n, 1, 1.0 / static_cast<double>(n));
  }
  fell_back = false;
  Tensor tiled_sum = matmul(Tensor::full(n, 1, 1.0), sum_all(raw));
  return divide(raw, tiled_sum);
}

}  // namespace

PreferenceMaps readout_maps(const Tensor& final_correlations, const TypedPost& typed) {
  const std::size_t n = typed.size();
  if (final_correlations.rows() != n || final_correlations.cols() != n) {
    throw std::invalid_argument("readout_maps: correlation matrix " +
                                final_correlations.shape_str() + " for " +
                                std::to_string(n) + " tokens");
  }
  TypeMasks masks = TypeMasks::build(typed);
  Tensor row_totals = row_sum(final_correlations);
  Tensor raw_pattern = sub(row_totals, matmul(final_correlations, masks.vec_entity));
  Tensor raw_fact = sub(row_totals, matmul(final_correlations, masks.vec_stylistic));

  PreferenceMaps maps;
  maps.pattern = normalize_map(raw_pattern, "pattern", maps.pattern_uniform_fallback);
  maps.fact = normalize_map(raw_fact, "fact", maps.fact_uniform_fallback);
  return maps;
}

PreferenceMaps uniform_maps(std::size_t n) {
  PreferenceMaps maps;
  maps.pattern = Tensor::full(n, 1, 1.0 / static_cast<double>(n));
  maps.fact = Tensor::full(n, 1, 1.0 / static_cast<double>(n));
  return maps;
}

}  // namespace preffend
