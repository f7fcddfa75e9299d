#include "heads.hpp"

#include <stdexcept>

namespace preffend {

Vocabulary::Vocabulary() {
  tokens_.push_back(kOovToken);
  index_[kOovToken] = 0;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const std::size_t idx = tokens_.size();
  tokens_.push_back(token);
  index_[token] = idx;
  return idx;
}

std::size_t Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? oov_index() : it->second;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& ordered) {
  Vocabulary v;
  for (const auto& token : ordered) v.add(token);
  return v;
}

Tensor embed(const TypedPost& typed, const EmbeddingTable& table) {
  std::vector<std::size_t> indices;
  indices.reserve(typed.size());
  for (const auto& token : typed.tokens) indices.push_back(table.vocab.lookup(token));
  return gather_rows(table.matrix, indices);
}

Tensor embed_indices(std::span<const std::size_t> indices, const Tensor& matrix) {
  return gather_rows(matrix, indices);
}

Tensor evidence_vector(std::span<const std::size_t> token_indices,
                       const Tensor& embedding_matrix) {
  if (token_indices.empty()) {
    return Tensor::zeros(embedding_matrix.cols(), 1);
  }
  Tensor rows = gather_rows(embedding_matrix, token_indices);
  Tensor mean = scale(col_sum(rows), 1.0 / static_cast<double>(token_indices.size()));
  return transpose(mean);
}

Tensor pattern_token_states(const Tensor& embeddings, const PatternHeadParams& params) {
  const std::size_t n = embeddings.rows();
  const std::size_t h = params.hidden();
  if (n == 0) {
    throw std::invalid_argument("pattern_token_states: no tokens");
  }

  std::vector<Tensor> token_columns(n);
  for (std::size_t t = 0; t < n; ++t) {
    token_columns[t] = transpose(gather_rows(embeddings, {t}));
  }

  std::vector<Tensor> forward(n), backward(n);
  Tensor state = Tensor::zeros(h, 1);
  for (std::size_t t = 0; t < n; ++t) {
    state = tanh(add(add(matmul(params.w_input_fwd, token_columns[t]),
                         matmul(params.w_hidden_fwd, state)),
                     params.bias_fwd));
    forward[t] = state;
  }
  state = Tensor::zeros(h, 1);
  for (std::size_t t = n; t-- > 0;) {
    state = tanh(add(add(matmul(params.w_input_bwd, token_columns[t]),
                         matmul(params.w_hidden_bwd, state)),
                     params.bias_bwd));
    backward[t] = state;
  }

  std::vector<Tensor> states(n);
  for (std::size_t t = 0; t < n; ++t) {
    states[t] = concat_rows({forward[t], backward[t]});
  }
  return concat_cols(states);
}

Tensor pattern_forward(const Tensor& token_states, const Tensor& map) {
  if (map.cols() != 1 || map.rows() != token_states.cols()) {
    throw std::invalid_argument("pattern_forward: map " + map.shape_str() +
                                " does not match states " + token_states.shape_str());
  }
  return matmul(token_states, map);
}

Tensor fact_token_states(const Tensor& embeddings, const FactHeadParams& params) {
  return matmul(params.w_token, transpose(embeddings));
}

FactForward fact_forward(const Tensor& token_states, const Tensor& map,
                         std::span<const Tensor> evidence,
                         const FactHeadParams& params) {
  if (map.cols() != 1 || map.rows() != token_states.cols()) {
    throw std::invalid_argument("fact_forward: map " + map.shape_str() +
                                " does not match states " + token_states.shape_str());
  }
  Tensor query = matmul(token_states, map);

  FactForward result;
  Tensor pooled;
  if (evidence.empty()) {
    result.retrieval_miss = true;
    pooled = Tensor::zeros(params.w_score.cols() - query.rows(), 1);
  } else {
    std::vector<Tensor> scores(evidence.size());
    for (std::size_t j = 0; j < evidence.size(); ++j) {
      scores[j] = matmul(params.v_score,
                         tanh(matmul(params.w_score, concat_rows({query, evidence[j]}))));
    }
    result.attention = softmax_rows(concat_cols(scores));
    Tensor evidence_matrix = concat_cols(evidence);
    pooled = matmul(evidence_matrix, transpose(result.attention));
  }
  result.output =
      add(matmul(params.w_output, concat_rows({query, pooled})), params.b_output);
  return result;
}

Tensor fuse_predict(const Tensor& features, const FusionParams& params) {
  if (features.cols() != 1 || params.w_hidden.cols() != features.rows()) {
    throw std::invalid_argument("fuse_predict: features " + features.shape_str() +
                                " do not match fusion input " +
                                params.w_hidden.shape_str());
  }
  Tensor hidden = relu(add(matmul(params.w_hidden, features), params.b_hidden));
  return sigmoid(add(matmul(params.w_out, hidden), params.b_out));
}

}  // namespace preffend
