#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gazetteer.hpp"
#include "tensor.hpp"

namespace preffend {

// Token -> index map with a reserved out-of-vocabulary slot at index 0.
class Vocabulary {
 public:
  static constexpr const char* kOovToken = "<oov>";

  Vocabulary();
  std::size_t add(const std::string& token);     // inserts if absent
  std::size_t lookup(const std::string& token) const;  // OOV index if absent
  std::size_t oov_index() const { return 0; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  static Vocabulary from_tokens(const std::vector<std::string>& ordered);

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
};

struct EmbeddingTable {
  Vocabulary vocab;
  Tensor matrix;  // |V| x d, trainable

  std::size_t dim() const { return matrix.cols(); }
};

// Row i is the embedding of token i; unknown tokens use the OOV row.
Tensor embed(const TypedPost& typed, const EmbeddingTable& table);
Tensor embed_indices(std::span<const std::size_t> indices, const Tensor& matrix);

// Mean of the article's token embeddings as a d x 1 column. An empty token
// list yields the zero vector.
Tensor evidence_vector(std::span<const std::size_t> token_indices,
                       const Tensor& embedding_matrix);

// Single-layer bidirectional Elman recurrence with tanh cells.
struct PatternHeadParams {
  Tensor w_input_fwd;   // h x d
  Tensor w_hidden_fwd;  // h x h
  Tensor bias_fwd;      // h x 1
  Tensor w_input_bwd;
  Tensor w_hidden_bwd;
  Tensor bias_bwd;

  std::size_t hidden() const { return w_input_fwd.rows(); }
};

// Per-token states as columns: [forward_t; backward_t], 2h x n.
Tensor pattern_token_states(const Tensor& embeddings, const PatternHeadParams& params);

// Map-weighted aggregation p = sum_i map_i * state_i. Throws on a map whose
// length does not match the number of token states.
Tensor pattern_forward(const Tensor& token_states, const Tensor& map);

// Linear token projection plus additive attention over evidence articles.
struct FactHeadParams {
  Tensor w_token;   // q x d
  Tensor w_score;   // a x (q + d)
  Tensor v_score;   // 1 x a
  Tensor w_output;  // f x (q + d)
  Tensor b_output;  // f x 1
};

Tensor fact_token_states(const Tensor& embeddings, const FactHeadParams& params);

struct FactForward {
  Tensor output;          // f x 1
  Tensor attention;       // 1 x n_f softmax weights; undefined when no evidence
  bool retrieval_miss = false;
};

// q = map-weighted token states; per-article score v . tanh(W [q; d_j]);
// softmax weights pool the evidence; output projects [q; pooled]. With no
// evidence the pooled vector is zero and the miss flag is set.
FactForward fact_forward(const Tensor& token_states, const Tensor& map,
                         std::span<const Tensor> evidence,
                         const FactHeadParams& params);

// Two-layer MLP with ReLU hidden and sigmoid output.
struct FusionParams {
  Tensor w_hidden;  // hidden x in
  Tensor b_hidden;
  Tensor w_out;     // 1 x hidden
  Tensor b_out;
};

Tensor fuse_predict(const Tensor& features, const FusionParams& params);

}  // namespace preffend
