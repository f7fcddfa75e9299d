#pragma once

#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "heads.hpp"
#include "hetdgcn.hpp"

namespace preffend {

// Everything a forward pass needs for one post, resolved ahead of time:
// the type partition, vocabulary indices, and the token indices of each
// retrieved evidence article.
struct PostInputs {
  TypedPost typed;
  std::vector<std::size_t> token_indices;
  std::vector<std::vector<std::size_t>> evidence_tokens;
};

// The full detector: embedding table, preference-map generator, the active
// head(s) for the configured mode, and the fusion classifier. Parameters are
// registered in a fixed order and initialized from the config seed.
class Model {
 public:
  Model(const TrainConfig& config, std::size_t vocab_size);

  ParamRegistry& params() { return params_; }
  const ParamRegistry& params() const { return params_; }
  const TrainConfig& config() const { return config_; }
  Mode mode() const { return mode_; }
  const Tensor& embedding_matrix() const { return embedding_; }

  struct Encoded {
    Tensor embeddings;      // n x d
    Tensor pattern_states;  // 2h x n when the pattern head is active
    Tensor fact_states;     // q x n when the fact head is active
    std::vector<Tensor> evidence;  // d x 1 each
    PreferenceMaps maps;
  };

  Encoded encode(const PostInputs& post) const;

  // Prediction with an explicit map assignment. The map-swapped pass is this
  // same function with the two arguments exchanged.
  Tensor predict(const Encoded& encoded, const Tensor& pattern_map,
                 const Tensor& fact_map, bool* retrieval_miss = nullptr) const;

  struct Forward {
    Tensor prediction;
    Tensor swapped_prediction;
    PreferenceMaps maps;
    bool retrieval_miss = false;
  };

  Forward forward(const PostInputs& post) const;

  const std::vector<GraphLayerParams>& graph_layers() const { return graph_layers_; }

 private:
  TrainConfig config_;
  Mode mode_;
  ParamRegistry params_;
  Tensor embedding_;
  std::vector<GraphLayerParams> graph_layers_;
  PatternHeadParams pattern_;
  FactHeadParams fact_;
  FusionParams fusion_;
  bool has_pattern_ = false;
  bool has_fact_ = false;
};

// A model plus the vocabulary and config it was trained with; this is the
// unit that round-trips through a checkpoint (parameter file + sidecar
// metadata JSON at <path>.meta.json).
struct TrainedModel {
  TrainConfig config;
  Vocabulary vocab;
  Model model;
};

void save_trained(const TrainedModel& trained, const std::string& checkpoint_path);
TrainedModel load_trained(const std::string& checkpoint_path);

}  // namespace preffend
