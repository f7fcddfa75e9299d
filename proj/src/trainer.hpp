#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "losses.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "retrieval.hpp"

namespace preffend {

// A corpus directory loaded and ready to train on: posts, the article base,
// gazetteers, and the per-post evidence ranking. Evidence comes from the
// cache file when one matches the configured top-k, otherwise BM25 retrieval
// runs once and the cache is written back.
struct CorpusBundle {
  std::vector<PostRecord> posts;
  std::vector<ArticleRecord> articles;
  Gazetteer stylistic;
  Gazetteer entity;
  EvidenceCache evidence;
  std::unordered_map<std::string, std::size_t> article_by_id;
  std::unordered_map<std::string, std::size_t> post_by_id;

  static CorpusBundle load(const std::string& dir, const TrainConfig& config);

  std::vector<std::size_t> split_indices(const std::string& split) const;
};

// Resolves typing (gazetteers, explicit per-post override, or the seeded
// random partition under the rand-init-maps ablation), vocabulary indices,
// and evidence token lists for one post.
PostInputs prepare_post(const PostRecord& post, const CorpusBundle& corpus,
                        const Vocabulary& vocab, const TrainConfig& config);

Vocabulary build_vocabulary(const CorpusBundle& corpus);

struct EpochLog {
  int epoch = 0;
  LossBreakdown train_loss;
  Metrics val;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  Metrics best_val;
  int best_epoch = 0;
  std::string checkpoint_path;
  TrainedModel trained;
};

// Full training run: shuffled mini-batches, Adam steps on the batch-mean
// loss, per-epoch validation, best-checkpoint selection by validation macro
// F1 with early stopping. Writes <out_dir>/model.ckpt (+ metadata) and
// <out_dir>/train_log.jsonl. Deterministic given the config seed.
TrainResult train_model(const TrainConfig& config, const CorpusBundle& corpus,
                        const std::string& out_dir);

Metrics evaluate_split(const TrainedModel& trained, const CorpusBundle& corpus,
                       const std::string& split);

// Mean cosine similarity between the two preference maps over a split;
// reported by the divergence analysis tooling.
double mean_map_cosine(const TrainedModel& trained, const CorpusBundle& corpus,
                       const std::string& split);

std::string epoch_log_json(const EpochLog& log);

struct AblationArm {
  std::string name;
  std::string ablation;
  Metrics val;
  Metrics test;
};

struct AblationGrid {
  unsigned long long seed = 0;
  std::vector<AblationArm> arms;

  std::string to_json_text() const;
  std::string to_text_table() const;
};

// Trains the five arms (full, rand-init-maps, no-cos, no-rev, only-cls) with
// a shared seed and corpus; writes grid.json and grid.txt under out_dir.
AblationGrid run_ablation(const TrainConfig& base_config, const CorpusBundle& corpus,
                          const std::string& out_dir);

}  // namespace preffend
