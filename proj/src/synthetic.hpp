#pragma once

#include <string>
#include <vector>

#include "corpus.hpp"

namespace preffend {

// Seeded generator for the benchmark corpus. Two post families are mixed
// 50/50 by default:
//  - "pattern" posts: the label correlates with how many planted stylistic
//    tokens the post carries (fake posts draw extra tokens from the pattern
//    pool); entities appear only as label-neutral distractors.
//  - "fact" posts: the post names an entity plus a unique event code; a
//    matched article shares both and either confirms or refutes the event.
//    The label is fake exactly when the article refutes it; stylistic tokens
//    appear only as label-neutral distractors.
// Observed labels are then flipped at the configured noise rate.
struct SyntheticSpec {
  std::size_t train_posts = 2000;
  std::size_t val_posts = 500;
  std::size_t test_posts = 500;

  std::size_t neutral_vocab = 300;
  // Pools can be given explicitly; empty means "generate `*_pool_size`
  // synthetic tokens".
  std::vector<std::string> pattern_pool;
  std::vector<std::string> entity_pool;
  std::size_t pattern_pool_size = 12;
  std::size_t entity_pool_size = 16;
  std::size_t confirm_pool_size = 4;
  std::size_t refute_pool_size = 4;

  std::size_t article_base = 0;  // 0 = exactly the matched articles

  std::size_t post_len_min = 18;
  std::size_t post_len_max = 36;
  std::size_t article_len_min = 16;
  std::size_t article_len_max = 32;

  // Label-generation rule: planted pattern-token counts per class.
  std::size_t fake_pattern_min = 3;
  std::size_t fake_pattern_max = 5;
  std::size_t real_pattern_max = 1;
  std::size_t entity_distractor_max = 2;
  std::size_t pattern_distractor_max = 2;
  std::size_t stance_tokens_min = 2;
  std::size_t stance_tokens_max = 3;

  double noise_rate = 0.1;
  unsigned long long seed = 7;
  std::string families = "both";  // both | pattern | fact

  void validate() const;  // throws std::invalid_argument
  static SyntheticSpec from_json_text(const std::string& text);
  static SyntheticSpec from_json_file(const std::string& path);
};

struct SyntheticCorpus {
  std::vector<PostRecord> posts;
  std::vector<ArticleRecord> articles;
  std::vector<std::string> stylistic_gazetteer;
  std::vector<std::string> entity_gazetteer;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Writes posts.jsonl, articles.jsonl, and the two gazetteer files.
void write_corpus(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace preffend
