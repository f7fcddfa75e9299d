#pragma once

#include <string>
#include <vector>

#include "trainer.hpp"

namespace preffend {

// Per-token view of the two preference maps for one post. The dominant
// group is pattern when the pattern score is strictly higher; ties go to
// fact so the grouping is deterministic.
struct ExplainTokenEntry {
  std::string token;
  char type = 'T';
  double pattern_score = 0.0;
  double fact_score = 0.0;
  std::string group;  // "pattern" | "fact"
};

struct ExplainReport {
  std::string post_id;
  int label = 0;
  double prediction = 0.0;
  bool retrieval_miss = false;
  std::vector<ExplainTokenEntry> tokens;
};

ExplainReport explain_post(const TrainedModel& trained, const CorpusBundle& corpus,
                           const PostRecord& post);

// Frequency analysis across posts: per post, the top `per_post_top` tokens of
// each group (ranked by that group's score) are collected, then the most
// frequent tokens of each set are reported.
struct GroupFrequency {
  std::vector<std::pair<std::string, std::size_t>> pattern_top;
  std::vector<std::pair<std::string, std::size_t>> fact_top;
};

GroupFrequency summarize_groups(std::span<const ExplainReport> reports,
                                std::size_t per_post_top = 10,
                                std::size_t overall_top = 20);

std::string explain_report_json(const ExplainReport& report);
std::string explain_summary_json(std::span<const ExplainReport> reports,
                                 const GroupFrequency& frequency);

// Aligned text rendering with score-proportional shading blocks.
std::string render_explain_text(const ExplainReport& report);

}  // namespace preffend
