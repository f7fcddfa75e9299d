#include "explain.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace preffend {

ExplainReport explain_post(const TrainedModel& trained, const CorpusBundle& corpus,
                           const PostRecord& post) {
  PostInputs inputs = prepare_post(post, corpus, trained.vocab, trained.config);
  Model::Encoded enc = trained.model.encode(inputs);
  bool miss = false;
  Tensor prediction = trained.model.predict(enc, enc.maps.pattern, enc.maps.fact, &miss);

  ExplainReport report;
  report.post_id = post.id;
  report.label = post.label;
  report.prediction = prediction.value();
  report.retrieval_miss = miss;
  const auto pattern_scores = enc.maps.pattern.values();
  const auto fact_scores = enc.maps.fact.values();
  for (std::size_t i = 0; i < inputs.typed.size(); ++i) {
    ExplainTokenEntry entry;
    entry.token = inputs.typed.tokens[i];
    entry.type = token_type_letter(inputs.typed.type_of[i]);
    entry.pattern_score = pattern_scores[i];
    entry.fact_score = fact_scores[i];
    entry.group = entry.pattern_score > entry.fact_score ? "pattern" : "fact";
    report.tokens.push_back(std::move(entry));
  }
  return report;
}

GroupFrequency summarize_groups(std::span<const ExplainReport> reports,
                                std::size_t per_post_top, std::size_t overall_top) {
  std::map<std::string, std::size_t> pattern_counts;
  std::map<std::string, std::size_t> fact_counts;

  for (const auto& report : reports) {
    std::vector<const ExplainTokenEntry*> pattern_group;
    std::vector<const ExplainTokenEntry*> fact_group;
    for (const auto& entry : report.tokens) {
      (entry.group == "pattern" ? pattern_group : fact_group).push_back(&entry);
    }
    auto take_top = [per_post_top](std::vector<const ExplainTokenEntry*>& group,
                                   bool pattern,
                                   std::map<std::string, std::size_t>& counts) {
      std::stable_sort(group.begin(), group.end(),
                       [pattern](const ExplainTokenEntry* a, const ExplainTokenEntry* b) {
                         const double sa = pattern ? a->pattern_score : a->fact_score;
                         const double sb = pattern ? b->pattern_score : b->fact_score;
                         return sa > sb;
                       });
      const std::size_t limit = std::min(per_post_top, group.size());
      for (std::size_t i = 0; i < limit; ++i) ++counts[group[i]->token];
    };
    take_top(pattern_group, true, pattern_counts);
    take_top(fact_group, false, fact_counts);
  }

  auto ranked = [overall_top](const std::map<std::string, std::size_t>& counts) {
    std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (items.size() > overall_top) items.resize(overall_top);
    return items;
  };

  GroupFrequency freq;
  freq.pattern_top = ranked(pattern_counts);
  freq.fact_top = ranked(fact_counts);
  return freq;
}

namespace {

nlohmann::json report_to_json(const ExplainReport& report) {
  nlohmann::json j;
  j["post_id"] = report.post_id;
  j["label"] = report.label;
  j["prediction"] = report.prediction;
  j["retrieval_miss"] = report.retrieval_miss;
  j["tokens"] = nlohmann::json::array();
  for (const auto& entry : report.tokens) {
    j["tokens"].push_back({{"token", entry.token},
                           {"type", std::string(1, entry.type)},
                           {"pattern_score", entry.pattern_score},
                           {"fact_score", entry.fact_score},
                           {"group", entry.group}});
  }
  return j;
}

}  // namespace

std::string explain_report_json(const ExplainReport& report) {
  return report_to_json(report).dump();
}

std::string explain_summary_json(std::span<const ExplainReport> reports,
                                 const GroupFrequency& frequency) {
  nlohmann::json j;
  j["posts"] = nlohmann::json::array();
  for (const auto& report : reports) j["posts"].push_back(report_to_json(report));
  auto freq_json = [](const std::vector<std::pair<std::string, std::size_t>>& items) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [token, count] : items) {
      arr.push_back({{"token", token}, {"count", count}});
    }
    return arr;
  };
  j["pattern_group_top"] = freq_json(frequency.pattern_top);
  j["fact_group_top"] = freq_json(frequency.fact_top);
  return j.dump();
}

std::string render_explain_text(const ExplainReport& report) {
  static const char* kShades[] = {" ", "░", "▒", "▓", "█"};
  double max_score = 0.0;
  for (const auto& entry : report.tokens) {
    max_score = std::max({max_score, entry.pattern_score, entry.fact_score});
  }
  auto shade = [max_score](double score) {
    if (max_score <= 0.0) return kShades[0];
    int level = static_cast<int>(score / max_score * 4.0 + 0.5);
    return kShades[std::clamp(level, 0, 4)];
  };

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "post %s  label=%d  prediction=%.4f%s\n",
                report.post_id.c_str(), report.label, report.prediction,
                report.retrieval_miss ? "  (retrieval miss)" : "");
  out << line;
  std::size_t width = 5;
  for (const auto& entry : report.tokens) width = std::max(width, entry.token.size());
  std::snprintf(line, sizeof(line), "%-*s type  %-10s  %-10s  group\n",
                static_cast<int>(width), "token", "m_P", "m_F");
  out << line;
  for (const auto& entry : report.tokens) {
    std::snprintf(line, sizeof(line), "%-*s   %c   %.4f %s  %.4f %s  %s\n",
                  static_cast<int>(width), entry.token.c_str(), entry.type,
                  entry.pattern_score, shade(entry.pattern_score), entry.fact_score,
                  shade(entry.fact_score), entry.group.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace preffend
