#include "retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace preffend {

RetrievalIndex RetrievalIndex::build(std::span<const ArticleRecord> articles) {
  RetrievalIndex index;

  std::vector<std::size_t> order(articles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return articles[a].id < articles[b].id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (articles[order[i - 1]].id == articles[order[i]].id) {
      throw std::invalid_argument("retrieval index: duplicate article id \"" +
                                  articles[order[i]].id + "\"");
    }
  }

  std::size_t total_len = 0;
  for (std::size_t doc = 0; doc < order.size(); ++doc) {
    const ArticleRecord& article = articles[order[doc]];
    index.doc_ids_.push_back(article.id);

    std::unordered_map<std::string, std::size_t> tf;
    std::size_t len = 0;
    for (const auto& t : article.title) { ++tf[t]; ++len; }
    for (const auto& t : article.body) { ++tf[t]; ++len; }
    index.doc_lengths_.push_back(len);
    total_len += len;
    for (const auto& [term, count] : tf) {
      index.postings_[term].push_back(Posting{doc, count});
    }
  }
  index.avg_doc_length_ =
      index.doc_ids_.empty() ? 0.0
                             : static_cast<double>(total_len) /
                                   static_cast<double>(index.doc_ids_.size());
  return index;
}

std::vector<RetrievalIndex::Scored> RetrievalIndex::top_k(
    std::span<const std::string> query_tokens, std::size_t k) const {
  if (k == 0) throw std::invalid_argument("top_k: k must be >= 1");
  if (doc_ids_.empty()) return {};

  const double n_docs = static_cast<double>(doc_ids_.size());
  std::vector<double> scores(doc_ids_.size(), 0.0);
  std::vector<bool> touched(doc_ids_.size(), false);

  // Each distinct query term contributes once.
  std::unordered_set<std::string> seen;
  for (const auto& term : query_tokens) {
    if (!seen.insert(term).second) continue;
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& plist = it->second;
    const double df = static_cast<double>(plist.size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const Posting& p : plist) {
      const double tf = static_cast<double>(p.tf);
      const double dl = static_cast<double>(doc_lengths_[p.doc]);
      const double denom = tf + kK1 * (1.0 - kB + kB * dl / avg_doc_length_);
      scores[p.doc] += idf * tf * (kK1 + 1.0) / denom;
      touched[p.doc] = true;
    }
  }

  std::vector<std::size_t> candidates;
  for (std::size_t doc = 0; doc < scores.size(); ++doc) {
    if (touched[doc]) candidates.push_back(doc);
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return doc_ids_[a] < doc_ids_[b];
  });
  if (candidates.size() > k) candidates.resize(k);

  std::vector<Scored> out;
  out.reserve(candidates.size());
  for (std::size_t doc : candidates) out.push_back(Scored{doc_ids_[doc], scores[doc]});
  return out;
}

void save_evidence_cache(const std::string& path, const EvidenceCache& cache) {
  nlohmann::json j;
  j["top_k"] = cache.top_k;
  nlohmann::json items = nlohmann::json::object();
  for (const auto& [post_id, article_ids] : cache.items) items[post_id] = article_ids;
  j["items"] = items;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write evidence cache: " + path);
  out << j.dump() << "\n";
}

EvidenceCache load_evidence_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read evidence cache: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("evidence cache " + path + ": " + e.what());
  }
  EvidenceCache cache;
  cache.top_k = j.at("top_k").get<int>();
  for (auto it = j.at("items").begin(); it != j.at("items").end(); ++it) {
    cache.items[it.key()] = it.value().get<std::vector<std::string>>();
  }
  return cache;
}

}  // namespace preffend
