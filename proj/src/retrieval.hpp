#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace preffend {

// Inverted index over title+body tokens with BM25 scoring (k1 = 1.5,
// b = 0.75). Documents are kept sorted by article id, so postings are
// id-ordered and ranking ties break toward the smaller id.
class RetrievalIndex {
 public:
  struct Posting {
    std::size_t doc = 0;  // index into docs(), id-sorted
    std::size_t tf = 0;
  };

  struct Scored {
    std::string id;
    double score = 0.0;
  };

  static RetrievalIndex build(std::span<const ArticleRecord> articles);

  std::vector<Scored> top_k(std::span<const std::string> query_tokens,
                            std::size_t k) const;

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const std::vector<std::string>& docs() const { return doc_ids_; }
  const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
  const std::map<std::string, std::vector<Posting>>& postings() const {
    return postings_;
  }

  static constexpr double kK1 = 1.5;
  static constexpr double kB = 0.75;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::map<std::string, std::vector<Posting>> postings_;
};

// post id -> ranked evidence article ids, written once per corpus so the
// training loop never re-runs retrieval.
struct EvidenceCache {
  int top_k = 0;
  std::map<std::string, std::vector<std::string>> items;
};

void save_evidence_cache(const std::string& path, const EvidenceCache& cache);
EvidenceCache load_evidence_cache(const std::string& path);

}  // namespace preffend
