#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazetteer.hpp"

namespace preffend {

struct PostRecord {
  std::string id;
  std::vector<std::string> tokens;
  int label = 0;  // 1 = fake
  std::string split;  // train | val | test
  std::optional<std::vector<TokenType>> types;  // explicit override of gazetteer typing
  std::optional<std::vector<std::string>> evidence_ids;

  bool operator==(const PostRecord&) const = default;
};

struct ArticleRecord {
  std::string id;
  std::vector<std::string> title;
  std::vector<std::string> body;

  bool operator==(const ArticleRecord&) const = default;
};

// JSON Lines, one record per line. Malformed lines and invariant violations
// are reported with their line number; duplicate ids are errors. An empty
// file loads as an empty list with a warning.
std::vector<PostRecord> load_posts(const std::string& path);
void save_posts(const std::string& path, std::span<const PostRecord> posts);

std::vector<ArticleRecord> load_articles(const std::string& path);
void save_articles(const std::string& path, std::span<const ArticleRecord> articles);

}  // namespace preffend
