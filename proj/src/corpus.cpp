#include "corpus.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "logging.hpp"

namespace preffend {

using nlohmann::json;

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t line,
                             const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> string_array(const json& j, const char* key,
                                      const std::string& path, std::size_t line) {
  if (!j.contains(key) || !j[key].is_array()) {
    line_error(path, line, std::string("missing or non-array \"") + key + "\"");
  }
  std::vector<std::string> out;
  for (const auto& item : j[key]) {
    if (!item.is_string()) line_error(path, line, std::string("non-string entry in \"") + key + "\"");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<PostRecord> load_posts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read posts file: " + path);

  std::vector<PostRecord> posts;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    PostRecord rec;
    if (!j.contains("id") || !j["id"].is_string()) line_error(path, line_no, "missing or non-string \"id\"");
    rec.id = j["id"].get<std::string>();
    if (!seen_ids.insert(rec.id).second) {
      line_error(path, line_no, "duplicate post id \"" + rec.id + "\"");
    }
    rec.tokens = string_array(j, "tokens", path, line_no);
    if (rec.tokens.empty()) line_error(path, line_no, "post has no tokens");
    if (!j.contains("label") || !j["label"].is_number_integer()) {
      line_error(path, line_no, "missing or non-integer \"label\"");
    }
    rec.label = j["label"].get<int>();
    if (rec.label != 0 && rec.label != 1) {
      line_error(path, line_no, "label must be 0 or 1");
    }
    if (!j.contains("split") || !j["split"].is_string()) {
      line_error(path, line_no, "missing or non-string \"split\"");
    }
    rec.split = j["split"].get<std::string>();
    if (rec.split != "train" && rec.split != "val" && rec.split != "test") {
      line_error(path, line_no, "split must be train, val, or test");
    }
    if (j.contains("types")) {
      auto letters = string_array(j, "types", path, line_no);
      if (letters.size() != rec.tokens.size()) {
        line_error(path, line_no, "types length " + std::to_string(letters.size()) +
                                      " does not match " + std::to_string(rec.tokens.size()) +
                                      " tokens");
      }
      std::vector<TokenType> tags;
      for (const auto& letter : letters) {
        TokenType t;
        if (letter.size() != 1 || !token_type_from_letter(letter[0], t)) {
          line_error(path, line_no, "type tag must be S, E, or T, got \"" + letter + "\"");
        }
        tags.push_back(t);
      }
      rec.types = std::move(tags);
    }
    if (j.contains("evidence_ids")) {
      rec.evidence_ids = string_array(j, "evidence_ids", path, line_no);
    }
    posts.push_back(std::move(rec));
  }
  if (posts.empty()) log_warn("posts file " + path + " is empty");
  return posts;
}

void save_posts(const std::string& path, std::span<const PostRecord> posts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write posts file: " + path);
  for (const auto& rec : posts) {
    json j;
    j["id"] = rec.id;
    j["tokens"] = rec.tokens;
    j["label"] = rec.label;
    j["split"] = rec.split;
    if (rec.types) {
      std::vector<std::string> letters;
      for (TokenType t : *rec.types) letters.emplace_back(1, token_type_letter(t));
      j["types"] = letters;
    }
    if (rec.evidence_ids) j["evidence_ids"] = *rec.evidence_ids;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for posts file: " + path);
}

std::vector<ArticleRecord> load_articles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read articles file: " + path);

  std::vector<ArticleRecord> articles;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    ArticleRecord rec;
    if (!j.contains("id") || !j["id"].is_string()) line_error(path, line_no, "missing or non-string \"id\"");
    rec.id = j["id"].get<std::string>();
    if (!seen_ids.insert(rec.id).second) {
      line_error(path, line_no, "duplicate article id \"" + rec.id + "\"");
    }
    rec.title = string_array(j, "title", path, line_no);
    rec.body = string_array(j, "body", path, line_no);
    articles.push_back(std::move(rec));
  }
  if (articles.empty()) log_warn("articles file " + path + " is empty");
  return articles;
}

void save_articles(const std::string& path, std::span<const ArticleRecord> articles) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write articles file: " + path);
  for (const auto& rec : articles) {
    json j;
    j["id"] = rec.id;
    j["title"] = rec.title;
    j["body"] = rec.body;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write failed for articles file: " + path);
}

}  // namespace preffend
