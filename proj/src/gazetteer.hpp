#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace preffend {

enum class TokenType : unsigned char { Stylistic, Entity, Other };

char token_type_letter(TokenType t);          // 'S' / 'E' / 'T'
bool token_type_from_letter(char c, TokenType& out);

// Exact-match lexicon loaded from a plain-text file, one entry per line.
// Lines starting with '#' are comments; blank lines are skipped. When
// case_fold is set, entries and lookups are ASCII-lowercased.
class Gazetteer {
 public:
  Gazetteer() = default;
  Gazetteer(std::string category, bool case_fold);

  static Gazetteer load(const std::string& path, const std::string& category,
                        bool case_fold = false);

  void insert(const std::string& token);
  bool contains(const std::string& token) const;
  std::size_t size() const { return entries_.size(); }
  const std::string& category() const { return category_; }
  bool case_fold() const { return case_fold_; }

 private:
  std::string category_;
  bool case_fold_ = false;
  std::unordered_set<std::string> entries_;
};

// A post's tokens with their type partition. Token order is preserved;
// every token carries exactly one tag.
struct TypedPost {
  std::vector<std::string> tokens;
  std::vector<TokenType> type_of;
  std::size_t n_stylistic = 0;
  std::size_t n_entity = 0;
  std::size_t n_other = 0;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::size_t> indices_of(TokenType t) const;
};

// Tags each token: entity gazetteer wins over stylistic when a token is in
// both; everything else is Other. Throws std::invalid_argument on an empty
// token list.
TypedPost type_tokens(const std::vector<std::string>& tokens,
                      const Gazetteer& stylistic, const Gazetteer& entity);

// Builds a TypedPost from externally supplied tags (the per-post override
// path). Tags must have the same length as tokens.
TypedPost typed_from_tags(const std::vector<std::string>& tokens,
                          const std::vector<TokenType>& tags);

}  // namespace preffend
