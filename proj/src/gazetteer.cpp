#include "gazetteer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "logging.hpp"

namespace preffend {

namespace {

std::string fold(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

char token_type_letter(TokenType t) {
  switch (t) {
    case TokenType::Stylistic: return 'S';
    case TokenType::Entity: return 'E';
    case TokenType::Other: return 'T';
  }
  return '?';
}

bool token_type_from_letter(char c, TokenType& out) {
  switch (c) {
    case 'S': out = TokenType::Stylistic; return true;
    case 'E': out = TokenType::Entity; return true;
    case 'T': out = TokenType::Other; return true;
    default: return false;
  }
}

Gazetteer::Gazetteer(std::string category, bool case_fold)
    : category_(std::move(category)), case_fold_(case_fold) {}

Gazetteer Gazetteer::load(const std::string& path, const std::string& category,
                          bool case_fold) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read gazetteer: " + path);
  Gazetteer g(category, case_fold);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    g.insert(line);
  }
  if (g.size() == 0) {
    log_warn("gazetteer " + path + " (" + category + ") is empty");
  }
  return g;
}

void Gazetteer::insert(const std::string& token) {
  entries_.insert(case_fold_ ? fold(token) : token);
}

bool Gazetteer::contains(const std::string& token) const {
  return entries_.count(case_fold_ ? fold(token) : token) > 0;
}

std::vector<std::size_t> TypedPost::indices_of(TokenType t) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < type_of.size(); ++i) {
    if (type_of[i] == t) out.push_back(i);
  }
  return out;
}

TypedPost type_tokens(const std::vector<std::string>& tokens,
                      const Gazetteer& stylistic, const Gazetteer& entity) {
  if (tokens.empty()) {
    throw std::invalid_argument("type_tokens: empty token list");
  }
  TypedPost post;
  post.tokens = tokens;
  post.type_of.reserve(tokens.size());
  for (const auto& token : tokens) {
    TokenType t = TokenType::Other;
    if (entity.contains(token)) {
      t = TokenType::Entity;  // entity wins over stylistic
    } else if (stylistic.contains(token)) {
      t = TokenType::Stylistic;
    }
    post.type_of.push_back(t);
    switch (t) {
      case TokenType::Stylistic: ++post.n_stylistic; break;
      case TokenType::Entity: ++post.n_entity; break;
      case TokenType::Other: ++post.n_other; break;
    }
  }
  return post;
}

TypedPost typed_from_tags(const std::vector<std::string>& tokens,
                          const std::vector<TokenType>& tags) {
  if (tokens.empty()) {
    throw std::invalid_argument("typed_from_tags: empty token list");
  }
  if (tokens.size() != tags.size()) {
    throw std::invalid_argument("typed_from_tags: " + std::to_string(tags.size()) +
                                " tags for " + std::to_string(tokens.size()) + " tokens");
  }
  TypedPost post;
  post.tokens = tokens;
  post.type_of = tags;
  for (TokenType t : tags) {
    switch (t) {
      case TokenType::Stylistic: ++post.n_stylistic; break;
      case TokenType::Entity: ++post.n_entity; break;
      case TokenType::Other: ++post.n_other; break;
    }
  }
  return post;
}

}  // namespace preffend
