#include "gazetteer.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "logging.hpp"

using namespace preffend;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("gazetteer load deduplicates") {
  auto path = write_temp("gaz_dedup.txt", "!\n?\n!\n");
  Gazetteer g = Gazetteer::load(path, "stylistic");
  CHECK(g.size() == 2);
  CHECK(g.contains("!"));
  CHECK(g.contains("?"));
  CHECK_FALSE(g.contains("."));
}

TEST_CASE("empty gazetteer loads with a warning") {
  auto path = write_temp("gaz_empty.txt", "");
  const std::size_t before = warning_count();
  Gazetteer g = Gazetteer::load(path, "stylistic");
  CHECK(g.size() == 0);
  CHECK(warning_count() == before + 1);
}

TEST_CASE("comment lines and blank lines are skipped") {
  auto path = write_temp("gaz_comment.txt", "# header\nfoo\n\nbar\n");
  Gazetteer g = Gazetteer::load(path, "entity");
  CHECK(g.size() == 2);
  CHECK(g.contains("foo"));
  CHECK_FALSE(g.contains("# header"));
}

TEST_CASE("case folding merges entries") {
  auto path = write_temp("gaz_case.txt", "We\nwe\n");
  Gazetteer folded = Gazetteer::load(path, "stylistic", /*case_fold=*/true);
  CHECK(folded.size() == 1);
  CHECK(folded.contains("WE"));
  Gazetteer exact = Gazetteer::load(path, "stylistic", /*case_fold=*/false);
  CHECK(exact.size() == 2);
  CHECK_FALSE(exact.contains("WE"));
}

TEST_CASE("missing gazetteer file is an error") {
  CHECK_THROWS_AS(Gazetteer::load("/nonexistent/gaz.txt", "entity"), std::runtime_error);
}

TEST_CASE("type_tokens matches the worked example") {
  Gazetteer stylistic("stylistic", false);
  stylistic.insert("!");
  Gazetteer entity("entity", false);
  entity.insert("Shanghai");

  TypedPost post = type_tokens({"Shanghai", "is", "great", "!"}, stylistic, entity);
  CHECK(post.type_of[0] == TokenType::Entity);
  CHECK(post.type_of[1] == TokenType::Other);
  CHECK(post.type_of[2] == TokenType::Other);
  CHECK(post.type_of[3] == TokenType::Stylistic);
  CHECK(post.n_stylistic == 1);
  CHECK(post.n_entity == 1);
  CHECK(post.n_other == 2);
}

TEST_CASE("entity wins when a token is in both gazetteers") {
  Gazetteer stylistic("stylistic", false);
  stylistic.insert("x");
  Gazetteer entity("entity", false);
  entity.insert("x");
  TypedPost post = type_tokens({"x"}, stylistic, entity);
  CHECK(post.type_of[0] == TokenType::Entity);
}

TEST_CASE("no matches gives an all-other partition") {
  Gazetteer stylistic("stylistic", false);
  Gazetteer entity("entity", false);
  TypedPost post = type_tokens({"a", "b", "c"}, stylistic, entity);
  CHECK(post.n_stylistic == 0);
  CHECK(post.n_entity == 0);
  CHECK(post.n_other == 3);
}

TEST_CASE("empty token list is rejected") {
  Gazetteer stylistic("stylistic", false);
  Gazetteer entity("entity", false);
  CHECK_THROWS_AS(type_tokens({}, stylistic, entity), std::invalid_argument);
}

TEST_CASE("partition, idempotence, and order preservation") {
  Gazetteer stylistic("stylistic", false);
  for (const char* t : {"!", "?", "wow"}) stylistic.insert(t);
  Gazetteer entity("entity", false);
  for (const char* t : {"paris", "tokyo"}) entity.insert(t);

  std::vector<std::string> tokens = {"wow", "paris", "went", "to",   "tokyo",
                                     "!",   "again", "?",    "wow"};
  TypedPost first = type_tokens(tokens, stylistic, entity);

  // Partition: counts cover every token exactly once.
  CHECK(first.n_stylistic + first.n_entity + first.n_other == tokens.size());
  // Order preservation: the surface token at each index is unchanged.
  for (std::size_t i = 0; i < tokens.size(); ++i) CHECK(first.tokens[i] == tokens[i]);
  // Idempotence: retyping reproduces identical tags.
  TypedPost second = type_tokens(first.tokens, stylistic, entity);
  CHECK(first.type_of == second.type_of);
}

TEST_CASE("typed_from_tags validates lengths") {
  std::vector<TokenType> tags = {TokenType::Entity};
  CHECK_THROWS_AS(typed_from_tags({"a", "b"}, tags), std::invalid_argument);
  CHECK_THROWS_AS(typed_from_tags({}, {}), std::invalid_argument);
  TypedPost post = typed_from_tags({"a"}, tags);
  CHECK(post.n_entity == 1);
}

TEST_CASE("indices_of returns positions per type") {
  std::vector<TokenType> tags = {TokenType::Stylistic, TokenType::Entity,
                                 TokenType::Other, TokenType::Stylistic};
  TypedPost post = typed_from_tags({"a", "b", "c", "d"}, tags);
  CHECK(post.indices_of(TokenType::Stylistic) == std::vector<std::size_t>{0, 3});
  CHECK(post.indices_of(TokenType::Entity) == std::vector<std::size_t>{1});
}
