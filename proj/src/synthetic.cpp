#include "synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace preffend {

using nlohmann::json;

namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
  return buf;
}

std::vector<std::string> generated_pool(const char* prefix, std::size_t count,
                                        int width) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(numbered(prefix, i, width));
  return out;
}

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi);
  return dist(rng);
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[draw(rng, 0, pool.size() - 1)];
}

void insert_at_random(std::mt19937_64& rng, std::vector<std::string>& tokens,
                      const std::string& token) {
  const std::size_t pos = draw(rng, 0, tokens.size());
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), token);
}

}  // namespace

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("synthetic spec: " + msg);
  };
  if (train_posts + val_posts + test_posts == 0) fail("no posts requested");
  if (neutral_vocab == 0) fail("neutral_vocab must be >= 1");
  if (pattern_pool.empty() && pattern_pool_size == 0) fail("empty pattern pool");
  if (entity_pool.empty() && entity_pool_size == 0) fail("empty entity pool");
  if (confirm_pool_size == 0 || refute_pool_size == 0) fail("empty stance pool");
  if (post_len_min == 0 || post_len_min > post_len_max) fail("bad post length range");
  if (article_len_min == 0 || article_len_min > article_len_max) {
    fail("bad article length range");
  }
  if (fake_pattern_min > fake_pattern_max) fail("bad fake pattern count range");
  if (fake_pattern_min <= real_pattern_max) {
    fail("fake_pattern_min must exceed real_pattern_max");
  }
  if (stance_tokens_min == 0 || stance_tokens_min > stance_tokens_max) {
    fail("bad stance token count range");
  }
  if (noise_rate < 0.0 || noise_rate >= 1.0) fail("noise_rate must be in [0,1)");
  if (families != "both" && families != "pattern" && families != "fact") {
    fail("families must be both, pattern, or fact");
  }
}

SyntheticSpec SyntheticSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("synthetic spec: invalid JSON: ") + e.what());
  }
  SyntheticSpec spec;
  auto get_size = [&](const char* key, std::size_t& field) {
    if (j.contains(key)) field = j[key].get<std::size_t>();
  };
  if (j.contains("posts_per_split")) {
    const auto& p = j["posts_per_split"];
    if (p.contains("train")) spec.train_posts = p["train"].get<std::size_t>();
    if (p.contains("val")) spec.val_posts = p["val"].get<std::size_t>();
    if (p.contains("test")) spec.test_posts = p["test"].get<std::size_t>();
  }
  get_size("neutral_vocab", spec.neutral_vocab);
  // pattern_pool / entity_pool accept either a size or an explicit token list
  auto get_pool = [&](const char* key, std::vector<std::string>& pool,
                      std::size_t& size_field) {
    if (!j.contains(key)) return;
    if (j[key].is_array()) {
      pool = j[key].get<std::vector<std::string>>();
    } else {
      size_field = j[key].get<std::size_t>();
    }
  };
  get_pool("pattern_pool", spec.pattern_pool, spec.pattern_pool_size);
  get_pool("entity_pool", spec.entity_pool, spec.entity_pool_size);
  get_size("confirm_pool", spec.confirm_pool_size);
  get_size("refute_pool", spec.refute_pool_size);
  get_size("article_base", spec.article_base);
  get_size("post_len_min", spec.post_len_min);
  get_size("post_len_max", spec.post_len_max);
  get_size("article_len_min", spec.article_len_min);
  get_size("article_len_max", spec.article_len_max);
  get_size("fake_pattern_min", spec.fake_pattern_min);
  get_size("fake_pattern_max", spec.fake_pattern_max);
  get_size("real_pattern_max", spec.real_pattern_max);
  get_size("entity_distractor_max", spec.entity_distractor_max);
  get_size("pattern_distractor_max", spec.pattern_distractor_max);
  get_size("stance_tokens_min", spec.stance_tokens_min);
  get_size("stance_tokens_max", spec.stance_tokens_max);
  if (j.contains("noise_rate")) spec.noise_rate = j["noise_rate"].get<double>();
  if (j.contains("seed")) spec.seed = j["seed"].get<unsigned long long>();
  if (j.contains("families")) spec.families = j["families"].get<std::string>();
  spec.validate();
  return spec;
}

SyntheticSpec SyntheticSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("synthetic spec: cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();

  const std::vector<std::string> neutral = generated_pool("w", spec.neutral_vocab, 3);
  const std::vector<std::string> pattern =
      spec.pattern_pool.empty() ? generated_pool("sty", spec.pattern_pool_size, 2)
                                : spec.pattern_pool;
  const std::vector<std::string> entity =
      spec.entity_pool.empty() ? generated_pool("ent", spec.entity_pool_size, 2)
                               : spec.entity_pool;
  const std::vector<std::string> confirm = generated_pool("aff", spec.confirm_pool_size, 2);
  const std::vector<std::string> refute = generated_pool("neg", spec.refute_pool_size, 2);

  {
    std::unordered_set<std::string> seen;
    auto check_pool = [&](const std::vector<std::string>& pool, const char* name) {
      for (const auto& token : pool) {
        if (token.rfind("evt", 0) == 0) {
          throw std::invalid_argument(
              std::string("synthetic spec: token \"") + token + "\" in " + name +
              " collides with the event-code namespace");
        }
        if (!seen.insert(token).second) {
          throw std::invalid_argument(std::string("synthetic spec: pools overlap on \"") +
                                      token + "\"");
        }
      }
    };
    check_pool(neutral, "neutral vocabulary");
    check_pool(pattern, "pattern pool");
    check_pool(entity, "entity pool");
    check_pool(confirm, "confirm pool");
    check_pool(refute, "refute pool");
  }

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution noise(spec.noise_rate);

  SyntheticCorpus corpus;
  std::size_t post_counter = 0;
  std::size_t article_counter = 0;
  std::size_t event_counter = 0;

  auto neutral_base = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::string> tokens;
    const std::size_t len = draw(rng, lo, hi);
    tokens.reserve(len + 8);
    for (std::size_t i = 0; i < len; ++i) tokens.push_back(pick(rng, neutral));
    return tokens;
  };

  struct SplitPlan { const char* name; std::size_t count; };
  const SplitPlan plan[] = {{"train", spec.train_posts},
                            {"val", spec.val_posts},
                            {"test", spec.test_posts}};

  for (const auto& [split_name, split_count] : plan) {
    for (std::size_t i = 0; i < split_count; ++i) {
      const bool pattern_family =
          spec.families == "pattern" || (spec.families == "both" && i % 2 == 0);

      PostRecord post;
      post.id = numbered("p", post_counter++, 5);
      post.split = split_name;
      const bool fake = coin(rng);
      post.tokens = neutral_base(spec.post_len_min, spec.post_len_max);

      if (pattern_family) {
        const std::size_t planted =
            fake ? draw(rng, spec.fake_pattern_min, spec.fake_pattern_max)
                 : draw(rng, 0, spec.real_pattern_max);
        for (std::size_t k = 0; k < planted; ++k) {
          insert_at_random(rng, post.tokens, pick(rng, pattern));
        }
        // Label-neutral entity mentions; they carry no signal here and only
        // interfere with a model that cannot ignore them.
        const std::size_t distractors = draw(rng, 0, spec.entity_distractor_max);
        for (std::size_t k = 0; k < distractors; ++k) {
          insert_at_random(rng, post.tokens, pick(rng, entity));
        }
      } else {
        const std::string& ent = pick(rng, entity);
        const std::string event_code = numbered("evt", event_counter++, 5);
        insert_at_random(rng, post.tokens, ent);
        insert_at_random(rng, post.tokens, event_code);
        const std::size_t distractors = draw(rng, 0, spec.pattern_distractor_max);
        for (std::size_t k = 0; k < distractors; ++k) {
          insert_at_random(rng, post.tokens, pick(rng, pattern));
        }

        ArticleRecord article;
        article.id = numbered("a", article_counter++, 5);
        article.title = {ent, event_code};
        article.body = neutral_base(spec.article_len_min, spec.article_len_max);
        insert_at_random(rng, article.body, ent);
        insert_at_random(rng, article.body, ent);
        insert_at_random(rng, article.body, event_code);
        const std::size_t stance_count =
            draw(rng, spec.stance_tokens_min, spec.stance_tokens_max);
        const std::vector<std::string>& stance = fake ? refute : confirm;
        for (std::size_t k = 0; k < stance_count; ++k) {
          insert_at_random(rng, article.body, pick(rng, stance));
        }
        corpus.articles.push_back(std::move(article));
      }

      post.label = fake ? 1 : 0;
      if (noise(rng)) post.label = 1 - post.label;
      corpus.posts.push_back(std::move(post));
    }
  }

  // Pad the article base with unmatched distractors when asked for more.
  while (corpus.articles.size() < spec.article_base) {
    ArticleRecord article;
    article.id = numbered("a", article_counter++, 5);
    const std::string& ent = pick(rng, entity);
    article.title = {ent};
    article.body = neutral_base(spec.article_len_min, spec.article_len_max);
    insert_at_random(rng, article.body, ent);
    const std::vector<std::string>& stance = coin(rng) ? refute : confirm;
    insert_at_random(rng, article.body, pick(rng, stance));
    corpus.articles.push_back(std::move(article));
  }

  corpus.stylistic_gazetteer = pattern;
  corpus.entity_gazetteer = entity;
  return corpus;
}

void write_corpus(const SyntheticCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  save_posts((base / "posts.jsonl").string(), corpus.posts);
  save_articles((base / "articles.jsonl").string(), corpus.articles);
  auto write_gazetteer = [&](const char* file, const std::vector<std::string>& entries) {
    std::ofstream out(base / file);
    if (!out) throw std::runtime_error(std::string("cannot write ") + file);
    for (const auto& entry : entries) out << entry << "\n";
  };
  write_gazetteer("gazetteer_stylistic.txt", corpus.stylistic_gazetteer);
  write_gazetteer("gazetteer_entity.txt", corpus.entity_gazetteer);
}

}  // namespace preffend
