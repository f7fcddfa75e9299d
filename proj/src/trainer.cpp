#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "logging.hpp"
#include "optimizer.hpp"

namespace preffend {

namespace fs = std::filesystem;

CorpusBundle CorpusBundle::load(const std::string& dir, const TrainConfig& config) {
  const fs::path base(dir);
  CorpusBundle bundle;
  bundle.posts = load_posts((base / "posts.jsonl").string());
  bundle.articles = load_articles((base / "articles.jsonl").string());
  bundle.stylistic = Gazetteer::load((base / "gazetteer_stylistic.txt").string(),
                                     "stylistic", config.case_fold);
  bundle.entity = Gazetteer::load((base / "gazetteer_entity.txt").string(), "entity",
                                  config.case_fold);

  for (std::size_t i = 0; i < bundle.articles.size(); ++i) {
    if (!bundle.article_by_id.emplace(bundle.articles[i].id, i).second) {
      throw std::runtime_error("corpus: duplicate article id \"" +
                               bundle.articles[i].id + "\"");
    }
  }
  for (std::size_t i = 0; i < bundle.posts.size(); ++i) {
    bundle.post_by_id.emplace(bundle.posts[i].id, i);
  }

  const fs::path cache_path = base / "evidence_cache.json";
  bool have_cache = false;
  if (fs::exists(cache_path)) {
    try {
      EvidenceCache cache = load_evidence_cache(cache_path.string());
      if (cache.top_k == config.top_k) {
        bundle.evidence = std::move(cache);
        have_cache = true;
      } else {
        log_info("evidence cache has top_k=" + std::to_string(cache.top_k) +
                 ", recomputing for top_k=" + std::to_string(config.top_k));
      }
    } catch (const std::exception& e) {
      log_warn(std::string("ignoring unreadable evidence cache: ") + e.what());
    }
  }
  if (!have_cache) {
    RetrievalIndex index = RetrievalIndex::build(bundle.articles);
    bundle.evidence.top_k = config.top_k;
    for (const auto& post : bundle.posts) {
      if (post.evidence_ids) continue;  // explicit ids bypass retrieval
      auto ranked = index.top_k(post.tokens, static_cast<std::size_t>(config.top_k));
      std::vector<std::string> ids;
      ids.reserve(ranked.size());
      for (const auto& scored : ranked) ids.push_back(scored.id);
      bundle.evidence.items[post.id] = std::move(ids);
    }
    try {
      save_evidence_cache(cache_path.string(), bundle.evidence);
    } catch (const std::exception& e) {
      log_warn(std::string("could not write evidence cache: ") + e.what());
    }
  }
  return bundle;
}

std::vector<std::size_t> CorpusBundle::split_indices(const std::string& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (posts[i].split == split) out.push_back(i);
  }
  return out;
}

Vocabulary build_vocabulary(const CorpusBundle& corpus) {
  Vocabulary vocab;
  for (const auto& post : corpus.posts) {
    if (post.split != "train") continue;
    for (const auto& token : post.tokens) vocab.add(token);
  }
  for (const auto& article : corpus.articles) {
    for (const auto& token : article.title) vocab.add(token);
    for (const auto& token : article.body) vocab.add(token);
  }
  return vocab;
}

PostInputs prepare_post(const PostRecord& post, const CorpusBundle& corpus,
                        const Vocabulary& vocab, const TrainConfig& config) {
  PostInputs inputs;
  if (post.types) {
    inputs.typed = typed_from_tags(post.tokens, *post.types);
  } else if (config.ablation_enum() == Ablation::RandInitMaps) {
    // Seeded per post id so the random partition is stable across epochs,
    // splits, and reloads of the same run.
    std::mt19937_64 rng(config.seed ^
                        (std::hash<std::string>{}(post.id) * 0x9E3779B97F4A7C15ULL));
    std::uniform_int_distribution<int> dist(0, 2);
    std::vector<TokenType> tags;
    tags.reserve(post.tokens.size());
    for (std::size_t i = 0; i < post.tokens.size(); ++i) {
      tags.push_back(static_cast<TokenType>(dist(rng)));
    }
    inputs.typed = typed_from_tags(post.tokens, tags);
  } else {
    inputs.typed = type_tokens(post.tokens, corpus.stylistic, corpus.entity);
  }

  inputs.token_indices.reserve(post.tokens.size());
  for (const auto& token : post.tokens) {
    inputs.token_indices.push_back(vocab.lookup(token));
  }

  std::vector<std::string> evidence_ids;
  if (post.evidence_ids) {
    evidence_ids = *post.evidence_ids;
  } else {
    auto it = corpus.evidence.items.find(post.id);
    if (it != corpus.evidence.items.end()) evidence_ids = it->second;
  }
  if (evidence_ids.size() > static_cast<std::size_t>(config.top_k)) {
    evidence_ids.resize(static_cast<std::size_t>(config.top_k));
  }
  for (const auto& id : evidence_ids) {
    auto it = corpus.article_by_id.find(id);
    if (it == corpus.article_by_id.end()) {
      throw std::runtime_error("post " + post.id + ": unknown evidence article \"" +
                               id + "\"");
    }
    const ArticleRecord& article = corpus.articles[it->second];
    std::vector<std::size_t> tokens;
    tokens.reserve(article.title.size() + article.body.size());
    for (const auto& token : article.title) tokens.push_back(vocab.lookup(token));
    for (const auto& token : article.body) tokens.push_back(vocab.lookup(token));
    inputs.evidence_tokens.push_back(std::move(tokens));
  }
  return inputs;
}

namespace {

std::vector<std::vector<double>> snapshot_params(const ParamRegistry& params) {
  std::vector<std::vector<double>> snap;
  snap.reserve(params.items().size());
  for (const auto& [_, tensor] : params.items()) {
    const auto vals = tensor.values();
    snap.emplace_back(vals.begin(), vals.end());
  }
  return snap;
}

void restore_params(ParamRegistry& params, const std::vector<std::vector<double>>& snap) {
  std::size_t i = 0;
  for (const auto& [_, item] : params.items()) {
    Tensor tensor = item;
    auto vals = tensor.values_mut();
    std::copy(snap[i].begin(), snap[i].end(), vals.begin());
    ++i;
  }
}

// Forward-only evaluation; parameters are read-only so posts are scored on
// a couple of worker threads and reduced in index order.
std::vector<double> predict_posts(const Model& model,
                                  const std::vector<PostInputs>& inputs) {
  std::vector<double> predictions(inputs.size(), 0.0);
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Model::Encoded enc = model.encode(inputs[i]);
      predictions[i] = model.predict(enc, enc.maps.pattern, enc.maps.fact).value();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw >= 2 && inputs.size() >= 32) {
    const std::size_t mid = inputs.size() / 2;
    std::thread half(worker, 0, mid);
    worker(mid, inputs.size());
    half.join();
  } else {
    worker(0, inputs.size());
  }
  return predictions;
}

Metrics evaluate_prepared(const Model& model, const std::vector<PostInputs>& inputs,
                          const std::vector<int>& labels) {
  std::vector<double> predictions = predict_posts(model, inputs);
  return Metrics::from_predictions(labels, predictions);
}

std::vector<PostInputs> prepare_split(const CorpusBundle& corpus,
                                      const std::vector<std::size_t>& indices,
                                      const Vocabulary& vocab,
                                      const TrainConfig& config,
                                      std::vector<int>* labels) {
  std::vector<PostInputs> inputs;
  inputs.reserve(indices.size());
  for (std::size_t idx : indices) {
    inputs.push_back(prepare_post(corpus.posts[idx], corpus, vocab, config));
    if (labels) labels->push_back(corpus.posts[idx].label);
  }
  return inputs;
}

}  // namespace

TrainResult train_model(const TrainConfig& config, const CorpusBundle& corpus,
                        const std::string& out_dir) {
  config.validate();
  const auto train_idx = corpus.split_indices("train");
  const auto val_idx = corpus.split_indices("val");
  if (train_idx.empty()) throw std::invalid_argument("train: empty train split");
  if (val_idx.empty()) throw std::invalid_argument("train: empty val split");

  Vocabulary vocab = build_vocabulary(corpus);
  TrainResult result{.epochs = {},
                     .best_val = {},
                     .best_epoch = 0,
                     .checkpoint_path = {},
                     .trained = TrainedModel{config, vocab, Model(config, vocab.size())}};
  Model& model = result.trained.model;

  std::vector<int> train_labels;
  std::vector<PostInputs> train_inputs =
      prepare_split(corpus, train_idx, vocab, config, &train_labels);
  std::vector<int> val_labels;
  std::vector<PostInputs> val_inputs =
      prepare_split(corpus, val_idx, vocab, config, &val_labels);

  AdamOptimizer optimizer(model.params(), config.learning_rate);
  std::mt19937_64 shuffle_rng(config.seed + 1);

  const double beta2 = config.effective_beta2();
  const double beta3 = config.effective_beta3();

  std::vector<std::size_t> order(train_inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_macro_f1 = -1.0;
  std::vector<std::vector<double>> best_snapshot;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double sum_cls = 0.0, sum_cos = 0.0, sum_rev = 0.0, sum_total = 0.0;
    const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      ++batch_no;
      const std::size_t end = std::min(order.size(), start + batch_size);
      Tape tape;
      Tensor batch_sum;
      for (std::size_t pos = start; pos < end; ++pos) {
        const std::size_t i = order[pos];
        Model::Forward fwd = model.forward(train_inputs[i]);
        const double label = train_labels[i];
        Tensor cls = ce_loss(label, fwd.prediction);
        Tensor cos = cos_loss(fwd.maps.pattern, fwd.maps.fact);
        Tensor rev = reversed_loss(label, fwd.swapped_prediction);
        Tensor total = total_loss(cls, cos, rev, config.beta1, beta2, beta3);
        batch_sum = batch_sum.defined() ? add(batch_sum, total) : total;
        sum_cls += cls.value();
        sum_cos += cos.value();
        sum_rev += rev.value();
        sum_total += total.value();
      }
      Tensor batch_loss = scale(batch_sum, 1.0 / static_cast<double>(end - start));
      if (!std::isfinite(batch_loss.value())) {
        throw std::runtime_error("train: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_no));
      }
      tape.backward(batch_loss);
      optimizer.step();
      model.params().zero_grads();
    }

    EpochLog log;
    log.epoch = epoch;
    const double n_train = static_cast<double>(train_inputs.size());
    log.train_loss = LossBreakdown{sum_cls / n_train, sum_cos / n_train,
                                   sum_rev / n_train, sum_total / n_train};
    log.val = evaluate_prepared(model, val_inputs, val_labels);
    result.epochs.push_back(log);

    if (log.val.macro_f1 > best_macro_f1) {
      best_macro_f1 = log.val.macro_f1;
      result.best_epoch = epoch;
      result.best_val = log.val;
      best_snapshot = snapshot_params(model.params());
    } else if (epoch - result.best_epoch >= config.early_stop_patience) {
      log_info("early stop at epoch " + std::to_string(epoch) + " (best epoch " +
               std::to_string(result.best_epoch) + ")");
      break;
    }
  }

  restore_params(model.params(), best_snapshot);

  fs::create_directories(out_dir);
  result.checkpoint_path = (fs::path(out_dir) / "model.ckpt").string();
  save_trained(result.trained, result.checkpoint_path);
  std::ofstream log_out(fs::path(out_dir) / "train_log.jsonl");
  if (!log_out) throw std::runtime_error("cannot write training log in " + out_dir);
  for (const auto& log : result.epochs) log_out << epoch_log_json(log) << "\n";

  return result;
}

Metrics evaluate_split(const TrainedModel& trained, const CorpusBundle& corpus,
                       const std::string& split) {
  const auto indices = corpus.split_indices(split);
  if (indices.empty()) {
    throw std::invalid_argument("evaluate: split \"" + split + "\" is empty");
  }
  std::vector<int> labels;
  std::vector<PostInputs> inputs =
      prepare_split(corpus, indices, trained.vocab, trained.config, &labels);
  return evaluate_prepared(trained.model, inputs, labels);
}

double mean_map_cosine(const TrainedModel& trained, const CorpusBundle& corpus,
                       const std::string& split) {
  const auto indices = corpus.split_indices(split);
  if (indices.empty()) {
    throw std::invalid_argument("map cosine: split \"" + split + "\" is empty");
  }
  double total = 0.0;
  for (std::size_t idx : indices) {
    PostInputs inputs =
        prepare_post(corpus.posts[idx], corpus, trained.vocab, trained.config);
    Model::Encoded enc = trained.model.encode(inputs);
    total += cosine(enc.maps.pattern, enc.maps.fact).value();
  }
  return total / static_cast<double>(indices.size());
}

std::string epoch_log_json(const EpochLog& log) {
  nlohmann::json j;
  j["epoch"] = log.epoch;
  j["loss"] = {{"cls", log.train_loss.cls},
               {"cos", log.train_loss.cos},
               {"rev", log.train_loss.rev},
               {"total", log.train_loss.total}};
  j["val"] = nlohmann::json::parse(log.val.to_json_text());
  return j.dump();
}

std::string AblationGrid::to_json_text() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["arms"] = nlohmann::json::array();
  for (const auto& arm : arms) {
    nlohmann::json a;
    a["name"] = arm.name;
    a["ablation"] = arm.ablation;
    a["val"] = nlohmann::json::parse(arm.val.to_json_text());
    a["test"] = nlohmann::json::parse(arm.test.to_json_text());
    j["arms"].push_back(a);
  }
  return j.dump();
}

std::string AblationGrid::to_text_table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %9s %9s %9s %7s %7s %7s %7s %7s %7s\n",
                "arm", "val_macF1", "test_acc", "test_mF1", "P_fake", "R_fake",
                "F1_fake", "P_real", "R_real", "F1_real");
  out << line;
  for (const auto& arm : arms) {
    std::snprintf(line, sizeof(line),
                  "%-16s %9.4f %9.4f %9.4f %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f\n",
                  arm.name.c_str(), arm.val.macro_f1, arm.test.accuracy,
                  arm.test.macro_f1, arm.test.fake.precision, arm.test.fake.recall,
                  arm.test.fake.f1, arm.test.real.precision, arm.test.real.recall,
                  arm.test.real.f1);
    out << line;
  }
  return out.str();
}

AblationGrid run_ablation(const TrainConfig& base_config, const CorpusBundle& corpus,
                          const std::string& out_dir) {
  static const std::pair<const char*, const char*> kArms[] = {
      {"full", "none"},
      {"rand-init-maps", "rand-init-maps"},
      {"no-cos", "no-cos"},
      {"no-rev", "no-rev"},
      {"only-cls", "only-cls"}};

  AblationGrid grid;
  grid.seed = base_config.seed;
  for (const auto& [name, ablation] : kArms) {
    TrainConfig config = base_config;
    config.ablation = ablation;
    log_info(std::string("ablation arm: ") + name);
    TrainResult result =
        train_model(config, corpus, (fs::path(out_dir) / ("arm-" + std::string(name))).string());
    AblationArm arm;
    arm.name = name;
    arm.ablation = ablation;
    arm.val = result.best_val;
    arm.test = evaluate_split(result.trained, corpus, "test");
    grid.arms.push_back(std::move(arm));
  }

  fs::create_directories(out_dir);
  std::ofstream json_out(fs::path(out_dir) / "grid.json");
  json_out << grid.to_json_text() << "\n";
  std::ofstream text_out(fs::path(out_dir) / "grid.txt");
  text_out << grid.to_text_table();
  return grid;
}

}  // namespace preffend
