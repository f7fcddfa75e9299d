#include "model.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace preffend {

Model::Model(const TrainConfig& config, std::size_t vocab_size)
    : config_(config), mode_(config.mode_enum()) {
  config_.validate();
  if (vocab_size == 0) {
    throw std::invalid_argument("model: empty vocabulary");
  }
  has_pattern_ = mode_ != Mode::FactOnly;
  has_fact_ = mode_ != Mode::PatternOnly;

  const auto d = static_cast<std::size_t>(config_.embedding_dim);
  const auto h = static_cast<std::size_t>(config_.pattern_hidden);
  const auto q = static_cast<std::size_t>(config_.fact_hidden);
  const auto a = static_cast<std::size_t>(config_.attention_hidden);
  const auto fusion_h = static_cast<std::size_t>(config_.fusion_hidden);

  std::mt19937_64 rng(config_.seed);
  embedding_ = params_.fan_in_uniform("embed/table", vocab_size, d, d, rng);

  for (int l = 0; l < config_.layers; ++l) {
    const std::string prefix = "gcn/layer" + std::to_string(l) + "/";
    GraphLayerParams layer;
    layer.w_stylistic = params_.fan_in_uniform(prefix + "w_stylistic", d, d, d, rng);
    layer.w_entity = params_.fan_in_uniform(prefix + "w_entity", d, d, d, rng);
    layer.w_other = params_.fan_in_uniform(prefix + "w_other", d, d, d, rng);
    layer.w_update = params_.fan_in_uniform(prefix + "w_update", d, d, d, rng);
    graph_layers_.push_back(layer);
  }

  if (has_pattern_) {
    pattern_.w_input_fwd = params_.fan_in_uniform("pattern/w_input_fwd", h, d, d, rng);
    pattern_.w_hidden_fwd = params_.fan_in_uniform("pattern/w_hidden_fwd", h, h, h, rng);
    pattern_.bias_fwd = params_.add("pattern/bias_fwd", Tensor::zeros(h, 1));
    pattern_.w_input_bwd = params_.fan_in_uniform("pattern/w_input_bwd", h, d, d, rng);
    pattern_.w_hidden_bwd = params_.fan_in_uniform("pattern/w_hidden_bwd", h, h, h, rng);
    pattern_.bias_bwd = params_.add("pattern/bias_bwd", Tensor::zeros(h, 1));
  }

  if (has_fact_) {
    fact_.w_token = params_.fan_in_uniform("fact/w_token", q, d, d, rng);
    fact_.w_score = params_.fan_in_uniform("fact/w_score", a, q + d, q + d, rng);
    fact_.v_score = params_.fan_in_uniform("fact/v_score", 1, a, a, rng);
    fact_.w_output = params_.fan_in_uniform("fact/w_output", q, q + d, q + d, rng);
    fact_.b_output = params_.add("fact/b_output", Tensor::zeros(q, 1));
  }

  std::size_t fusion_in = 0;
  if (has_pattern_) fusion_in += 2 * h;
  if (has_fact_) fusion_in += q;
  fusion_.w_hidden = params_.fan_in_uniform("fusion/w_hidden", fusion_h, fusion_in,
                                            fusion_in, rng);
  fusion_.b_hidden = params_.add("fusion/b_hidden", Tensor::zeros(fusion_h, 1));
  fusion_.w_out = params_.fan_in_uniform("fusion/w_out", 1, fusion_h, fusion_h, rng);
  fusion_.b_out = params_.add("fusion/b_out", Tensor::zeros(1, 1));
}

Model::Encoded Model::encode(const PostInputs& post) const {
  if (post.typed.size() == 0 || post.typed.size() != post.token_indices.size()) {
    throw std::invalid_argument("model: post inputs are inconsistent");
  }
  Encoded enc;
  enc.embeddings = gather_rows(embedding_, post.token_indices);

  if (config_.uniform_maps) {
    enc.maps = uniform_maps(post.typed.size());
  } else {
    HetGraphState state = init_graph(enc.embeddings, post.typed);
    for (const auto& layer : graph_layers_) {
      state = het_conv_layer(state, layer, config_.alpha);
    }
    enc.maps = readout_maps(state.correlations, post.typed);
  }

  if (has_pattern_) {
    enc.pattern_states = pattern_token_states(enc.embeddings, pattern_);
  }
  if (has_fact_) {
    enc.fact_states = fact_token_states(enc.embeddings, fact_);
    enc.evidence.reserve(post.evidence_tokens.size());
    for (const auto& tokens : post.evidence_tokens) {
      enc.evidence.push_back(evidence_vector(tokens, embedding_));
    }
  }
  return enc;
}

Tensor Model::predict(const Encoded& encoded, const Tensor& pattern_map,
                      const Tensor& fact_map, bool* retrieval_miss) const {
  std::vector<Tensor> features;
  if (has_pattern_) {
    features.push_back(pattern_forward(encoded.pattern_states, pattern_map));
  }
  if (has_fact_) {
    FactForward fact = fact_forward(encoded.fact_states, fact_map, encoded.evidence, fact_);
    if (retrieval_miss) *retrieval_miss = fact.retrieval_miss;
    features.push_back(fact.output);
  }
  Tensor joined = features.size() == 1 ? features[0] : concat_rows(features);
  return fuse_predict(joined, fusion_);
}

Model::Forward Model::forward(const PostInputs& post) const {
  Encoded enc = encode(post);
  Forward out;
  out.prediction = predict(enc, enc.maps.pattern, enc.maps.fact, &out.retrieval_miss);
  out.swapped_prediction = predict(enc, enc.maps.fact, enc.maps.pattern);
  out.maps = enc.maps;
  return out;
}

void save_trained(const TrainedModel& trained, const std::string& checkpoint_path) {
  save_checkpoint(checkpoint_path, trained.model.params());
  nlohmann::json meta;
  meta["version"] = 1;
  meta["config"] = nlohmann::json::parse(trained.config.to_json_text());
  meta["vocab"] = trained.vocab.tokens();
  std::ofstream out(checkpoint_path + ".meta.json");
  if (!out) {
    throw std::runtime_error("cannot write checkpoint metadata: " + checkpoint_path +
                             ".meta.json");
  }
  out << meta.dump() << "\n";
}

TrainedModel load_trained(const std::string& checkpoint_path) {
  std::ifstream in(checkpoint_path + ".meta.json");
  if (!in) {
    throw std::runtime_error("cannot read checkpoint metadata: " + checkpoint_path +
                             ".meta.json");
  }
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("checkpoint metadata: ") + e.what());
  }
  TrainConfig config = TrainConfig::from_json_text(meta.at("config").dump());
  Vocabulary vocab =
      Vocabulary::from_tokens(meta.at("vocab").get<std::vector<std::string>>());
  TrainedModel trained{config, vocab, Model(config, vocab.size())};
  load_checkpoint(checkpoint_path, trained.model.params());
  return trained;
}

}  // namespace preffend
