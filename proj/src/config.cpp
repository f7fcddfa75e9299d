#include "config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace preffend {

using nlohmann::json;

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Joint: return "joint";
    case Mode::PatternOnly: return "pattern-only";
    case Mode::FactOnly: return "fact-only";
  }
  return "?";
}

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::None: return "none";
    case Ablation::RandInitMaps: return "rand-init-maps";
    case Ablation::NoCos: return "no-cos";
    case Ablation::NoRev: return "no-rev";
    case Ablation::OnlyCls: return "only-cls";
  }
  return "?";
}

bool mode_from_name(const std::string& name, Mode& out) {
  if (name == "joint") out = Mode::Joint;
  else if (name == "pattern-only") out = Mode::PatternOnly;
  else if (name == "fact-only") out = Mode::FactOnly;
  else return false;
  return true;
}

bool ablation_from_name(const std::string& name, Ablation& out) {
  if (name == "none") out = Ablation::None;
  else if (name == "rand-init-maps") out = Ablation::RandInitMaps;
  else if (name == "no-cos") out = Ablation::NoCos;
  else if (name == "no-rev") out = Ablation::NoRev;
  else if (name == "only-cls") out = Ablation::OnlyCls;
  else return false;
  return true;
}

Mode TrainConfig::mode_enum() const {
  Mode m;
  if (!mode_from_name(mode, m)) {
    throw std::invalid_argument("config: unknown mode \"" + mode + "\"");
  }
  return m;
}

Ablation TrainConfig::ablation_enum() const {
  Ablation a;
  if (!ablation_from_name(ablation, a)) {
    throw std::invalid_argument("config: unknown ablation \"" + ablation + "\"");
  }
  return a;
}

double TrainConfig::effective_beta2() const {
  Ablation a = ablation_enum();
  return (a == Ablation::NoCos || a == Ablation::OnlyCls) ? 0.0 : beta2;
}

double TrainConfig::effective_beta3() const {
  Ablation a = ablation_enum();
  return (a == Ablation::NoRev || a == Ablation::OnlyCls) ? 0.0 : beta3;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (layers < 1) fail("layers must be >= 1");
  if (alpha < 0.0 || alpha > 1.0) fail("alpha must be in [0,1]");
  if (beta1 < 0.0 || beta2 < 0.0 || beta3 < 0.0) fail("loss weights must be nonnegative");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (top_k < 1) fail("top_k must be >= 1");
  if (embedding_dim < 1 || pattern_hidden < 1 || fact_hidden < 1 ||
      attention_hidden < 1 || fusion_hidden < 1) {
    fail("all dimensions must be >= 1");
  }
  if (early_stop_patience < 1) fail("early_stop_patience must be >= 1");
  mode_enum();
  ablation_enum();
}

namespace {

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("config: missing key \"") + key + "\"");
  }
  return *it;
}

}  // namespace

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  TrainConfig cfg;
  // Unknown keys are rejected so a typo cannot silently fall back to a
  // default in the middle of an experiment grid.
  static const char* known[] = {
      "layers", "alpha", "beta1", "beta2", "beta3", "learning_rate",
      "batch_size", "epochs", "seed", "mode", "ablation", "top_k",
      "embedding_dim", "pattern_hidden", "fact_hidden", "attention_hidden",
      "fusion_hidden", "early_stop_patience", "uniform_maps", "case_fold"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || (it.key() == k);
    if (!ok) throw std::invalid_argument("config: unknown key \"" + it.key() + "\"");
  }

  try {
    if (j.contains("layers")) cfg.layers = j["layers"].get<int>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("beta1")) cfg.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) cfg.beta2 = j["beta2"].get<double>();
    if (j.contains("beta3")) cfg.beta3 = j["beta3"].get<double>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long long>();
    if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
    if (j.contains("ablation")) cfg.ablation = j["ablation"].get<std::string>();
    if (j.contains("top_k")) cfg.top_k = j["top_k"].get<int>();
    if (j.contains("embedding_dim")) cfg.embedding_dim = j["embedding_dim"].get<int>();
    if (j.contains("pattern_hidden")) cfg.pattern_hidden = j["pattern_hidden"].get<int>();
    if (j.contains("fact_hidden")) cfg.fact_hidden = j["fact_hidden"].get<int>();
    if (j.contains("attention_hidden")) cfg.attention_hidden = j["attention_hidden"].get<int>();
    if (j.contains("fusion_hidden")) cfg.fusion_hidden = j["fusion_hidden"].get<int>();
    if (j.contains("early_stop_patience")) cfg.early_stop_patience = j["early_stop_patience"].get<int>();
    if (j.contains("uniform_maps")) cfg.uniform_maps = j["uniform_maps"].get<bool>();
    if (j.contains("case_fold")) cfg.case_fold = j["case_fold"].get<bool>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad value type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TrainConfig TrainConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string TrainConfig::to_json_text() const {
  json j;
  j["layers"] = layers;
  j["alpha"] = alpha;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["beta3"] = beta3;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["mode"] = mode;
  j["ablation"] = ablation;
  j["top_k"] = top_k;
  j["embedding_dim"] = embedding_dim;
  j["pattern_hidden"] = pattern_hidden;
  j["fact_hidden"] = fact_hidden;
  j["attention_hidden"] = attention_hidden;
  j["fusion_hidden"] = fusion_hidden;
  j["early_stop_patience"] = early_stop_patience;
  j["uniform_maps"] = uniform_maps;
  j["case_fold"] = case_fold;
  return j.dump();
}

}  // namespace preffend
