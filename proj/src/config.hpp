#pragma once

#include <string>

namespace preffend {

enum class Mode { Joint, PatternOnly, FactOnly };
enum class Ablation { None, RandInitMaps, NoCos, NoRev, OnlyCls };

std::string mode_name(Mode m);
std::string ablation_name(Ablation a);
bool mode_from_name(const std::string& name, Mode& out);
bool ablation_from_name(const std::string& name, Ablation& out);

struct TrainConfig {
  int layers = 2;
  double alpha = 0.5;
  double beta1 = 2.0;
  double beta2 = 1.0;
  double beta3 = 1.0;
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 30;
  unsigned long long seed = 42;
  std::string mode = "joint";
  std::string ablation = "none";
  int top_k = 5;
  int embedding_dim = 32;
  int pattern_hidden = 32;
  int fact_hidden = 32;
  int attention_hidden = 32;
  int fusion_hidden = 64;
  int early_stop_patience = 5;
  bool uniform_maps = false;  // constant 1/n maps: the plain base-model setup
  bool case_fold = false;

  Mode mode_enum() const;
  Ablation ablation_enum() const;
  // Ablations zero the corresponding weight in the total loss.
  double effective_beta2() const;
  double effective_beta3() const;

  void validate() const;  // throws std::invalid_argument
  static TrainConfig from_json_text(const std::string& text);
  static TrainConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

}  // namespace preffend
