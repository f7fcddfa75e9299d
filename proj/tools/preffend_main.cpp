// Command-line front end. Talks to engine exclusively through the public
// C API in preffend/preffend.h.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "preffend/preffend.h"

namespace {

int fail(pf_status status) {
  std::fprintf(stderr, "preffend: %s\n", pf_last_error());
  return static_cast<int>(status);
}

void print_owned(char* json_text, bool as_json) {
  if (!json_text) return;
  if (as_json) std::printf("%s\n", json_text);
  pf_string_free(json_text);
}

// Rebuilds the aligned per-token table from an explain report JSON.
void print_explain_text(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  static const char* kShades[] = {" ", "░", "▒", "▓", "█"};
  double max_score = 0.0;
  for (const auto& t : j["tokens"]) {
    max_score = std::max({max_score, t["pattern_score"].get<double>(),
                          t["fact_score"].get<double>()});
  }
  auto shade = [max_score](double s) {
    if (max_score <= 0.0) return kShades[0];
    int level = static_cast<int>(s / max_score * 4.0 + 0.5);
    if (level < 0) level = 0;
    if (level > 4) level = 4;
    return kShades[level];
  };
  std::printf("post %s  label=%d  prediction=%.4f%s\n",
              j["post_id"].get<std::string>().c_str(), j["label"].get<int>(),
              j["prediction"].get<double>(),
              j["retrieval_miss"].get<bool>() ? "  (retrieval miss)" : "");
  std::size_t width = 5;
  for (const auto& t : j["tokens"]) {
    width = std::max(width, t["token"].get<std::string>().size());
  }
  std::printf("%-*s type  %-10s  %-10s  group\n", static_cast<int>(width), "token",
              "m_P", "m_F");
  for (const auto& t : j["tokens"]) {
    const double ps = t["pattern_score"].get<double>();
    const double fs = t["fact_score"].get<double>();
    std::printf("%-*s   %s   %.4f %s  %.4f %s  %s\n", static_cast<int>(width),
                t["token"].get<std::string>().c_str(),
                t["type"].get<std::string>().c_str(), ps, shade(ps), fs, shade(fs),
                t["group"].get<std::string>().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* level = std::getenv("PREFFEND_LOG")) {
    pf_set_log_level(level);
  }

  CLI::App app{"preffend: preference-gated pattern/fact fake news detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pf_version()));

  std::string config_path, corpus_dir, out_dir, split = "test", format = "json";
  std::string checkpoint_path, post_id, posts_file;
  long long seed_override = -1;

  auto add_common = [&](CLI::App* cmd, bool with_config, bool with_corpus,
                        bool with_out) {
    if (with_config) {
      cmd->add_option("--config", config_path, "Path to JSON config")->required();
    }
    if (with_corpus) {
      cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    }
    if (with_out) cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed", seed_override, "Seed override");
    cmd->add_option("--format", format, "Output format: json|text")
        ->check(CLI::IsMember({"json", "text"}));
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  add_common(gen, true, false, true);

  CLI::App* train = app.add_subcommand("train", "Train a model");
  add_common(train, true, true, true);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  add_common(eval, false, true, false);
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval->add_option("--split", split, "Split name: train|val|test");

  CLI::App* ablate = app.add_subcommand("ablate", "Run the ablation grid");
  add_common(ablate, true, true, true);

  CLI::App* explain = app.add_subcommand("explain", "Preference-map report");
  add_common(explain, false, true, false);
  explain->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  explain->add_option("--post", post_id, "Post id to explain");
  explain->add_option("--file", posts_file, "JSONL file of posts to explain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) {
    pf_status s = pf_generate_corpus(config_path.c_str(), out_dir.c_str(), seed_override);
    if (s != PF_OK) return fail(s);
    std::printf("{\"out_dir\":\"%s\"}\n", out_dir.c_str());
    return 0;
  }

  if (train->parsed()) {
    char* metrics = nullptr;
    pf_status s = pf_train(config_path.c_str(), corpus_dir.c_str(), out_dir.c_str(),
                           seed_override, &metrics);
    if (s != PF_OK) return fail(s);
    print_owned(metrics, true);
    return 0;
  }

  if (eval->parsed()) {
    pf_model* model = nullptr;
    pf_status s = pf_model_open(checkpoint_path.c_str(), corpus_dir.c_str(), &model);
    if (s != PF_OK) return fail(s);
    char* metrics = nullptr;
    s = pf_model_evaluate(model, split.c_str(), &metrics);
    pf_model_close(model);
    if (s != PF_OK) return fail(s);
    print_owned(metrics, true);
    return 0;
  }

  if (ablate->parsed()) {
    char* grid = nullptr;
    pf_status s = pf_ablate(config_path.c_str(), corpus_dir.c_str(), out_dir.c_str(),
                            seed_override, &grid);
    if (s != PF_OK) return fail(s);
    if (grid && format == "text") {
      std::string dump(grid);
      pf_string_free(grid);
      auto j = nlohmann::json::parse(dump);
      std::printf("%-16s %9s %9s\n", "arm", "val_macF1", "test_mF1");
      for (const auto& arm : j["arms"]) {
        std::printf("%-16s %9.4f %9.4f\n", arm["name"].get<std::string>().c_str(),
                    arm["val"]["macro_f1"].get<double>(),
                    arm["test"]["macro_f1"].get<double>());
      }
    } else {
      print_owned(grid, true);
    }
    return 0;
  }

  if (explain->parsed()) {
    if (post_id.empty() == posts_file.empty()) {
      std::fprintf(stderr, "preffend: explain needs exactly one of --post / --file\n");
      return 2;
    }
    pf_model* model = nullptr;
    pf_status s = pf_model_open(checkpoint_path.c_str(), corpus_dir.c_str(), &model);
    if (s != PF_OK) return fail(s);
    char* report = nullptr;
    if (!post_id.empty()) {
      s = pf_model_explain_post(model, post_id.c_str(), &report);
    } else {
      s = pf_model_explain_file(model, posts_file.c_str(), &report);
    }
    pf_model_close(model);
    if (s != PF_OK) return fail(s);
    if (report && format == "text" && !post_id.empty()) {
      std::string dump(report);
      pf_string_free(report);
      print_explain_text(dump);
    } else {
      print_owned(report, true);
    }
    return 0;
  }

  return 2;
}
