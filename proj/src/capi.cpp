#include "preffend/preffend.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "config.hpp"
#include "explain.hpp"
#include "logging.hpp"
#include "model.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Exceptions map onto the two failure codes: invalid_argument means the
// caller gave bad input, anything else is a runtime failure.
template <typename Fn>
pf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PF_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return PF_INVALID_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PF_ERROR;
  }
}

pf_status require_args(std::initializer_list<const void*> args) {
  for (const void* a : args) {
    if (a == nullptr) {
      g_last_error = "null argument";
      return PF_INVALID_INPUT;
    }
  }
  return PF_OK;
}

}  // namespace

struct pf_model {
  preffend::TrainedModel trained;
  preffend::CorpusBundle corpus;
};

extern "C" {

const char* pf_version(void) { return "0.1.0"; }

const char* pf_last_error(void) { return g_last_error.c_str(); }

void pf_string_free(char* s) { std::free(s); }

pf_status pf_set_log_level(const char* level) {
  if (pf_status s = require_args({level}); s != PF_OK) return s;
  if (!preffend::set_log_level(std::string(level))) {
    g_last_error = std::string("unknown log level \"") + level + "\"";
    return PF_INVALID_INPUT;
  }
  return PF_OK;
}

pf_status pf_generate_corpus(const char* spec_json_path, const char* out_dir,
                             long long seed_override) {
  if (pf_status s = require_args({spec_json_path, out_dir}); s != PF_OK) return s;
  return guarded([&]() {
    preffend::SyntheticSpec spec = preffend::SyntheticSpec::from_json_file(spec_json_path);
    if (seed_override >= 0) spec.seed = static_cast<unsigned long long>(seed_override);
    preffend::SyntheticCorpus corpus = preffend::generate_synthetic(spec);
    preffend::write_corpus(corpus, out_dir);
  });
}

pf_status pf_train(const char* config_json_path, const char* corpus_dir,
                   const char* out_dir, long long seed_override,
                   char** metrics_json_out) {
  if (pf_status s = require_args({config_json_path, corpus_dir, out_dir}); s != PF_OK) {
    return s;
  }
  return guarded([&]() {
    preffend::TrainConfig config = preffend::TrainConfig::from_json_file(config_json_path);
    if (seed_override >= 0) config.seed = static_cast<unsigned long long>(seed_override);
    preffend::CorpusBundle corpus = preffend::CorpusBundle::load(corpus_dir, config);
    preffend::TrainResult result = preffend::train_model(config, corpus, out_dir);
    if (metrics_json_out) *metrics_json_out = dup_string(result.best_val.to_json_text());
  });
}

pf_status pf_ablate(const char* config_json_path, const char* corpus_dir,
                    const char* out_dir, long long seed_override,
                    char** grid_json_out) {
  if (pf_status s = require_args({config_json_path, corpus_dir, out_dir}); s != PF_OK) {
    return s;
  }
  return guarded([&]() {
    preffend::TrainConfig config = preffend::TrainConfig::from_json_file(config_json_path);
    if (seed_override >= 0) config.seed = static_cast<unsigned long long>(seed_override);
    preffend::CorpusBundle corpus = preffend::CorpusBundle::load(corpus_dir, config);
    preffend::AblationGrid grid = preffend::run_ablation(config, corpus, out_dir);
    if (grid_json_out) *grid_json_out = dup_string(grid.to_json_text());
  });
}

pf_status pf_model_open(const char* checkpoint_path, const char* corpus_dir,
                        pf_model** model_out) {
  if (pf_status s = require_args({checkpoint_path, corpus_dir, model_out}); s != PF_OK) {
    return s;
  }
  return guarded([&]() {
    preffend::TrainedModel trained = preffend::load_trained(checkpoint_path);
    preffend::CorpusBundle corpus =
        preffend::CorpusBundle::load(corpus_dir, trained.config);
    *model_out = new pf_model{std::move(trained), std::move(corpus)};
  });
}

void pf_model_close(pf_model* model) { delete model; }

pf_status pf_model_evaluate(pf_model* model, const char* split,
                            char** metrics_json_out) {
  if (pf_status s = require_args({model, split}); s != PF_OK) return s;
  return guarded([&]() {
    preffend::Metrics metrics =
        preffend::evaluate_split(model->trained, model->corpus, split);
    if (metrics_json_out) *metrics_json_out = dup_string(metrics.to_json_text());
  });
}

pf_status pf_model_explain_post(pf_model* model, const char* post_id,
                                char** report_json_out) {
  if (pf_status s = require_args({model, post_id}); s != PF_OK) return s;
  return guarded([&]() {
    auto it = model->corpus.post_by_id.find(post_id);
    if (it == model->corpus.post_by_id.end()) {
      throw std::invalid_argument(std::string("unknown post id \"") + post_id + "\"");
    }
    preffend::ExplainReport report = preffend::explain_post(
        model->trained, model->corpus, model->corpus.posts[it->second]);
    if (report_json_out) {
      *report_json_out = dup_string(preffend::explain_report_json(report));
    }
  });
}

pf_status pf_model_explain_file(pf_model* model, const char* posts_jsonl_path,
                                char** report_json_out) {
  if (pf_status s = require_args({model, posts_jsonl_path}); s != PF_OK) return s;
  return guarded([&]() {
    std::vector<preffend::PostRecord> posts = preffend::load_posts(posts_jsonl_path);
    std::vector<preffend::ExplainReport> reports;
    reports.reserve(posts.size());
    for (const auto& post : posts) {
      reports.push_back(preffend::explain_post(model->trained, model->corpus, post));
    }
    preffend::GroupFrequency frequency = preffend::summarize_groups(reports);
    if (report_json_out) {
      *report_json_out = dup_string(preffend::explain_summary_json(reports, frequency));
    }
  });
}

pf_status pf_model_map_cosine(pf_model* model, const char* split, double* cosine_out) {
  if (pf_status s = require_args({model, split, cosine_out}); s != PF_OK) return s;
  return guarded([&]() {
    *cosine_out = preffend::mean_map_cosine(model->trained, model->corpus, split);
  });
}

}  // extern "C"
