/*
 * preffend — preference-aware fake news detection.
 *
 * C API over the core library: opaque handles, status codes, and JSON
 * strings for structured results. Every function that can fail returns a
 * pf_status; the matching human-readable message is available from
 * pf_last_error() on the calling thread. Strings returned through output
 * parameters are owned by the caller and must be released with
 * pf_string_free().
 */
#ifndef PREFFEND_H
#define PREFFEND_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERROR = 1,         /* runtime failure */
  PF_INVALID_INPUT = 2  /* usage or input error */
} pf_status;

PF_API const char* pf_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
PF_API const char* pf_last_error(void);

PF_API void pf_string_free(char* s);

/* level: "error" | "info" | "debug". Overrides the PREFFEND_LOG variable. */
PF_API pf_status pf_set_log_level(const char* level);

/* Generates a synthetic corpus described by a spec JSON file into out_dir
 * (posts.jsonl, articles.jsonl, gazetteer files). seed_override >= 0
 * replaces the spec seed. */
PF_API pf_status pf_generate_corpus(const char* spec_json_path, const char* out_dir,
                                    long long seed_override);

/* Trains on a corpus directory with a config JSON file. Writes the
 * checkpoint and epoch log under out_dir. On success *metrics_json_out (if
 * non-null) receives the best validation metrics. seed_override >= 0
 * replaces the config seed. */
PF_API pf_status pf_train(const char* config_json_path, const char* corpus_dir,
                          const char* out_dir, long long seed_override,
                          char** metrics_json_out);

/* Trains the five ablation arms sharing one seed and corpus; writes
 * grid.json / grid.txt under out_dir and returns the grid JSON. */
PF_API pf_status pf_ablate(const char* config_json_path, const char* corpus_dir,
                           const char* out_dir, long long seed_override,
                           char** grid_json_out);

/* A trained model bound to a corpus directory for evaluation and
 * explanation. */
typedef struct pf_model pf_model;

PF_API pf_status pf_model_open(const char* checkpoint_path, const char* corpus_dir,
                               pf_model** model_out);
PF_API void pf_model_close(pf_model* model);

/* split: "train" | "val" | "test". */
PF_API pf_status pf_model_evaluate(pf_model* model, const char* split,
                                   char** metrics_json_out);

/* Per-token preference-map report for one post id from the bound corpus. */
PF_API pf_status pf_model_explain_post(pf_model* model, const char* post_id,
                                       char** report_json_out);

/* Reports for every post in a JSON-Lines file plus the token-group
 * frequency summary. */
PF_API pf_status pf_model_explain_file(pf_model* model, const char* posts_jsonl_path,
                                       char** report_json_out);

/* Mean cosine similarity between the two preference maps over a split. */
PF_API pf_status pf_model_map_cosine(pf_model* model, const char* split,
                                     double* cosine_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PREFFEND_H */
