/*
 * nidskit C API.
 *
 * Opaque-handle surface over the NSL-KDD intrusion-detection toolkit:
 * dataset loading, pipeline fitting (one-hot + min-max), stratified splits,
 * the four classifiers (logreg, cart, rf, gbt), evaluation reports and the
 * SVG renderers. Every function returns a status code; on failure,
 * nids_last_error() describes the problem for the calling thread.
 *
 * Handles are created by *_load / *_fit / *_train / nids_evaluate calls and
 * released with the matching *_free. Handles are immutable after creation
 * and safe to share across threads.
 */
#ifndef NIDSKIT_C_API_H
#define NIDSKIT_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* status codes */
#define NIDS_OK 0
#define NIDS_ERR_ARG 1     /* invalid arguments or configuration */
#define NIDS_ERR_DATA 2    /* parse errors, malformed or mismatched files */
#define NIDS_ERR_NUMERIC 3 /* numeric failure (training diverged) */
#define NIDS_ERR_IO 4      /* filesystem errors */

#define NIDS_NUM_CLASSES 5

/* nids_report_write flags */
#define NIDS_WRITE_TEXT 1
#define NIDS_WRITE_CSV 2
#define NIDS_WRITE_ROC 4
#define NIDS_WRITE_ALL 7

typedef struct nids_dataset nids_dataset;
typedef struct nids_pipeline nids_pipeline;
typedef struct nids_matrix nids_matrix;
typedef struct nids_model nids_model;
typedef struct nids_report nids_report;

const char* nids_version(void);

/* message for the most recent failure on this thread */
const char* nids_last_error(void);

/* worker budget for training and prediction (default 1); results are
 * identical for every thread count */
void nids_set_threads(int n);

/* fixed class order: 0 Normal, 1 DoS, 2 Probe, 3 R2L, 4 U2R */
const char* nids_class_name(int label);

/* ---- dataset ---- */

/* taxonomy_path NULL selects the built-in attack taxonomy */
int nids_dataset_load(const char* path, const char* taxonomy_path, nids_dataset** out);
void nids_dataset_free(nids_dataset* ds);
int nids_dataset_rows(const nids_dataset* ds, int64_t* out);
int nids_dataset_class_counts(const nids_dataset* ds, int64_t out[NIDS_NUM_CLASSES]);

/* ---- pipeline (encoder + scaler, fitted on training data only) ---- */

int nids_pipeline_fit(const nids_dataset* train, nids_pipeline** out);
int nids_pipeline_save(const nids_pipeline* p, const char* path);
int nids_pipeline_load(const char* path, nids_pipeline** out);
void nids_pipeline_free(nids_pipeline* p);
int nids_pipeline_dim(const nids_pipeline* p, int64_t* out);
int nids_pipeline_digest(const nids_pipeline* p, char* buf, size_t bufsize);
int nids_pipeline_transform(const nids_pipeline* p, const nids_dataset* ds, nids_matrix** out);

/* ---- design matrix ---- */

void nids_matrix_free(nids_matrix* m);
int nids_matrix_rows(const nids_matrix* m, int64_t* out);
int nids_matrix_dim(const nids_matrix* m, int64_t* out);

/* categorical tokens that fell outside the fitted vocabulary */
int nids_matrix_unseen_tokens(const nids_matrix* m, int64_t* out);

/* per class c, the validation side receives floor(fraction * n_c) rows,
 * chosen by a seeded in-class shuffle */
int nids_matrix_split_stratified(const nids_matrix* m, double valid_fraction, uint64_t seed,
                                 nids_matrix** train_out, nids_matrix** valid_out);
int nids_matrix_export_csv(const nids_matrix* m, const char* path);

/* ---- models ---- */

/* kind: "logreg" | "cart" | "rf" | "gbt"; params_json: hyperparameter object
 * (NULL or "{}" for the defaults); unknown keys are hard errors */
int nids_train(const nids_matrix* train, const char* kind, const char* params_json, uint64_t seed,
               nids_model** out);
int nids_model_save(const nids_model* m, const char* path);
int nids_model_load(const char* path, nids_model** out);
void nids_model_free(nids_model* m);
int nids_model_kind(const nids_model* m, char* buf, size_t bufsize);
int nids_model_hyperparams(const nids_model* m, char* buf, size_t bufsize); /* JSON */
int nids_model_digest(const nids_model* m, char* buf, size_t bufsize);

/* out holds rows * NIDS_NUM_CLASSES probabilities, row-major */
int nids_predict_proba(const nids_model* m, const nids_matrix* x, double* out);
/* out holds one class index per row; ties break to the lowest index */
int nids_predict(const nids_model* m, const nids_matrix* x, int32_t* out);

/* ---- evaluation ---- */

/* fails with NIDS_ERR_DATA when the model was trained against a different
 * pipeline state than the one that produced x */
int nids_evaluate(const nids_model* m, const nids_matrix* x, nids_report** out);
void nids_report_free(nids_report* r);
int nids_report_accuracy(const nids_report* r, double* out);
int nids_report_macro(const nids_report* r, double* precision, double* recall, double* f1,
                      double* auc);
int nids_report_class_metrics(const nids_report* r, int label, double* precision, double* recall,
                              double* f1, int64_t* support);
/* *defined is 0 when the class had no positives (or no negatives) and the
 * AUC is therefore undefined and excluded from the macro mean */
int nids_report_class_auc(const nids_report* r, int label, double* auc, int* defined);
/* row-major 5x5, row = true class */
int nids_report_confusion(const nids_report* r, int64_t out[NIDS_NUM_CLASSES * NIDS_NUM_CLASSES]);

/* writes <base>_report.txt, <base>_confusion.csv and five <base>_roc_<class>.csv
 * files under dir, according to flags */
int nids_report_write(const nids_report* r, const char* dir, const char* base, const char* split,
                      int flags);

/* ---- plots (render persisted CSVs, nothing else) ---- */

int nids_plot_confusion(const char* confusion_csv, const char* out_svg);
int nids_plot_roc(const char* const* roc_csvs, const char* const* names, int count,
                  const char* out_svg);

#ifdef __cplusplus
}
#endif

#endif /* NIDSKIT_C_API_H */
