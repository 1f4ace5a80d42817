#include "nidskit/c_api.h"

#include <cstring>
#include <new>
#include <string>

#include "dataset.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "model_io.hpp"
#include "parallel.hpp"
#include "preprocess.hpp"
#include "report_io.hpp"
#include "svg_plot.hpp"
#include "taxonomy.hpp"
#include "types.hpp"

// Handle definitions: thin owning wrappers over the core types.

struct nids_dataset {
  nids::LabeledDataset ds;
};
struct nids_pipeline {
  nids::Pipeline pipeline;
};
struct nids_matrix {
  nids::DesignMatrix m;
};
struct nids_model {
  nids::TrainedModel model;
};
struct nids_report {
  nids::EvaluationReport report;
  std::string model_kind;
  std::string pipeline_digest;
  std::int64_t unseen_tokens = 0;
};

namespace {

thread_local std::string t_last_error;

int set_error(int code, const char* what) {
  t_last_error = what ? what : "unknown error";
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return NIDS_OK;
  } catch (const nids::DataError& e) {
    return set_error(NIDS_ERR_DATA, e.what());
  } catch (const nids::IoError& e) {
    return set_error(NIDS_ERR_IO, e.what());
  } catch (const nids::NumericError& e) {
    return set_error(NIDS_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(NIDS_ERR_ARG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(NIDS_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return set_error(NIDS_ERR_ARG, e.what());
  }
}

int require(bool ok, const char* what) { return ok ? NIDS_OK : set_error(NIDS_ERR_ARG, what); }

int copy_string(const std::string& value, char* buf, size_t bufsize) {
  if (!buf || bufsize == 0) return set_error(NIDS_ERR_ARG, "null output buffer");
  if (value.size() + 1 > bufsize) return set_error(NIDS_ERR_ARG, "output buffer too small");
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return NIDS_OK;
}

}  // namespace

extern "C" {

const char* nids_version(void) { return "1.0.0"; }

const char* nids_last_error(void) { return t_last_error.c_str(); }

void nids_set_threads(int n) { nids::set_max_threads(n); }

const char* nids_class_name(int label) {
  if (label < 0 || label >= NIDS_NUM_CLASSES) return nullptr;
  return nids::kClassNames[static_cast<std::size_t>(label)];
}

/* ---- dataset ---- */

int nids_dataset_load(const char* path, const char* taxonomy_path, nids_dataset** out) {
  if (int rc = require(path && out, "nids_dataset_load: null argument")) return rc;
  return guarded([&] {
    const nids::AttackTaxonomy taxonomy = taxonomy_path
                                              ? nids::AttackTaxonomy::load(taxonomy_path)
                                              : nids::AttackTaxonomy::builtin();
    auto* handle = new nids_dataset{nids::load_nslkdd(path, nids::nslkdd_schema(), taxonomy)};
    *out = handle;
  });
}

void nids_dataset_free(nids_dataset* ds) { delete ds; }

int nids_dataset_rows(const nids_dataset* ds, int64_t* out) {
  if (int rc = require(ds && out, "nids_dataset_rows: null argument")) return rc;
  *out = static_cast<int64_t>(ds->ds.size());
  return NIDS_OK;
}

int nids_dataset_class_counts(const nids_dataset* ds, int64_t out[NIDS_NUM_CLASSES]) {
  if (int rc = require(ds && out, "nids_dataset_class_counts: null argument")) return rc;
  const nids::ClassDistribution dist = nids::class_distribution(ds->ds);
  for (int k = 0; k < NIDS_NUM_CLASSES; ++k) out[k] = dist.counts[static_cast<std::size_t>(k)];
  return NIDS_OK;
}

/* ---- pipeline ---- */

int nids_pipeline_fit(const nids_dataset* train, nids_pipeline** out) {
  if (int rc = require(train && out, "nids_pipeline_fit: null argument")) return rc;
  return guarded([&] { *out = new nids_pipeline{nids::Pipeline::fit(train->ds)}; });
}

int nids_pipeline_save(const nids_pipeline* p, const char* path) {
  if (int rc = require(p && path, "nids_pipeline_save: null argument")) return rc;
  return guarded([&] { p->pipeline.save(path); });
}

int nids_pipeline_load(const char* path, nids_pipeline** out) {
  if (int rc = require(path && out, "nids_pipeline_load: null argument")) return rc;
  return guarded([&] { *out = new nids_pipeline{nids::Pipeline::load(path)}; });
}

void nids_pipeline_free(nids_pipeline* p) { delete p; }

int nids_pipeline_dim(const nids_pipeline* p, int64_t* out) {
  if (int rc = require(p && out, "nids_pipeline_dim: null argument")) return rc;
  *out = static_cast<int64_t>(p->pipeline.encoded_dim());
  return NIDS_OK;
}

int nids_pipeline_digest(const nids_pipeline* p, char* buf, size_t bufsize) {
  if (int rc = require(p != nullptr, "nids_pipeline_digest: null pipeline")) return rc;
  return copy_string(p->pipeline.digest(), buf, bufsize);
}

int nids_pipeline_transform(const nids_pipeline* p, const nids_dataset* ds, nids_matrix** out) {
  if (int rc = require(p && ds && out, "nids_pipeline_transform: null argument")) return rc;
  return guarded([&] { *out = new nids_matrix{p->pipeline.transform(ds->ds)}; });
}

/* ---- matrix ---- */

void nids_matrix_free(nids_matrix* m) { delete m; }

int nids_matrix_rows(const nids_matrix* m, int64_t* out) {
  if (int rc = require(m && out, "nids_matrix_rows: null argument")) return rc;
  *out = static_cast<int64_t>(m->m.rows);
  return NIDS_OK;
}

int nids_matrix_dim(const nids_matrix* m, int64_t* out) {
  if (int rc = require(m && out, "nids_matrix_dim: null argument")) return rc;
  *out = static_cast<int64_t>(m->m.dim);
  return NIDS_OK;
}

int nids_matrix_unseen_tokens(const nids_matrix* m, int64_t* out) {
  if (int rc = require(m && out, "nids_matrix_unseen_tokens: null argument")) return rc;
  *out = m->m.unseen_tokens;
  return NIDS_OK;
}

int nids_matrix_split_stratified(const nids_matrix* m, double valid_fraction, uint64_t seed,
                                 nids_matrix** train_out, nids_matrix** valid_out) {
  if (int rc = require(m && train_out && valid_out, "nids_matrix_split_stratified: null argument"))
    return rc;
  return guarded([&] {
    const nids::SplitIndices split =
        nids::stratified_split_indices(m->m.labels, {valid_fraction, seed});
    auto* train = new nids_matrix{nids::take_rows(m->m, split.train)};
    try {
      *valid_out = new nids_matrix{nids::take_rows(m->m, split.valid)};
    } catch (...) {
      delete train;
      throw;
    }
    *train_out = train;
  });
}

int nids_matrix_export_csv(const nids_matrix* m, const char* path) {
  if (int rc = require(m && path, "nids_matrix_export_csv: null argument")) return rc;
  return guarded([&] { nids::export_matrix_csv(m->m, path); });
}

/* ---- models ---- */

int nids_train(const nids_matrix* train, const char* kind, const char* params_json, uint64_t seed,
               nids_model** out) {
  if (int rc = require(train && kind && out, "nids_train: null argument")) return rc;
  return guarded([&] {
    *out = new nids_model{
        nids::train_model(train->m, kind, params_json ? params_json : "", seed)};
  });
}

int nids_model_save(const nids_model* m, const char* path) {
  if (int rc = require(m && path, "nids_model_save: null argument")) return rc;
  return guarded([&] { nids::save_model(m->model, path); });
}

int nids_model_load(const char* path, nids_model** out) {
  if (int rc = require(path && out, "nids_model_load: null argument")) return rc;
  return guarded([&] { *out = new nids_model{nids::load_model(path)}; });
}

void nids_model_free(nids_model* m) { delete m; }

int nids_model_kind(const nids_model* m, char* buf, size_t bufsize) {
  if (int rc = require(m != nullptr, "nids_model_kind: null model")) return rc;
  return copy_string(m->model.kind, buf, bufsize);
}

int nids_model_hyperparams(const nids_model* m, char* buf, size_t bufsize) {
  if (int rc = require(m != nullptr, "nids_model_hyperparams: null model")) return rc;
  return copy_string(m->model.hyperparams.dump(), buf, bufsize);
}

int nids_model_digest(const nids_model* m, char* buf, size_t bufsize) {
  if (int rc = require(m != nullptr, "nids_model_digest: null model")) return rc;
  return copy_string(m->model.pipeline_digest, buf, bufsize);
}

int nids_predict_proba(const nids_model* m, const nids_matrix* x, double* out) {
  if (int rc = require(m && x && out, "nids_predict_proba: null argument")) return rc;
  return guarded([&] {
    const std::vector<double> proba = nids::predict_proba(m->model, x->m);
    std::memcpy(out, proba.data(), proba.size() * sizeof(double));
  });
}

int nids_predict(const nids_model* m, const nids_matrix* x, int32_t* out) {
  if (int rc = require(m && x && out, "nids_predict: null argument")) return rc;
  return guarded([&] {
    const std::vector<std::uint8_t> labels = nids::predict(m->model, x->m);
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i];
  });
}

/* ---- evaluation ---- */

int nids_evaluate(const nids_model* m, const nids_matrix* x, nids_report** out) {
  if (int rc = require(m && x && out, "nids_evaluate: null argument")) return rc;
  return guarded([&] {
    if (m->model.pipeline_digest != x->m.pipeline_digest)
      throw nids::DataError("pipeline digest mismatch: model was trained against '" +
                            m->model.pipeline_digest + "', matrix comes from '" +
                            x->m.pipeline_digest + "'");
    const std::vector<double> proba = nids::predict_proba(m->model, x->m);
    std::vector<std::uint8_t> pred(x->m.rows);
    for (std::size_t i = 0; i < x->m.rows; ++i)
      pred[i] = nids::argmax_class({proba.data() + i * nids::kNumClasses, nids::kNumClasses});
    auto* handle = new nids_report{nids::full_report(x->m.labels, pred, proba), m->model.kind,
                                   m->model.pipeline_digest, x->m.unseen_tokens};
    *out = handle;
  });
}

void nids_report_free(nids_report* r) { delete r; }

int nids_report_accuracy(const nids_report* r, double* out) {
  if (int rc = require(r && out, "nids_report_accuracy: null argument")) return rc;
  *out = r->report.metrics.accuracy;
  return NIDS_OK;
}

int nids_report_macro(const nids_report* r, double* precision, double* recall, double* f1,
                      double* auc) {
  if (int rc = require(r != nullptr, "nids_report_macro: null report")) return rc;
  if (precision) *precision = r->report.metrics.macro_precision;
  if (recall) *recall = r->report.metrics.macro_recall;
  if (f1) *f1 = r->report.metrics.macro_f1;
  if (auc) *auc = r->report.macro_auc;
  return NIDS_OK;
}

int nids_report_class_metrics(const nids_report* r, int label, double* precision, double* recall,
                              double* f1, int64_t* support) {
  if (int rc = require(r && label >= 0 && label < NIDS_NUM_CLASSES,
                       "nids_report_class_metrics: bad argument"))
    return rc;
  const std::size_t k = static_cast<std::size_t>(label);
  if (precision) *precision = r->report.metrics.precision[k];
  if (recall) *recall = r->report.metrics.recall[k];
  if (f1) *f1 = r->report.metrics.f1[k];
  if (support) *support = r->report.metrics.support[k];
  return NIDS_OK;
}

int nids_report_class_auc(const nids_report* r, int label, double* auc, int* defined) {
  if (int rc =
          require(r && label >= 0 && label < NIDS_NUM_CLASSES, "nids_report_class_auc: bad argument"))
    return rc;
  const auto& curve = r->report.roc[static_cast<std::size_t>(label)];
  if (defined) *defined = curve.has_value() ? 1 : 0;
  if (auc) *auc = curve ? curve->auc : 0.0;
  return NIDS_OK;
}

int nids_report_confusion(const nids_report* r, int64_t out[NIDS_NUM_CLASSES * NIDS_NUM_CLASSES]) {
  if (int rc = require(r && out, "nids_report_confusion: null argument")) return rc;
  for (int i = 0; i < NIDS_NUM_CLASSES; ++i)
    for (int j = 0; j < NIDS_NUM_CLASSES; ++j)
      out[i * NIDS_NUM_CLASSES + j] =
          r->report.confusion.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return NIDS_OK;
}

int nids_report_write(const nids_report* r, const char* dir, const char* base, const char* split,
                      int flags) {
  if (int rc = require(r && dir && base, "nids_report_write: null argument")) return rc;
  return guarded([&] {
    nids::ReportContext ctx;
    ctx.model_kind = r->model_kind;
    ctx.split = split ? split : "";
    ctx.pipeline_digest = r->pipeline_digest;
    ctx.unseen_tokens = r->unseen_tokens;
    nids::write_report_files(r->report, ctx, dir, base, flags & NIDS_WRITE_TEXT,
                             flags & NIDS_WRITE_CSV, flags & NIDS_WRITE_ROC);
  });
}

/* ---- plots ---- */

int nids_plot_confusion(const char* confusion_csv, const char* out_svg) {
  if (int rc = require(confusion_csv && out_svg, "nids_plot_confusion: null argument")) return rc;
  return guarded([&] { nids::plot_confusion_svg(confusion_csv, out_svg); });
}

int nids_plot_roc(const char* const* roc_csvs, const char* const* names, int count,
                  const char* out_svg) {
  if (int rc = require(roc_csvs && names && count > 0 && out_svg, "nids_plot_roc: bad argument"))
    return rc;
  return guarded([&] {
    std::vector<std::string> csvs(roc_csvs, roc_csvs + count);
    std::vector<std::string> labels(names, names + count);
    nids::plot_roc_svg(csvs, labels, out_svg);
  });
}

}  // extern "C"
