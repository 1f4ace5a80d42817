// nidskit experiment CLI.
//
// Reproducible NSL-KDD experiment runner over the nidskit shared library:
//   prep     fit the preprocessing pipeline on the training file
//   train    train one model (or all four) on the 90% stratified partition
//   eval     evaluate a trained model on the validation or test split
//   compare  rank several trained models on one split
//   plot     render persisted report CSVs as SVG figures
//
// Exit codes: 0 success, 1 usage/configuration error, 2 data error,
// 3 numeric failure.

#include <nidskit/c_api.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int exit_code, const std::string& message) {
  throw CliError{exit_code, message};
}

// maps a C API status to the documented exit codes
void check(int rc, const std::string& what) {
  if (rc == NIDS_OK) return;
  const std::string detail = std::string(nids_last_error());
  const int exit_code = rc == NIDS_ERR_ARG ? 1 : rc == NIDS_ERR_NUMERIC ? 3 : 2;
  fail(exit_code, what + ": " + detail);
}

// RAII wrappers over the opaque handles
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    std::swap(ptr, other.ptr);
    return *this;
  }
  ~Handle() {
    if (ptr) Free(ptr);
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Dataset = Handle<nids_dataset, nids_dataset_free>;
using PipelineHandle = Handle<nids_pipeline, nids_pipeline_free>;
using Matrix = Handle<nids_matrix, nids_matrix_free>;
using Model = Handle<nids_model, nids_model_free>;
using Report = Handle<nids_report, nids_report_free>;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

const std::vector<std::string> kModelKinds = {"logreg", "cart", "rf", "gbt"};

// per-section key whitelists; an unknown key anywhere is a hard error
const std::map<std::string, std::vector<std::string>> kConfigSections = {
    {"", {"paths", "seed", "validation_fraction", "threads", "model", "outputs", "logreg", "cart",
          "rf", "gbt"}},
    {"paths", {"train", "test", "out", "taxonomy", "pipeline"}},
    {"outputs", {"report", "csv", "roc", "plots"}},
    {"logreg",
     {"lambda", "max_iters", "tolerance", "initial_step", "backtrack", "armijo", "step_growth"}},
    {"cart", {"max_depth", "min_samples_leaf", "min_samples_split"}},
    {"rf", {"n_trees", "mtry", "max_depth", "min_samples_leaf", "min_samples_split", "bootstrap"}},
    {"gbt",
     {"n_rounds", "max_depth", "learning_rate", "subsample", "colsample", "lambda",
      "min_child_weight"}},
};

struct Config {
  std::string train_file;
  std::string test_file;
  std::string out_dir = "out";
  std::string taxonomy_file;
  std::string pipeline_file;  // default: <out>/pipeline.json
  std::uint64_t seed = 42;
  double validation_fraction = 0.10;
  int threads = 1;
  std::string model = "all";
  bool out_report = true;
  bool out_csv = true;
  bool out_roc = true;
  bool out_plots = false;
  json model_params = json::object();  // one object per kind

  std::string pipeline_path() const {
    return pipeline_file.empty() ? (fs::path(out_dir) / "pipeline.json").string() : pipeline_file;
  }
  std::string model_path(const std::string& kind) const {
    return (fs::path(out_dir) / (kind + ".model")).string();
  }
  std::string params_for(const std::string& kind) const {
    return model_params.contains(kind) ? model_params.at(kind).dump() : "{}";
  }
};

void validate_keys(const json& object, const std::string& section) {
  const auto it = kConfigSections.find(section);
  if (it == kConfigSections.end()) fail(1, "internal: unknown config section " + section);
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool known = false;
    for (const auto& k : it->second) known = known || k == key;
    if (!known)
      fail(1, "unknown config key '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

Config load_config(const std::string& path) {
  Config cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) fail(2, "cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(1, "config parse error in " + path + ": " + e.what());
  }
  if (!doc.is_object()) fail(1, "config root must be a JSON object");
  validate_keys(doc, "");
  try {
    if (doc.contains("paths")) {
      validate_keys(doc.at("paths"), "paths");
      const json& paths = doc.at("paths");
      cfg.train_file = paths.value("train", cfg.train_file);
      cfg.test_file = paths.value("test", cfg.test_file);
      cfg.out_dir = paths.value("out", cfg.out_dir);
      cfg.taxonomy_file = paths.value("taxonomy", cfg.taxonomy_file);
      cfg.pipeline_file = paths.value("pipeline", cfg.pipeline_file);
    }
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.validation_fraction = doc.value("validation_fraction", cfg.validation_fraction);
    cfg.threads = doc.value("threads", cfg.threads);
    cfg.model = doc.value("model", cfg.model);
    if (doc.contains("outputs")) {
      validate_keys(doc.at("outputs"), "outputs");
      const json& outputs = doc.at("outputs");
      cfg.out_report = outputs.value("report", cfg.out_report);
      cfg.out_csv = outputs.value("csv", cfg.out_csv);
      cfg.out_roc = outputs.value("roc", cfg.out_roc);
      cfg.out_plots = outputs.value("plots", cfg.out_plots);
    }
    for (const auto& kind : kModelKinds)
      if (doc.contains(kind)) {
        validate_keys(doc.at(kind), kind);
        cfg.model_params[kind] = doc.at(kind);
      }
  } catch (const json::exception& e) {
    fail(1, "bad config value: " + std::string(e.what()));
  }
  return cfg;
}

std::vector<std::string> selected_models(const Config& cfg) {
  if (cfg.model == "all") return kModelKinds;
  for (const auto& kind : kModelKinds)
    if (cfg.model == kind) return {kind};
  fail(1, "unknown model '" + cfg.model + "' (expected logreg, cart, rf, gbt or all)");
}

// ---------------------------------------------------------------------------
// shared steps
// ---------------------------------------------------------------------------

Dataset load_dataset(const Config& cfg, const std::string& path, const std::string& role) {
  if (path.empty())
    fail(1, "no " + role + " file configured (set paths." + role + " or --" + role + ")");
  Dataset ds;
  check(nids_dataset_load(path.c_str(),
                          cfg.taxonomy_file.empty() ? nullptr : cfg.taxonomy_file.c_str(),
                          ds.out()),
        "loading " + path);
  return ds;
}

PipelineHandle load_pipeline(const Config& cfg) {
  PipelineHandle p;
  check(nids_pipeline_load(cfg.pipeline_path().c_str(), p.out()),
        "loading pipeline " + cfg.pipeline_path());
  return p;
}

struct SplitMatrices {
  Matrix train;
  Matrix valid;
};

SplitMatrices transform_and_split(const Config& cfg, const PipelineHandle& pipeline,
                                  const Dataset& train_ds) {
  Matrix full;
  check(nids_pipeline_transform(pipeline.get(), train_ds.get(), full.out()),
        "transforming train data");
  SplitMatrices split;
  check(nids_matrix_split_stratified(full.get(), cfg.validation_fraction, cfg.seed,
                                     split.train.out(), split.valid.out()),
        "stratified split");
  return split;
}

void print_class_counts(const Dataset& ds) {
  int64_t rows = 0;
  check(nids_dataset_rows(ds.get(), &rows), "row count");
  int64_t counts[NIDS_NUM_CLASSES];
  check(nids_dataset_class_counts(ds.get(), counts), "class counts");
  for (int k = 0; k < NIDS_NUM_CLASSES; ++k)
    std::printf("  %-7s %8lld  (%6.2f%%)\n", nids_class_name(k),
                static_cast<long long>(counts[k]),
                100.0 * static_cast<double>(counts[k]) / static_cast<double>(rows));
}

struct Metrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0, auc = 0;
};

Metrics report_metrics(const Report& report) {
  Metrics m;
  check(nids_report_accuracy(report.get(), &m.accuracy), "report accuracy");
  check(nids_report_macro(report.get(), &m.precision, &m.recall, &m.f1, &m.auc), "report macros");
  return m;
}

void print_report_summary(const std::string& kind, const Report& report) {
  const Metrics m = report_metrics(report);
  std::printf("%-7s accuracy %.4f  macro P %.4f  R %.4f  F1 %.4f  AUC %.4f\n", kind.c_str(),
              m.accuracy, m.precision, m.recall, m.f1, m.auc);
  std::printf("  %-7s %10s %10s %10s %10s %8s\n", "class", "precision", "recall", "f1", "support",
              "auc");
  for (int k = 0; k < NIDS_NUM_CLASSES; ++k) {
    double p, r, f1;
    int64_t support;
    check(nids_report_class_metrics(report.get(), k, &p, &r, &f1, &support), "class metrics");
    double auc;
    int defined;
    check(nids_report_class_auc(report.get(), k, &auc, &defined), "class auc");
    char auc_text[32];
    if (defined)
      std::snprintf(auc_text, sizeof(auc_text), "%8.4f", auc);
    else
      std::snprintf(auc_text, sizeof(auc_text), "%8s", "undef");
    std::printf("  %-7s %10.4f %10.4f %10.4f %10lld %s\n", nids_class_name(k), p, r, f1,
                static_cast<long long>(support), auc_text);
  }
}

// Published reference results on the official test partition for these four
// model configurations (accuracy, macro precision/recall/F1, macro AUC).
const std::map<std::string, Metrics> kReferenceTestMetrics = {
    {"logreg", {0.857, 0.623, 0.550, 0.582, 0.90}},
    {"cart", {0.899, 0.724, 0.701, 0.712, 0.93}},
    {"rf", {0.971, 0.885, 0.870, 0.877, 0.987}},
    {"gbt", {0.986, 0.941, 0.928, 0.934, 0.995}},
};

void print_reference_deltas(const std::string& kind, const Metrics& measured) {
  const auto it = kReferenceTestMetrics.find(kind);
  if (it == kReferenceTestMetrics.end()) return;
  const Metrics& ref = it->second;
  std::printf("  reference deltas (measured - published):\n");
  std::printf("    accuracy %+.4f  precision %+.4f  recall %+.4f  f1 %+.4f  auc %+.4f\n",
              measured.accuracy - ref.accuracy, measured.precision - ref.precision,
              measured.recall - ref.recall, measured.f1 - ref.f1, measured.auc - ref.auc);
}

std::string model_kind(const Model& model) {
  char buf[32];
  check(nids_model_kind(model.get(), buf, sizeof(buf)), "model kind");
  return buf;
}

void write_plots(const std::string& out_dir, const std::string& base) {
  const std::string prefix = (fs::path(out_dir) / base).string();
  check(nids_plot_confusion((prefix + "_confusion.csv").c_str(),
                            (prefix + "_confusion.svg").c_str()),
        "rendering confusion plot");
  std::vector<std::string> csvs;
  std::vector<const char*> csv_ptrs, name_ptrs;
  for (int k = 0; k < NIDS_NUM_CLASSES; ++k) {
    csvs.push_back(prefix + "_roc_" + nids_class_name(k) + ".csv");
    name_ptrs.push_back(nids_class_name(k));
  }
  for (const auto& csv : csvs) csv_ptrs.push_back(csv.c_str());
  check(nids_plot_roc(csv_ptrs.data(), name_ptrs.data(), NIDS_NUM_CLASSES,
                      (prefix + "_roc.svg").c_str()),
        "rendering ROC plot");
  std::printf("  plots: %s_confusion.svg, %s_roc.svg\n", prefix.c_str(), prefix.c_str());
}

int report_flags(const Config& cfg) {
  int flags = 0;
  if (cfg.out_report) flags |= NIDS_WRITE_TEXT;
  if (cfg.out_csv) flags |= NIDS_WRITE_CSV;
  if (cfg.out_roc) flags |= NIDS_WRITE_ROC;
  return flags;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

int cmd_prep(const Config& cfg) {
  fs::create_directories(cfg.out_dir);
  const Dataset train = load_dataset(cfg, cfg.train_file, "train");
  int64_t rows = 0;
  check(nids_dataset_rows(train.get(), &rows), "row count");
  std::printf("train: %s (%lld rows)\n", cfg.train_file.c_str(), static_cast<long long>(rows));
  print_class_counts(train);

  PipelineHandle pipeline;
  check(nids_pipeline_fit(train.get(), pipeline.out()), "fitting pipeline");
  int64_t dim = 0;
  check(nids_pipeline_dim(pipeline.get(), &dim), "pipeline dim");
  char digest[64];
  check(nids_pipeline_digest(pipeline.get(), digest, sizeof(digest)), "pipeline digest");
  check(nids_pipeline_save(pipeline.get(), cfg.pipeline_path().c_str()), "saving pipeline");
  std::printf("encoded dimension d = %lld\n", static_cast<long long>(dim));
  std::printf("pipeline: %s (digest %s)\n", cfg.pipeline_path().c_str(), digest);

  Matrix train_matrix;
  check(nids_pipeline_transform(pipeline.get(), train.get(), train_matrix.out()),
        "transforming train data");
  int64_t unseen = 0;
  check(nids_matrix_unseen_tokens(train_matrix.get(), &unseen), "unseen count");
  std::printf("unseen categorical tokens in train: %lld\n", static_cast<long long>(unseen));

  if (!cfg.test_file.empty()) {
    const Dataset test = load_dataset(cfg, cfg.test_file, "test");
    int64_t test_rows = 0;
    check(nids_dataset_rows(test.get(), &test_rows), "row count");
    Matrix test_matrix;
    check(nids_pipeline_transform(pipeline.get(), test.get(), test_matrix.out()),
          "transforming test data");
    check(nids_matrix_unseen_tokens(test_matrix.get(), &unseen), "unseen count");
    std::printf("test: %s (%lld rows)\n", cfg.test_file.c_str(),
                static_cast<long long>(test_rows));
    print_class_counts(test);
    std::printf("unseen categorical tokens in test: %lld\n", static_cast<long long>(unseen));
  }
  return 0;
}

int cmd_train(const Config& cfg) {
  fs::create_directories(cfg.out_dir);
  const PipelineHandle pipeline = load_pipeline(cfg);
  const Dataset train_ds = load_dataset(cfg, cfg.train_file, "train");
  const SplitMatrices split = transform_and_split(cfg, pipeline, train_ds);
  int64_t train_rows = 0, valid_rows = 0;
  check(nids_matrix_rows(split.train.get(), &train_rows), "rows");
  check(nids_matrix_rows(split.valid.get(), &valid_rows), "rows");
  std::printf("stratified split: %lld train / %lld validation rows (fraction %.2f, seed %llu)\n",
              static_cast<long long>(train_rows), static_cast<long long>(valid_rows),
              cfg.validation_fraction, static_cast<unsigned long long>(cfg.seed));

  for (const auto& kind : selected_models(cfg)) {
    const auto start = std::chrono::steady_clock::now();
    Model model;
    check(nids_train(split.train.get(), kind.c_str(), cfg.params_for(kind).c_str(), cfg.seed,
                     model.out()),
          "training " + kind);
    const double train_seconds = seconds_since(start);

    const std::string path = cfg.model_path(kind);
    check(nids_model_save(model.get(), path.c_str()), "saving " + path);

    // wall-clock sidecar; deliberately not part of the deterministic outputs
    json timing = {{"kind", kind}, {"train_seconds", train_seconds}, {"rows", train_rows}};
    std::ofstream(path + ".timing.json") << timing.dump(2) << "\n";

    Report report;
    check(nids_evaluate(model.get(), split.valid.get(), report.out()), "evaluating " + kind);
    std::printf("\n[%s] trained in %.2fs -> %s\n", kind.c_str(), train_seconds, path.c_str());
    print_report_summary(kind, report);
  }
  return 0;
}

int cmd_eval(const Config& cfg, const std::string& model_file, const std::string& split_name) {
  const PipelineHandle pipeline = load_pipeline(cfg);
  Model model;
  check(nids_model_load(model_file.c_str(), model.out()), "loading model " + model_file);
  const std::string kind = model_kind(model);

  Matrix target;
  int64_t unseen = 0;
  if (split_name == "valid") {
    const Dataset train_ds = load_dataset(cfg, cfg.train_file, "train");
    SplitMatrices split = transform_and_split(cfg, pipeline, train_ds);
    target = std::move(split.valid);
  } else if (split_name == "test") {
    const Dataset test_ds = load_dataset(cfg, cfg.test_file, "test");
    check(nids_pipeline_transform(pipeline.get(), test_ds.get(), target.out()),
          "transforming test data");
  } else {
    fail(1, "unknown split '" + split_name + "' (expected valid or test)");
  }
  check(nids_matrix_unseen_tokens(target.get(), &unseen), "unseen count");

  Report report;
  check(nids_evaluate(model.get(), target.get(), report.out()), "evaluating " + kind);

  fs::create_directories(cfg.out_dir);
  const std::string base = kind + "_" + split_name;
  check(nids_report_write(report.get(), cfg.out_dir.c_str(), base.c_str(), split_name.c_str(),
                          report_flags(cfg)),
        "writing report files");

  std::printf("split: %s   unseen categorical tokens: %lld\n", split_name.c_str(),
              static_cast<long long>(unseen));
  print_report_summary(kind, report);
  std::printf("artifacts: %s/%s_report.txt, _confusion.csv, 5x _roc_<class>.csv\n",
              cfg.out_dir.c_str(), base.c_str());
  if (split_name == "test") print_reference_deltas(kind, report_metrics(report));
  if (cfg.out_plots) write_plots(cfg.out_dir, base);
  return 0;
}

int cmd_compare(const Config& cfg, const std::vector<std::string>& model_files,
                const std::string& split_name) {
  if (model_files.size() < 2) fail(1, "compare needs at least two model files");
  const PipelineHandle pipeline = load_pipeline(cfg);

  Matrix target;
  if (split_name == "valid") {
    const Dataset train_ds = load_dataset(cfg, cfg.train_file, "train");
    SplitMatrices split = transform_and_split(cfg, pipeline, train_ds);
    target = std::move(split.valid);
  } else if (split_name == "test") {
    const Dataset test_ds = load_dataset(cfg, cfg.test_file, "test");
    check(nids_pipeline_transform(pipeline.get(), test_ds.get(), target.out()),
          "transforming test data");
  } else {
    fail(1, "unknown split '" + split_name + "' (expected valid or test)");
  }
  int64_t rows = 0;
  check(nids_matrix_rows(target.get(), &rows), "rows");

  struct Row {
    std::string kind;
    Metrics m;
    double train_s = std::nan("");
    double predict_s = 0;
  };
  std::vector<Row> table;
  std::vector<int32_t> scratch(static_cast<std::size_t>(rows));
  for (const auto& file : model_files) {
    Model model;
    check(nids_model_load(file.c_str(), model.out()), "loading model " + file);
    Row row;
    row.kind = model_kind(model);

    const auto start = std::chrono::steady_clock::now();
    check(nids_predict(model.get(), target.get(), scratch.data()), "predicting with " + row.kind);
    row.predict_s = seconds_since(start);

    Report report;
    check(nids_evaluate(model.get(), target.get(), report.out()), "evaluating " + row.kind);
    row.m = report_metrics(report);

    std::ifstream timing(file + ".timing.json");
    if (timing) {
      try {
        row.train_s = json::parse(timing).value("train_seconds", row.train_s);
      } catch (const json::exception&) {
        // sidecar is best-effort metadata
      }
    }
    table.push_back(row);
  }
  std::stable_sort(table.begin(), table.end(),
                   [](const Row& a, const Row& b) { return a.m.accuracy > b.m.accuracy; });

  fs::create_directories(cfg.out_dir);
  const std::string csv_path = (fs::path(cfg.out_dir) / "compare.csv").string();
  {
    std::ofstream csv(csv_path);
    csv << "model,accuracy,precision_macro,recall_macro,f1_macro,auc_macro,train_s,predict_s\n";
    for (const Row& row : table) {
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f,%.3f\n",
                    row.kind.c_str(), row.m.accuracy, row.m.precision, row.m.recall, row.m.f1,
                    row.m.auc, row.train_s, row.predict_s);
      csv << line;
    }
  }

  std::printf("%-8s %9s %10s %8s %8s %9s %9s %10s\n", "model", "accuracy", "precision", "recall",
              "f1", "auc", "train_s", "predict_s");
  for (const Row& row : table)
    std::printf("%-8s %9.4f %10.4f %8.4f %8.4f %9.4f %9.3f %10.3f\n", row.kind.c_str(),
                row.m.accuracy, row.m.precision, row.m.recall, row.m.f1, row.m.auc, row.train_s,
                row.predict_s);
  std::printf("comparison table: %s\n", csv_path.c_str());
  return 0;
}

int cmd_plot(const Config& cfg, const std::string& base) {
  const std::string prefix = (fs::path(cfg.out_dir) / base).string();
  if (!fs::exists(prefix + "_confusion.csv"))
    fail(2, "missing input: " + prefix + "_confusion.csv (run eval first)");
  write_plots(cfg.out_dir, base);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nidskit: NSL-KDD multiclass intrusion-detection experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nids_version()));

  std::string config_path, train_file, test_file, out_dir, taxonomy, model_name, model_file;
  std::string split_name = "valid", plot_name;
  std::vector<std::string> compare_files;
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false, plots_flag = false;

  app.add_option("--config", config_path, "experiment config file (JSON)");
  app.add_option("--train", train_file, "training data file (NSL-KDD format)");
  app.add_option("--test", test_file, "test data file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--taxonomy", taxonomy, "attack taxonomy file (defaults to the built-in table)");
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&](std::uint64_t v) {
        seed = v;
        seed_set = true;
      },
      "master seed");
  app.add_option("--threads", threads, "worker threads (default 1)");

  CLI::App* prep = app.add_subcommand("prep", "fit and persist the preprocessing pipeline");
  CLI::App* train = app.add_subcommand("train", "train models on the stratified 90% partition");
  train->add_option("--model", model_name, "logreg|cart|rf|gbt|all");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--model", model_name, "model kind; resolves to <out>/<kind>.model");
  eval->add_option("--model-file", model_file, "explicit model file path");
  eval->add_option("--split", split_name, "valid|test");
  eval->add_flag("--plots", plots_flag, "also render SVG figures");
  CLI::App* compare = app.add_subcommand("compare", "rank trained models on one split");
  compare->add_option("--split", split_name, "valid|test");
  compare->add_option("models", compare_files, "model files (at least two)");
  CLI::App* plot = app.add_subcommand("plot", "render SVGs from persisted report CSVs");
  plot->add_option("--name", plot_name, "report basename, e.g. rf_test")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    Config cfg = load_config(config_path);
    // precedence: flag > config > default
    if (!train_file.empty()) cfg.train_file = train_file;
    if (!test_file.empty()) cfg.test_file = test_file;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!taxonomy.empty()) cfg.taxonomy_file = taxonomy;
    if (!model_name.empty()) cfg.model = model_name;
    if (seed_set) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (plots_flag) cfg.out_plots = true;
    nids_set_threads(cfg.threads);

    if (prep->parsed()) return cmd_prep(cfg);
    if (train->parsed()) return cmd_train(cfg);
    if (eval->parsed()) {
      std::string file = model_file;
      if (file.empty()) {
        if (cfg.model == "all") fail(1, "eval needs --model KIND or --model-file PATH");
        file = cfg.model_path(cfg.model);
      }
      return cmd_eval(cfg, file, split_name);
    }
    if (compare->parsed()) return cmd_compare(cfg, compare_files, split_name);
    if (plot->parsed()) return cmd_plot(cfg, plot_name);
    fail(1, "no subcommand given");
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
