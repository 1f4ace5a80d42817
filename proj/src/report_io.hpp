#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "metrics.hpp"

namespace nids {

struct ReportContext {
  std::string model_kind;
  std::string split;
  std::string pipeline_digest;
  std::int64_t unseen_tokens = 0;
};

// Structured text document with a stable key order; undefined AUCs render as
// the literal token "undefined".
std::string render_report_text(const EvaluationReport& report, const ReportContext& ctx);

std::string render_confusion_csv(const ConfusionMatrix& confusion);
std::string render_roc_csv(const RocCurve& curve);

// Writes <base>_report.txt, <base>_confusion.csv and one <base>_roc_<class>.csv
// per class into dir (all writes are atomic). A class without a defined curve
// still gets its file, holding only the header. Returns the paths written.
std::vector<std::string> write_report_files(const EvaluationReport& report,
                                            const ReportContext& ctx, const std::string& dir,
                                            const std::string& base, bool text, bool csv, bool roc);

// Readers for the plot stage (plots render from persisted CSVs only).
std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> read_confusion_csv(
    const std::string& path);
std::vector<std::pair<double, double>> read_roc_csv(const std::string& path);

}  // namespace nids
