#include "report_io.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "io_util.hpp"
#include "taxonomy.hpp"  // trim

namespace nids {

std::string render_report_text(const EvaluationReport& report, const ReportContext& ctx) {
  std::string out;
  out += "nidskit evaluation report\n";
  out += "format_version = " + std::to_string(kFormatVersion) + "\n";
  out += "model_kind = " + ctx.model_kind + "\n";
  out += "split = " + ctx.split + "\n";
  out += "pipeline_digest = " + ctx.pipeline_digest + "\n";
  out += "rows = " + std::to_string(report.rows) + "\n";
  out += "unseen_tokens = " + std::to_string(ctx.unseen_tokens) + "\n";
  out += "\n[confusion_matrix]\n";
  out += render_confusion_csv(report.confusion);
  out += "\n[per_class]\n";
  out += "class,precision,recall,f1,support,auc\n";
  for (int k = 0; k < kNumClasses; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    out += std::string(class_name(k)) + "," + format_double(report.metrics.precision[ks]) + "," +
           format_double(report.metrics.recall[ks]) + "," + format_double(report.metrics.f1[ks]) +
           "," + std::to_string(report.metrics.support[ks]) + ",";
    out += report.roc[ks] ? format_double(report.roc[ks]->auc) : "undefined";
    out += "\n";
  }
  out += "\n[macro]\n";
  out += "accuracy = " + format_double(report.metrics.accuracy) + "\n";
  out += "precision_macro = " + format_double(report.metrics.macro_precision) + "\n";
  out += "recall_macro = " + format_double(report.metrics.macro_recall) + "\n";
  out += "f1_macro = " + format_double(report.metrics.macro_f1) + "\n";
  out += "auc_macro = " + format_double(report.macro_auc) + "\n";
  out += "auc_defined_classes = " + std::to_string(report.auc_defined_classes) + "\n";
  return out;
}

std::string render_confusion_csv(const ConfusionMatrix& confusion) {
  std::string out = "class";
  for (int k = 0; k < kNumClasses; ++k) out += std::string(",") + class_name(k);
  out += "\n";
  for (int i = 0; i < kNumClasses; ++i) {
    out += class_name(i);
    for (int j = 0; j < kNumClasses; ++j)
      out += "," + std::to_string(confusion.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    out += "\n";
  }
  return out;
}

std::string render_roc_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : curve.points)
    out += format_double(fpr) + "," + format_double(tpr) + "\n";
  return out;
}

std::vector<std::string> write_report_files(const EvaluationReport& report,
                                            const ReportContext& ctx, const std::string& dir,
                                            const std::string& base, bool text, bool csv,
                                            bool roc) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const std::string prefix = (std::filesystem::path(dir) / base).string();
  if (text) {
    const std::string path = prefix + "_report.txt";
    atomic_write_file(path, render_report_text(report, ctx));
    written.push_back(path);
  }
  if (csv) {
    const std::string path = prefix + "_confusion.csv";
    atomic_write_file(path, render_confusion_csv(report.confusion));
    written.push_back(path);
  }
  if (roc) {
    for (int k = 0; k < kNumClasses; ++k) {
      const std::size_t ks = static_cast<std::size_t>(k);
      const std::string path = prefix + "_roc_" + class_name(k) + ".csv";
      atomic_write_file(path, report.roc[ks] ? render_roc_csv(*report.roc[ks]) : "fpr,tpr\n");
      written.push_back(path);
    }
  }
  return written;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.emplace_back(trim(line.substr(start)));
      return fields;
    }
    fields.emplace_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_csv_double(const std::string& token, const std::string& path) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw DataError("bad numeric cell '" + token + "' in " + path);
  return v;
}

}  // namespace

std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> read_confusion_csv(
    const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty confusion CSV: " + path);
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> m{};
  for (int i = 0; i < kNumClasses; ++i) {
    if (!std::getline(in, line)) throw DataError("confusion CSV has too few rows: " + path);
    const auto fields = split_csv_line(line);
    if (fields.size() != kNumClasses + 1 || fields[0] != class_name(i))
      throw DataError("malformed confusion CSV row in " + path);
    for (int j = 0; j < kNumClasses; ++j)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<std::int64_t>(parse_csv_double(fields[static_cast<std::size_t>(j) + 1], path));
  }
  return m;
}

std::vector<std::pair<double, double>> read_roc_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"fpr", "tpr"})
    throw DataError("malformed ROC CSV header in " + path);
  std::vector<std::pair<double, double>> points;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw DataError("malformed ROC CSV row in " + path);
    points.emplace_back(parse_csv_double(fields[0], path), parse_csv_double(fields[1], path));
  }
  return points;
}

}  // namespace nids
