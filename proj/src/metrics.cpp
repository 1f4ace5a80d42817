#include "metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nids {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : c)
    for (const std::int64_t v : row) t += v;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int k = 0; k < kNumClasses; ++k)
    t += c[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  return t;
}

std::int64_t ConfusionMatrix::row_sum(int k) const {
  const auto& row = c[static_cast<std::size_t>(k)];
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::col_sum(int k) const {
  std::int64_t t = 0;
  for (int i = 0; i < kNumClasses; ++i)
    t += c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const std::uint8_t> y_true,
                                 std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion_matrix: label vectors differ in length");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= kNumClasses || y_pred[i] >= kNumClasses)
      throw std::invalid_argument("confusion_matrix: label out of range");
    ++m.c[y_true[i]][y_pred[i]];
  }
  return m;
}

double accuracy(const ConfusionMatrix& c) {
  const std::int64_t total = c.total();
  if (total == 0) throw std::invalid_argument("accuracy of an empty confusion matrix");
  return static_cast<double>(c.trace()) / static_cast<double>(total);
}

ClassMetrics per_class_prf(const ConfusionMatrix& c) {
  if (c.total() == 0) throw std::invalid_argument("metrics of an empty confusion matrix");
  ClassMetrics m;
  for (int k = 0; k < kNumClasses; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const std::int64_t tp = c.c[ks][ks];
    const std::int64_t predicted = c.col_sum(k);
    const std::int64_t actual = c.row_sum(k);
    m.support[ks] = actual;
    m.precision[ks] = predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall[ks] = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    const double pr = m.precision[ks] + m.recall[ks];
    m.f1[ks] = pr > 0 ? 2.0 * m.precision[ks] * m.recall[ks] / pr : 0.0;
  }
  // macro = mean of the per-class values, never recombined from macro P/R
  for (int k = 0; k < kNumClasses; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    m.macro_precision += m.precision[ks];
    m.macro_recall += m.recall[ks];
    m.macro_f1 += m.f1[ks];
  }
  m.macro_precision /= kNumClasses;
  m.macro_recall /= kNumClasses;
  m.macro_f1 /= kNumClasses;
  m.accuracy = accuracy(c);
  return m;
}

RocCurve roc_points(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size())
    throw std::invalid_argument("roc_points: scores and labels differ in length");
  std::int64_t pos = 0, neg = 0;
  for (const std::uint8_t flag : positive) (flag ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw DataError("ROC curve undefined: needs at least one positive and one negative row");

  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.reserve(scores.size() + 2);
  curve.points.emplace_back(0.0, 0.0);
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // all rows tied at this score enter together
    while (i < order.size() && scores[order[i]] == threshold) {
      (positive[order[i]] ? tp : fp) += 1;
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
  }
  if (curve.points.back() != std::make_pair(1.0, 1.0)) curve.points.emplace_back(1.0, 1.0);
  curve.auc = auc(curve);
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    area += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return area;
}

EvaluationReport full_report(std::span<const std::uint8_t> y_true,
                             std::span<const std::uint8_t> y_pred,
                             std::span<const double> proba) {
  if (proba.size() != y_true.size() * kNumClasses)
    throw std::invalid_argument("full_report: probability matrix shape mismatch");
  EvaluationReport report;
  report.rows = static_cast<std::int64_t>(y_true.size());
  report.confusion = confusion_matrix(y_true, y_pred);
  report.metrics = per_class_prf(report.confusion);

  std::vector<double> scores(y_true.size());
  std::vector<std::uint8_t> positive(y_true.size());
  double auc_sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      scores[i] = proba[i * kNumClasses + static_cast<std::size_t>(k)];
      positive[i] = y_true[i] == k ? 1 : 0;
    }
    try {
      report.roc[static_cast<std::size_t>(k)] = roc_points(scores, positive);
      auc_sum += report.roc[static_cast<std::size_t>(k)]->auc;
      ++report.auc_defined_classes;
    } catch (const DataError&) {
      report.roc[static_cast<std::size_t>(k)] = std::nullopt;  // undefined, never fabricated
    }
  }
  report.macro_auc = report.auc_defined_classes > 0
                         ? auc_sum / static_cast<double>(report.auc_defined_classes)
                         : 0.0;
  return report;
}

}  // namespace nids
