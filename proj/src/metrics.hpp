#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "types.hpp"

namespace nids {

// Row = true class, column = predicted class, fixed global class order.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> c{};

  std::int64_t total() const;
  std::int64_t trace() const;
  std::int64_t row_sum(int k) const;
  std::int64_t col_sum(int k) const;
};

ConfusionMatrix confusion_matrix(std::span<const std::uint8_t> y_true,
                                 std::span<const std::uint8_t> y_pred);

double accuracy(const ConfusionMatrix& c);

// Per-class precision/recall/F1 with the zero-denominator convention
// (metric = 0) plus unweighted macro averages.
struct ClassMetrics {
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  std::array<std::int64_t, kNumClasses> support{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

ClassMetrics per_class_prf(const ConfusionMatrix& c);

// One-vs-rest ROC curve. Points run from (0,0) to (1,1); tied scores enter
// as one threshold group, which makes the trapezoidal area equal to the
// tie-adjusted pair-counting statistic.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  double auc = 0.0;
};

RocCurve roc_points(std::span<const double> scores, std::span<const std::uint8_t> positive);

double auc(const RocCurve& curve);  // trapezoidal re-integration of the points

struct EvaluationReport {
  std::int64_t rows = 0;
  ConfusionMatrix confusion;
  ClassMetrics metrics;
  // one curve per class; absent when the class has no positives (or no
  // negatives) in the evaluated rows, in which case the AUC is undefined
  std::array<std::optional<RocCurve>, kNumClasses> roc;
  double macro_auc = 0.0;
  int auc_defined_classes = 0;
};

// y_pred + class-probability rows -> the full evaluation bundle. The OvR
// score for class k is column k of the probability matrix.
EvaluationReport full_report(std::span<const std::uint8_t> y_true,
                             std::span<const std::uint8_t> y_pred,
                             std::span<const double> proba);

}  // namespace nids
