#include <doctest.h>

#include <cmath>

#include "metrics.hpp"
#include "rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace nids;
using namespace nids::testing;

TEST_CASE("confusion matrix counting") {
  SUBCASE("mixed four-row example") {
    const std::vector<std::uint8_t> yt{0, 0, 1, 2};
    const std::vector<std::uint8_t> yp{0, 1, 1, 2};
    const ConfusionMatrix c = confusion_matrix(yt, yp);
    CHECK(c.c[0][0] == 1);
    CHECK(c.c[0][1] == 1);
    CHECK(c.c[1][1] == 1);
    CHECK(c.c[2][2] == 1);
    CHECK(c.total() == 4);
    CHECK(c.trace() == 3);
  }
  SUBCASE("perfect predictions are diagonal") {
    const std::vector<std::uint8_t> y{0, 1, 2, 3, 4, 4};
    const ConfusionMatrix c = confusion_matrix(y, y);
    for (int i = 0; i < kNumClasses; ++i)
      for (int j = 0; j < kNumClasses; ++j)
        if (i != j) CHECK(c.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0);
    CHECK(accuracy(c) == 1.0);
  }
  SUBCASE("length mismatch is an error") {
    const std::vector<std::uint8_t> a{0, 1};
    const std::vector<std::uint8_t> b{0};
    CHECK_THROWS_AS(confusion_matrix(a, b), std::invalid_argument);
  }
}

TEST_CASE("published best-model examples") {
  // the U2R row of the reference confusion matrix: 60 correct of 67,
  // 5 predicted Normal, 2 predicted R2L
  ConfusionMatrix c;
  c.c[4][4] = 60;
  c.c[4][0] = 5;
  c.c[4][3] = 2;
  // remaining diagonal from the same figure
  c.c[0][0] = 9600;
  c.c[1][1] = 7400;
  c.c[2][2] = 2300;
  c.c[3][3] = 2500;
  // pad off-diagonals so the totals match the test partition sizes
  c.c[0][3] = 110;
  c.c[2][0] = 122;
  c.c[3][0] = 320;
  c.c[0][1] = 0;
  const ClassMetrics m = per_class_prf(c);
  CHECK(m.recall[4] == doctest::Approx(60.0 / 67.0).epsilon(1e-12));
  CHECK(m.recall[4] == doctest::Approx(0.8955).epsilon(1e-3));

  SUBCASE("the diagonal sum over 22,544 rows implies accuracy near 0.9697") {
    ConfusionMatrix full = c;
    // absorb every remaining error into the Normal column so the matrix
    // total matches 22,544 (9,710 + 7,458 + 2,422 + 2,887 + 67)
    full.c[0][0] = 9600;
    full.c[0][3] = 110;
    full.c[1][0] = 58;
    full.c[2][0] = 122;
    full.c[3][0] = 387 - full.c[3][1] - full.c[3][2];
    const std::int64_t diagonal = full.trace();
    CHECK(diagonal == 21860);
    CHECK(full.total() == 22544);
    CHECK(accuracy(full) == doctest::Approx(21860.0 / 22544.0).epsilon(1e-12));
    CHECK(accuracy(full) == doctest::Approx(0.9697).epsilon(1e-4));
  }
}

TEST_CASE("per-class precision, recall and f1") {
  SUBCASE("p = 0.5 and r = 1.0 give f1 = 2/3") {
    ConfusionMatrix c;
    c.c[0][0] = 1;  // one true Normal, predicted Normal
    c.c[1][0] = 1;  // one DoS mispredicted as Normal
    c.c[1][1] = 1;  // keep DoS non-empty
    const ClassMetrics m = per_class_prf(c);
    CHECK(m.precision[0] == 0.5);
    CHECK(m.recall[0] == 1.0);
    CHECK(m.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("zero denominators produce zero metrics") {
    ConfusionMatrix c;
    c.c[0][0] = 3;
    c.c[1][0] = 2;  // class 1 never predicted correctly, class 2..4 absent
    const ClassMetrics m = per_class_prf(c);
    CHECK(m.precision[1] == 0.0);  // column 1 empty
    CHECK(m.recall[1] == 0.0);
    CHECK(m.f1[1] == 0.0);
    CHECK(m.recall[2] == 0.0);  // row 2 empty
  }
  SUBCASE("all-perfect matrix has macro f1 = 1") {
    ConfusionMatrix c;
    for (int k = 0; k < kNumClasses; ++k)
      c.c[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 10 + k;
    const ClassMetrics m = per_class_prf(c);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.macro_precision == 1.0);
    CHECK(m.macro_recall == 1.0);
  }
  SUBCASE("macro f1 averages per-class f1, not harmonic-of-macros") {
    ConfusionMatrix c;
    c.c[0][0] = 8;
    c.c[0][1] = 2;
    c.c[1][1] = 1;
    c.c[1][0] = 9;
    const ClassMetrics m = per_class_prf(c);
    double expected = 0;
    for (int k = 0; k < kNumClasses; ++k) expected += m.f1[static_cast<std::size_t>(k)];
    expected /= kNumClasses;
    CHECK(m.macro_f1 == doctest::Approx(expected).epsilon(1e-15));
    const double harmonic_of_macros =
        2 * m.macro_precision * m.macro_recall / (m.macro_precision + m.macro_recall);
    CHECK(m.macro_f1 != doctest::Approx(harmonic_of_macros).epsilon(1e-6));
  }
}

TEST_CASE("roc curves") {
  SUBCASE("perfect ranking walks the left edge then the top") {
    const std::vector<double> scores{0.9, 0.8, 0.3, 0.1};
    const std::vector<std::uint8_t> labels{1, 1, 0, 0};
    const RocCurve curve = roc_points(scores, labels);
    const std::vector<std::pair<double, double>> expected{
        {0, 0}, {0, 0.5}, {0, 1}, {0.5, 1}, {1, 1}};
    CHECK(curve.points == expected);
    CHECK(curve.auc == 1.0);
  }
  SUBCASE("all-tied scores give the chance diagonal") {
    const std::vector<double> scores{0.4, 0.4, 0.4, 0.4};
    const std::vector<std::uint8_t> labels{1, 0, 1, 0};
    const RocCurve curve = roc_points(scores, labels);
    CHECK(curve.points == std::vector<std::pair<double, double>>{{0, 0}, {1, 1}});
    CHECK(curve.auc == 0.5);
  }
  SUBCASE("the documented 0.75 example") {
    const std::vector<double> scores{0.9, 0.4, 0.6, 0.3};
    const std::vector<std::uint8_t> labels{1, 1, 0, 0};
    const RocCurve curve = roc_points(scores, labels);
    CHECK(curve.auc == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(curve.auc == doctest::Approx(pair_count_auc(scores, labels)).epsilon(1e-15));
  }
  SUBCASE("degenerate label sets are an explicit error") {
    const std::vector<double> scores{0.5, 0.6};
    const std::vector<std::uint8_t> all_pos{1, 1};
    const std::vector<std::uint8_t> all_neg{0, 0};
    CHECK_THROWS_AS(roc_points(scores, all_pos), DataError);
    CHECK_THROWS_AS(roc_points(scores, all_neg), DataError);
  }
}

TEST_CASE("trapezoidal auc equals tie-adjusted pair counting on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid scores force plenty of ties
      scores[i] = static_cast<double>(rng.below(8)) / 7.0;
      labels[i] = static_cast<std::uint8_t>(rng.below(2));
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    const RocCurve curve = roc_points(scores, labels);
    CHECK(curve.auc == doctest::Approx(pair_count_auc(scores, labels)).epsilon(1e-12));

    // both coordinates non-decreasing along the curve
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].first >= curve.points[i - 1].first);
      CHECK(curve.points[i].second >= curve.points[i - 1].second);
    }
    CHECK(auc(curve) == curve.auc);
  }
}

TEST_CASE("full report") {
  SUBCASE("perfect classifier on a balanced fixture") {
    const std::size_t n = 15;
    std::vector<std::uint8_t> y(n);
    std::vector<double> proba(n * kNumClasses, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<std::uint8_t>(i % kNumClasses);
      proba[i * kNumClasses + y[i]] = 1.0;
    }
    const EvaluationReport report = full_report(y, y, proba);
    CHECK(report.metrics.accuracy == 1.0);
    CHECK(report.metrics.macro_f1 == 1.0);
    CHECK(report.macro_auc == 1.0);
    CHECK(report.auc_defined_classes == kNumClasses);
  }
  SUBCASE("constant-probability classifier") {
    const std::size_t n = 20;
    std::vector<std::uint8_t> y(n);
    std::vector<std::uint8_t> pred(n, 0);  // argmax of a constant row is Normal
    std::vector<double> proba(n * kNumClasses, 0.2);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<std::uint8_t>(i < 12 ? 0 : i % kNumClasses);
    const EvaluationReport report = full_report(y, pred, proba);
    std::int64_t majority = 0;
    for (const auto label : y) majority += label == 0;
    CHECK(report.metrics.accuracy ==
          doctest::Approx(static_cast<double>(majority) / n).epsilon(1e-15));
    for (int k = 0; k < kNumClasses; ++k)
      if (report.roc[static_cast<std::size_t>(k)])
        CHECK(report.roc[static_cast<std::size_t>(k)]->auc == 0.5);
  }
  SUBCASE("classes absent from y_true get undefined aucs, excluded from the macro") {
    const std::vector<std::uint8_t> y{0, 0, 1, 1};
    const std::vector<std::uint8_t> pred{0, 0, 1, 0};
    const std::vector<double> proba = random_proba(4, 77);
    const EvaluationReport report = full_report(y, pred, proba);
    CHECK(report.auc_defined_classes == 2);
    CHECK(!report.roc[2].has_value());
    CHECK(!report.roc[3].has_value());
    CHECK(!report.roc[4].has_value());
    const double expected = (report.roc[0]->auc + report.roc[1]->auc) / 2.0;
    CHECK(report.macro_auc == doctest::Approx(expected).epsilon(1e-15));
  }
  SUBCASE("shape mismatch is an error") {
    const std::vector<std::uint8_t> y{0, 1};
    const std::vector<double> proba(5, 0.2);
    CHECK_THROWS_AS(full_report(y, y, proba), std::invalid_argument);
  }
}

TEST_CASE("library metrics agree with the brute-force oracle") {
  Rng rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    std::vector<std::uint8_t> yt(n), yp(n);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = static_cast<std::uint8_t>(rng.below(kNumClasses));
      yp[i] = static_cast<std::uint8_t>(rng.below(kNumClasses));
    }
    const ConfusionMatrix c = confusion_matrix(yt, yp);
    const BruteForceMetrics oracle = brute_force_metrics(yt, yp);
    for (int i = 0; i < kNumClasses; ++i)
      for (int j = 0; j < kNumClasses; ++j)
        CHECK(c.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == oracle.confusion[i][j]);
    const ClassMetrics m = per_class_prf(c);
    CHECK(m.accuracy == oracle.accuracy);
    for (int k = 0; k < kNumClasses; ++k) {
      CHECK(m.precision[static_cast<std::size_t>(k)] == oracle.precision[k]);
      CHECK(m.recall[static_cast<std::size_t>(k)] == oracle.recall[k]);
      CHECK(m.f1[static_cast<std::size_t>(k)] == oracle.f1[k]);
    }
  }
}
