#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"
#include "tree.hpp"
#include "types.hpp"

namespace nids {

// ---------------------------------------------------------------------------
// Random forest: bagging + per-node feature subsampling, soft voting.
// ---------------------------------------------------------------------------

struct ForestParams {
  int n_trees = 100;
  int mtry = 0;  // <= 0: floor(sqrt(dim))
  TreeParams tree = {.max_depth = 0, .min_samples_leaf = 2, .min_samples_split = 0, .mtry = 0, .seed = 0};
  bool bootstrap = true;  // false: every tree sees the identity sample
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::vector<Tree> trees;
  std::size_t dim = 0;
  int mtry = 0;
  // per-feature accumulated impurity reduction, normalized to sum 1
  std::vector<double> importance;
};

// n indices drawn with replacement from [0, n), in draw order.
std::vector<std::uint32_t> bootstrap_indices(std::size_t n, Rng& rng);

ForestModel train_forest(const DesignMatrix& X, const ForestParams& params);

std::vector<double> predict_proba(const ForestModel& model, const DesignMatrix& X);
std::vector<std::uint8_t> predict(const ForestModel& model, const DesignMatrix& X);

// ---------------------------------------------------------------------------
// Gradient-boosted trees: softmax cross-entropy, second-order (Newton) splits,
// one regression tree per class per round.
// ---------------------------------------------------------------------------

struct GbtParams {
  int n_rounds = 100;
  int max_depth = 6;
  double learning_rate = 0.1;
  double subsample = 0.8;    // row fraction per tree
  double colsample = 0.8;    // feature fraction per tree
  double lambda = 1.0;       // L2 penalty on leaf values
  double min_child_weight = 1.0;  // minimum hessian sum per child
  std::uint64_t seed = 0;
};

// Regression tree node; leaves carry additive score contributions.
struct GbtNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct GbtTree {
  std::vector<GbtNode> nodes;
};

struct GbtModel {
  std::array<double, kNumClasses> base_score{};  // log class priors
  std::vector<GbtTree> trees;                    // round-major: trees[round * K + k]
  int n_rounds = 0;
  double learning_rate = 0.1;
  std::size_t dim = 0;
};

// With p = rowwise softmax(scores): g = p - onehot(y), h = p * (1 - p).
void softmax_grad_hess(std::span<const double> scores, std::span<const std::uint8_t> labels,
                       std::span<double> g, std::span<double> h);

// Presorted row order per feature; built once per training matrix.
struct SortedColumns {
  std::size_t rows = 0;
  std::vector<std::vector<std::uint32_t>> order;  // per feature, ascending by value

  static SortedColumns build(const DesignMatrix& X);
};

// Fits one regression tree to (g, h) for a single class. Row and column
// subsample masks are drawn from the given stream; splits maximize the
// second-order gain and leaves take value -G / (H + lambda).
GbtTree fit_gradient_tree(const DesignMatrix& X, std::span<const double> g,
                          std::span<const double> h, const GbtParams& params, Rng& rng);

struct GbtTraining {
  GbtModel model;
  std::vector<double> round_losses;  // training cross-entropy after each round
};

GbtTraining train_gbt(const DesignMatrix& X, const GbtParams& params);

double gbt_leaf_value(const GbtTree& tree, const double* x);

std::vector<double> predict_proba(const GbtModel& model, const DesignMatrix& X);
std::vector<std::uint8_t> predict(const GbtModel& model, const DesignMatrix& X);

}  // namespace nids
