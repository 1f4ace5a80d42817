#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matrix.hpp"
#include "types.hpp"

namespace nids {

// Flat-arena CART node. feature < 0 marks a leaf; internal nodes route
// x[feature] <= threshold to the left child.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::int64_t, kNumClasses> counts{};
  std::array<double, kNumClasses> prob{};

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dim = 0;
  int depth = 0;

  bool empty() const { return nodes.empty(); }
};

struct TreeParams {
  int max_depth = 20;
  int min_samples_leaf = 5;
  int min_samples_split = 0;  // <= 0: defaults to 2 * min_samples_leaf
  int mtry = 0;               // <= 0 or >= dim: consider every feature
  std::uint64_t seed = 0;

  int effective_min_split() const {
    return min_samples_split > 0 ? min_samples_split : 2 * min_samples_leaf;
  }
};

// 1 - sum_k (count_k / total)^2
double gini(std::span<const std::int64_t> counts);

// Weighted impurity decrease; left + right must equal parent componentwise.
double split_gain(std::span<const std::int64_t> parent, std::span<const std::int64_t> left,
                  std::span<const std::int64_t> right);

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Scans each candidate feature over the given rows; thresholds are midpoints
// between consecutive distinct values; both children must hold at least
// min_samples_leaf rows. Ties resolve to the lower feature index, then the
// lower threshold. Returns the best legal split (a zero-gain split is still
// returned when it is the only legal option), or nothing if no feature
// offers a legal threshold.
std::optional<SplitCandidate> find_best_split(const DesignMatrix& X,
                                              std::span<const std::uint32_t> rows,
                                              std::span<const int> features,
                                              int min_samples_leaf);

// Grows a tree over the given rows (duplicates allowed, e.g. bootstrap
// samples). When params.mtry is active, every node draws its own candidate
// feature subset from a stream keyed by (seed, node id). importance, when
// given, accumulates (node fraction) * gain per split into its d slots.
Tree grow(const DesignMatrix& X, const TreeParams& params);
Tree grow(const DesignMatrix& X, const TreeParams& params, std::vector<std::uint32_t> rows,
          std::vector<double>* importance = nullptr);

const TreeNode& leaf_for(const Tree& tree, const double* x);

std::vector<double> predict_proba(const Tree& tree, const DesignMatrix& X);
std::vector<std::uint8_t> predict(const Tree& tree, const DesignMatrix& X);

}  // namespace nids
