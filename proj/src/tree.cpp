#include "tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "linear.hpp"  // argmax_class
#include "parallel.hpp"
#include "rng.hpp"

namespace nids {

namespace {

constexpr std::uint64_t kTagNodeFeatures = 0x7EA7;

inline double gini_from(const std::int64_t* counts, std::int64_t total, std::int64_t sum_sq) {
  (void)counts;
  const double t = static_cast<double>(total);
  return 1.0 - static_cast<double>(sum_sq) / (t * t);
}

inline std::int64_t sum_of_squares(std::span<const std::int64_t> counts) {
  std::int64_t ss = 0;
  for (std::int64_t c : counts) ss += c * c;
  return ss;
}

}  // namespace

double gini(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("negative class count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("gini of an empty node");
  return gini_from(counts.data(), total, sum_of_squares(counts));
}

double split_gain(std::span<const std::int64_t> parent, std::span<const std::int64_t> left,
                  std::span<const std::int64_t> right) {
  if (parent.size() != left.size() || parent.size() != right.size())
    throw std::invalid_argument("split_gain: count vectors differ in length");
  std::int64_t n = 0, n_left = 0, n_right = 0;
  for (std::size_t k = 0; k < parent.size(); ++k) {
    if (left[k] + right[k] != parent[k])
      throw std::invalid_argument("split_gain: children do not partition the parent");
    n += parent[k];
    n_left += left[k];
    n_right += right[k];
  }
  if (n == 0) throw std::invalid_argument("split_gain of an empty node");
  double g = gini(parent);
  if (n_left > 0) g -= static_cast<double>(n_left) / static_cast<double>(n) * gini(left);
  if (n_right > 0) g -= static_cast<double>(n_right) / static_cast<double>(n) * gini(right);
  return g;
}

namespace {

// Split scan working buffers, reused across nodes.
struct ScanScratch {
  std::vector<std::pair<double, std::uint8_t>> pairs;
};

// Best split over one feature; returns false if the feature has no legal
// threshold. Gains are computed with integer class counts so that equal
// splits produce bitwise-equal gains and the tie rule is exact.
bool scan_feature(const DesignMatrix& X, std::span<const std::uint32_t> rows, int feature,
                  const std::array<std::int64_t, kNumClasses>& parent_counts,
                  std::int64_t parent_ss, double parent_gini, int min_samples_leaf,
                  ScanScratch& scratch, double& best_gain, double& best_threshold) {
  const std::size_t n = rows.size();
  auto& pairs = scratch.pairs;
  pairs.clear();
  pairs.reserve(n);

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  bool binary01 = true;
  for (std::uint32_t row : rows) {
    const double v = X.at(row, static_cast<std::size_t>(feature));
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    binary01 = binary01 && (v == 0.0 || v == 1.0);
    pairs.emplace_back(v, X.labels[row]);
  }
  if (vmin == vmax) return false;

  const double total = static_cast<double>(n);
  bool found = false;
  best_gain = -1.0;
  best_threshold = 0.0;

  auto consider = [&](std::int64_t n_left, std::int64_t ss_left, std::int64_t ss_right,
                      double threshold) {
    const std::int64_t n_right = static_cast<std::int64_t>(n) - n_left;
    if (n_left < min_samples_leaf || n_right < min_samples_leaf) return;
    const double gain = parent_gini -
                        static_cast<double>(n_left) / total *
                            (1.0 - static_cast<double>(ss_left) /
                                       (static_cast<double>(n_left) * static_cast<double>(n_left))) -
                        static_cast<double>(n_right) / total *
                            (1.0 - static_cast<double>(ss_right) / (static_cast<double>(n_right) *
                                                                    static_cast<double>(n_right)));
    if (!found || gain > best_gain) {
      found = true;
      best_gain = gain;
      best_threshold = threshold;
    }
  };

  if (binary01) {
    // one candidate threshold at 0.5; a single counting pass suffices
    std::array<std::int64_t, kNumClasses> zeros{};
    std::int64_t n_zero = 0;
    for (const auto& [v, label] : pairs)
      if (v == 0.0) {
        ++zeros[label];
        ++n_zero;
      }
    std::int64_t ss_left = sum_of_squares(zeros);
    std::int64_t ss_right = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      const std::int64_t c = parent_counts[static_cast<std::size_t>(k)] - zeros[static_cast<std::size_t>(k)];
      ss_right += c * c;
    }
    consider(n_zero, ss_left, ss_right, 0.5);
    return found;
  }

  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::array<std::int64_t, kNumClasses> left{};
  std::array<std::int64_t, kNumClasses> right = parent_counts;
  std::int64_t ss_left = 0;
  std::int64_t ss_right = parent_ss;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto label = pairs[i].second;
    // incremental sum-of-squares update for one moved row
    ss_left += 2 * left[label] + 1;
    ss_right -= 2 * right[label] - 1;
    ++left[label];
    --right[label];
    const double prev = pairs[i].first;
    const double next = pairs[i + 1].first;
    if (prev == next) continue;
    double threshold = prev + (next - prev) / 2.0;
    // midpoints of adjacent doubles can round up to the larger value, which
    // would route it left; fall back to the exact lower value
    if (!(threshold < next)) threshold = prev;
    consider(static_cast<std::int64_t>(i) + 1, ss_left, ss_right, threshold);
  }
  return found;
}

}  // namespace

std::optional<SplitCandidate> find_best_split(const DesignMatrix& X,
                                              std::span<const std::uint32_t> rows,
                                              std::span<const int> features,
                                              int min_samples_leaf) {
  if (rows.empty()) return std::nullopt;
  std::array<std::int64_t, kNumClasses> counts{};
  for (std::uint32_t row : rows) ++counts[X.labels[row]];
  const std::int64_t parent_ss = sum_of_squares(counts);
  const double parent_gini =
      gini_from(counts.data(), static_cast<std::int64_t>(rows.size()), parent_ss);

  ScanScratch scratch;
  std::optional<SplitCandidate> best;
  for (int feature : features) {
    double gain, threshold;
    if (!scan_feature(X, rows, feature, counts, parent_ss, parent_gini, min_samples_leaf, scratch,
                      gain, threshold))
      continue;
    if (!best || gain > best->gain) best = SplitCandidate{feature, threshold, gain};
  }
  return best;
}

namespace {

struct WorkItem {
  std::int32_t node;
  std::vector<std::uint32_t> rows;
  int depth;
};

}  // namespace

Tree grow(const DesignMatrix& X, const TreeParams& params) {
  std::vector<std::uint32_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), 0u);
  return grow(X, params, std::move(rows));
}

Tree grow(const DesignMatrix& X, const TreeParams& params, std::vector<std::uint32_t> rows,
          std::vector<double>* importance) {
  if (rows.empty()) throw std::invalid_argument("cannot grow a tree on zero rows");
  if (params.min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");

  const int max_depth = params.max_depth > 0 ? params.max_depth : std::numeric_limits<int>::max();
  const int min_split = params.effective_min_split();
  const std::size_t dim = X.dim;
  const bool subsample_features =
      params.mtry > 0 && static_cast<std::size_t>(params.mtry) < dim;
  const double root_rows = static_cast<double>(rows.size());

  std::vector<int> all_features(dim);
  std::iota(all_features.begin(), all_features.end(), 0);

  Tree tree;
  tree.dim = dim;
  tree.nodes.emplace_back();

  std::uint64_t node_counter = 0;
  std::vector<WorkItem> stack;
  stack.push_back({0, std::move(rows), 0});

  std::vector<int> sampled;
  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
    const std::uint64_t node_id = node_counter++;
    tree.depth = std::max(tree.depth, item.depth);

    node.counts.fill(0);
    for (std::uint32_t row : item.rows) ++node.counts[X.labels[row]];
    const double total = static_cast<double>(item.rows.size());
    for (int k = 0; k < kNumClasses; ++k)
      node.prob[static_cast<std::size_t>(k)] =
          static_cast<double>(node.counts[static_cast<std::size_t>(k)]) / total;

    bool pure = false;
    for (int k = 0; k < kNumClasses; ++k)
      if (node.counts[static_cast<std::size_t>(k)] == static_cast<std::int64_t>(item.rows.size()))
        pure = true;
    if (pure || item.depth >= max_depth ||
        item.rows.size() < static_cast<std::size_t>(min_split))
      continue;  // leaf

    std::span<const int> features(all_features);
    if (subsample_features) {
      Rng rng = Rng::stream(params.seed, kTagNodeFeatures, node_id);
      const auto picks =
          rng.sample_without_replacement(dim, static_cast<std::size_t>(params.mtry));
      sampled.assign(picks.begin(), picks.end());
      features = std::span<const int>(sampled);
    }

    const auto split = find_best_split(X, item.rows, features, params.min_samples_leaf);
    if (!split) continue;  // no legal split; forced leaf

    if (importance)
      (*importance)[static_cast<std::size_t>(split->feature)] +=
          total / root_rows * split->gain;

    std::vector<std::uint32_t> left_rows, right_rows;
    left_rows.reserve(item.rows.size());
    for (std::uint32_t row : item.rows) {
      if (X.at(row, static_cast<std::size_t>(split->feature)) <= split->threshold)
        left_rows.push_back(row);
      else
        right_rows.push_back(row);
    }
    item.rows.clear();
    item.rows.shrink_to_fit();

    const std::int32_t left_index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    const std::int32_t right_index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(item.node)];
    parent.feature = split->feature;
    parent.threshold = split->threshold;
    parent.left = left_index;
    parent.right = right_index;

    // right first so the left subtree is expanded next (preorder ids)
    stack.push_back({right_index, std::move(right_rows), item.depth + 1});
    stack.push_back({left_index, std::move(left_rows), item.depth + 1});
  }
  return tree;
}

const TreeNode& leaf_for(const Tree& tree, const double* x) {
  const TreeNode* node = &tree.nodes[0];
  while (!node->is_leaf()) {
    if (x[node->feature] <= node->threshold)
      node = &tree.nodes[static_cast<std::size_t>(node->left)];
    else
      node = &tree.nodes[static_cast<std::size_t>(node->right)];
  }
  return *node;
}

std::vector<double> predict_proba(const Tree& tree, const DesignMatrix& X) {
  X.check_dim(tree.dim);
  std::vector<double> proba(X.rows * kNumClasses);
  parallel_chunks(X.rows, 16384, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const TreeNode& leaf = leaf_for(tree, X.row(i));
      double* out = proba.data() + i * kNumClasses;
      for (int k = 0; k < kNumClasses; ++k) out[static_cast<std::size_t>(k)] = leaf.prob[static_cast<std::size_t>(k)];
    }
  });
  return proba;
}

std::vector<std::uint8_t> predict(const Tree& tree, const DesignMatrix& X) {
  const std::vector<double> proba = predict_proba(tree, X);
  std::vector<std::uint8_t> labels(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i)
    labels[i] = argmax_class({proba.data() + i * kNumClasses, kNumClasses});
  return labels;
}

}  // namespace nids
