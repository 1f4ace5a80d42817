#include "ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linear.hpp"  // argmax_class
#include "parallel.hpp"

namespace nids {

namespace {

constexpr std::uint64_t kTagBootstrap = 0xB007;
constexpr std::uint64_t kTagTreeSeed = 0x73EE;
constexpr std::uint64_t kTagRowSample = 0x505B;
constexpr std::uint64_t kTagColSample = 0xC017;

// smallest split gain the boosting stage accepts
constexpr double kMinGbtGain = 1e-12;

}  // namespace

std::vector<std::uint32_t> bootstrap_indices(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("bootstrap over an empty set");
  std::vector<std::uint32_t> indices(n);
  for (auto& index : indices) index = static_cast<std::uint32_t>(rng.below(n));
  return indices;
}

ForestModel train_forest(const DesignMatrix& X, const ForestParams& params) {
  if (X.rows == 0) throw std::invalid_argument("cannot train a forest on an empty matrix");
  if (params.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");

  const int mtry = params.mtry > 0
                       ? params.mtry
                       : static_cast<int>(std::sqrt(static_cast<double>(X.dim)));
  if (mtry < 1 || static_cast<std::size_t>(mtry) > X.dim)
    throw std::invalid_argument("mtry must lie in [1, dim]");

  ForestModel model;
  model.dim = X.dim;
  model.mtry = mtry;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  std::vector<std::vector<double>> importances(
      static_cast<std::size_t>(params.n_trees), std::vector<double>(X.dim, 0.0));

  parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
    std::vector<std::uint32_t> rows;
    if (params.bootstrap) {
      Rng rng = Rng::stream(params.seed, kTagBootstrap, t);
      rows = bootstrap_indices(X.rows, rng);
    } else {
      rows.resize(X.rows);
      std::iota(rows.begin(), rows.end(), 0u);
    }
    TreeParams tree_params = params.tree;
    tree_params.mtry = mtry;
    tree_params.seed = Rng::stream(params.seed, kTagTreeSeed, t).next_u64();
    model.trees[t] = grow(X, tree_params, std::move(rows), &importances[t]);
  });

  model.importance.assign(X.dim, 0.0);
  for (const auto& tree_importance : importances)  // fixed tree order
    for (std::size_t j = 0; j < X.dim; ++j) model.importance[j] += tree_importance[j];
  const double total = std::accumulate(model.importance.begin(), model.importance.end(), 0.0);
  if (total > 0)
    for (auto& v : model.importance) v /= total;
  return model;
}

std::vector<double> predict_proba(const ForestModel& model, const DesignMatrix& X) {
  X.check_dim(model.dim);
  std::vector<double> proba(X.rows * kNumClasses, 0.0);
  const double inv_trees = 1.0 / static_cast<double>(model.trees.size());
  parallel_chunks(X.rows, 8192, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out = proba.data() + i * kNumClasses;
      for (const Tree& tree : model.trees) {
        const TreeNode& leaf = leaf_for(tree, X.row(i));
        for (int k = 0; k < kNumClasses; ++k)
          out[static_cast<std::size_t>(k)] += leaf.prob[static_cast<std::size_t>(k)];
      }
      for (int k = 0; k < kNumClasses; ++k) out[static_cast<std::size_t>(k)] *= inv_trees;
    }
  });
  return proba;
}

std::vector<std::uint8_t> predict(const ForestModel& model, const DesignMatrix& X) {
  const std::vector<double> proba = predict_proba(model, X);
  std::vector<std::uint8_t> labels(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i)
    labels[i] = argmax_class({proba.data() + i * kNumClasses, kNumClasses});
  return labels;
}

void softmax_grad_hess(std::span<const double> scores, std::span<const std::uint8_t> labels,
                       std::span<double> g, std::span<double> h) {
  const std::size_t n = labels.size();
  if (scores.size() != n * kNumClasses || g.size() != scores.size() || h.size() != scores.size())
    throw std::invalid_argument("softmax_grad_hess: shape mismatch");
  parallel_chunks(n, 16384, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* z = scores.data() + i * kNumClasses;
      double* gi = g.data() + i * kNumClasses;
      double* hi = h.data() + i * kNumClasses;
      double zmax = z[0];
      for (int k = 1; k < kNumClasses; ++k) zmax = std::max(zmax, z[k]);
      double sum = 0.0;
      for (int k = 0; k < kNumClasses; ++k) {
        gi[k] = std::exp(z[k] - zmax);
        sum += gi[k];
      }
      const double inv = 1.0 / sum;
      for (int k = 0; k < kNumClasses; ++k) {
        const double p = gi[k] * inv;
        gi[k] = p;
        hi[k] = p * (1.0 - p);
      }
      gi[labels[i]] -= 1.0;
    }
  });
}

SortedColumns SortedColumns::build(const DesignMatrix& X) {
  SortedColumns sorted;
  sorted.rows = X.rows;
  sorted.order.resize(X.dim);
  parallel_for(X.dim, [&](std::size_t j) {
    auto& order = sorted.order[j];
    order.resize(X.rows);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return X.at(a, j) < X.at(b, j);
    });
  });
  return sorted;
}

namespace {

struct GbtNodeAgg {
  std::int32_t node = -1;
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::int64_t count = 0;
};

struct GbtBestSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

inline double leaf_objective(double sum_g, double sum_h, double lambda) {
  return sum_g * sum_g / (sum_h + lambda);
}

// Level-wise exact-split builder over presorted columns. One pass over a
// sorted column updates every active node's running (G, H) and evaluates all
// boundary thresholds for that feature.
GbtTree build_gbt_tree(const DesignMatrix& X, const SortedColumns& sorted,
                       std::span<const double> g, std::span<const double> h,
                       const std::vector<std::uint8_t>& in_sample,
                       const std::vector<int>& features, const GbtParams& params) {
  GbtTree tree;
  tree.nodes.emplace_back();

  std::vector<std::int32_t> position(X.rows, -1);
  GbtNodeAgg root;
  root.node = 0;
  for (std::size_t row = 0; row < X.rows; ++row) {
    if (!in_sample[row]) continue;
    position[row] = 0;
    root.sum_g += g[row];
    root.sum_h += h[row];
    ++root.count;
  }
  if (root.count == 0) {
    tree.nodes[0].value = 0.0;
    return tree;
  }

  std::vector<GbtNodeAgg> active{root};
  std::vector<std::int32_t> slot_of_node;

  for (int depth = 0;; ++depth) {
    if (active.empty()) break;
    if (depth >= params.max_depth) {
      for (const auto& agg : active)
        tree.nodes[static_cast<std::size_t>(agg.node)].value =
            -agg.sum_g / (agg.sum_h + params.lambda);
      break;
    }

    slot_of_node.assign(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < active.size(); ++s)
      slot_of_node[static_cast<std::size_t>(active[s].node)] = static_cast<std::int32_t>(s);

    // per feature, per slot candidate; reduced over features in index order
    std::vector<std::vector<GbtBestSplit>> per_feature(features.size());
    std::vector<double> run_g(active.size()), run_h(active.size());
    std::vector<std::int64_t> run_count(active.size());
    std::vector<double> prev_value(active.size());
    std::vector<std::uint8_t> started(active.size());

    const bool parallel_features = max_threads() > 1;
    std::vector<std::vector<double>> tl_run_g, tl_run_h, tl_prev;
    std::vector<std::vector<std::int64_t>> tl_count;
    std::vector<std::vector<std::uint8_t>> tl_started;

    auto scan_feature = [&](std::size_t fi, std::vector<double>& rg, std::vector<double>& rh,
                            std::vector<std::int64_t>& rc, std::vector<double>& pv,
                            std::vector<std::uint8_t>& st) {
      const int feature = features[fi];
      auto& best = per_feature[fi];
      best.assign(active.size(), GbtBestSplit{});
      std::fill(rg.begin(), rg.end(), 0.0);
      std::fill(rh.begin(), rh.end(), 0.0);
      std::fill(rc.begin(), rc.end(), 0);
      std::fill(st.begin(), st.end(), 0);

      for (const std::uint32_t row : sorted.order[static_cast<std::size_t>(feature)]) {
        const std::int32_t node = position[row];
        if (node < 0) continue;
        const std::int32_t slot = slot_of_node[static_cast<std::size_t>(node)];
        if (slot < 0) continue;
        const std::size_t s = static_cast<std::size_t>(slot);
        const double v = X.at(row, static_cast<std::size_t>(feature));
        if (st[s] && v != pv[s]) {
          const GbtNodeAgg& agg = active[s];
          const double gl = rg[s], hl = rh[s];
          const double gr = agg.sum_g - gl, hr = agg.sum_h - hl;
          if (hl >= params.min_child_weight && hr >= params.min_child_weight && rc[s] > 0 &&
              rc[s] < agg.count) {
            const double gain = 0.5 * (leaf_objective(gl, hl, params.lambda) +
                                       leaf_objective(gr, hr, params.lambda) -
                                       leaf_objective(agg.sum_g, agg.sum_h, params.lambda));
            if (gain > kMinGbtGain && (!best[s].found || gain > best[s].gain)) {
              double threshold = pv[s] + (v - pv[s]) / 2.0;
              if (!(threshold < v)) threshold = pv[s];
              best[s] = {gain, feature, threshold, true};
            }
          }
        }
        rg[s] += g[row];
        rh[s] += h[row];
        ++rc[s];
        pv[s] = v;
        st[s] = 1;
      }
    };

    if (parallel_features) {
      const std::size_t workers = static_cast<std::size_t>(max_threads());
      tl_run_g.assign(workers, run_g);
      tl_run_h.assign(workers, run_h);
      tl_count.assign(workers, run_count);
      tl_prev.assign(workers, prev_value);
      tl_started.assign(workers, started);
      std::atomic<std::size_t> worker_ids{0};
      // each worker owns scratch keyed by a grabbed id; results land in
      // per_feature slots, so scheduling cannot change the outcome
      parallel_for(features.size(), [&](std::size_t fi) {
        thread_local std::size_t worker = SIZE_MAX;
        if (worker == SIZE_MAX) worker = worker_ids.fetch_add(1) % workers;
        scan_feature(fi, tl_run_g[worker], tl_run_h[worker], tl_count[worker], tl_prev[worker],
                     tl_started[worker]);
      });
    } else {
      for (std::size_t fi = 0; fi < features.size(); ++fi)
        scan_feature(fi, run_g, run_h, run_count, prev_value, started);
    }

    std::vector<GbtBestSplit> best(active.size());
    for (std::size_t fi = 0; fi < features.size(); ++fi)
      for (std::size_t s = 0; s < active.size(); ++s) {
        const auto& cand = per_feature[fi][s];
        if (cand.found && (!best[s].found || cand.gain > best[s].gain)) best[s] = cand;
      }

    // finalize leaves, materialize children for split nodes
    std::vector<GbtNodeAgg> next;
    bool any_split = false;
    for (std::size_t s = 0; s < active.size(); ++s) {
      if (!best[s].found) {
        GbtNode& node = tree.nodes[static_cast<std::size_t>(active[s].node)];
        node.value = -active[s].sum_g / (active[s].sum_h + params.lambda);
        continue;
      }
      any_split = true;
      const std::int32_t left_index = static_cast<std::int32_t>(tree.nodes.size());
      const std::int32_t right_index = left_index + 1;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      GbtNode& node = tree.nodes[static_cast<std::size_t>(active[s].node)];
      node.feature = best[s].feature;
      node.threshold = best[s].threshold;
      node.left = left_index;
      node.right = right_index;
      GbtNodeAgg left, right;
      left.node = left_index;
      right.node = right_index;
      next.push_back(left);
      next.push_back(right);
    }
    if (!any_split) break;

    // route rows of split nodes to their children and aggregate
    std::vector<std::int32_t> child_slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < next.size(); ++s)
      child_slot[static_cast<std::size_t>(next[s].node)] = static_cast<std::int32_t>(s);
    for (std::size_t row = 0; row < X.rows; ++row) {
      const std::int32_t pos = position[row];
      if (pos < 0) continue;
      const GbtNode& node = tree.nodes[static_cast<std::size_t>(pos)];
      if (node.is_leaf()) {
        position[row] = -1;  // settled in a leaf; drop from future passes
        continue;
      }
      const std::int32_t child = X.at(row, static_cast<std::size_t>(node.feature)) <= node.threshold
                                     ? node.left
                                     : node.right;
      position[row] = child;
      GbtNodeAgg& agg = next[static_cast<std::size_t>(child_slot[static_cast<std::size_t>(child)])];
      agg.sum_g += g[row];
      agg.sum_h += h[row];
      ++agg.count;
    }
    active = std::move(next);
  }
  return tree;
}

std::vector<std::uint8_t> draw_row_mask(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::uint8_t> mask(n, 1);
  if (fraction >= 1.0) return mask;
  std::size_t take = static_cast<std::size_t>(fraction * static_cast<double>(n));
  if (take == 0) take = 1;
  std::fill(mask.begin(), mask.end(), 0);
  for (const std::uint32_t row : rng.sample_without_replacement(n, take)) mask[row] = 1;
  return mask;
}

std::vector<int> draw_columns(std::size_t dim, double fraction, Rng& rng) {
  std::vector<int> features;
  if (fraction >= 1.0) {
    features.resize(dim);
    std::iota(features.begin(), features.end(), 0);
    return features;
  }
  std::size_t take = static_cast<std::size_t>(fraction * static_cast<double>(dim));
  if (take == 0) take = 1;
  for (const std::uint32_t f : rng.sample_without_replacement(dim, take))
    features.push_back(static_cast<int>(f));
  return features;
}

}  // namespace

GbtTree fit_gradient_tree(const DesignMatrix& X, std::span<const double> g,
                          std::span<const double> h, const GbtParams& params, Rng& rng) {
  if (g.size() != X.rows || h.size() != X.rows)
    throw std::invalid_argument("fit_gradient_tree: gradient size mismatch");
  const SortedColumns sorted = SortedColumns::build(X);
  const std::vector<std::uint8_t> mask = draw_row_mask(X.rows, params.subsample, rng);
  const std::vector<int> features = draw_columns(X.dim, params.colsample, rng);
  return build_gbt_tree(X, sorted, g, h, mask, features, params);
}

GbtTraining train_gbt(const DesignMatrix& X, const GbtParams& params) {
  if (X.rows == 0) throw std::invalid_argument("cannot train on an empty matrix");
  if (params.n_rounds < 0) throw std::invalid_argument("n_rounds must be >= 0");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
    throw std::invalid_argument("learning rate must lie in (0, 1]");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0) ||
      !(params.colsample > 0.0 && params.colsample <= 1.0))
    throw std::invalid_argument("subsample fractions must lie in (0, 1]");
  if (params.lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

  GbtTraining result;
  GbtModel& model = result.model;
  model.dim = X.dim;
  model.n_rounds = params.n_rounds;
  model.learning_rate = params.learning_rate;

  // log class priors; softmax of the base scores reproduces the priors
  std::array<std::int64_t, kNumClasses> counts{};
  for (const std::uint8_t label : X.labels) ++counts[label];
  for (int k = 0; k < kNumClasses; ++k) {
    const double c = std::max<double>(static_cast<double>(counts[static_cast<std::size_t>(k)]), 0.5);
    model.base_score[static_cast<std::size_t>(k)] =
        std::log(c / static_cast<double>(X.rows));
  }

  if (params.n_rounds == 0) return result;

  const SortedColumns sorted = SortedColumns::build(X);
  std::vector<double> scores(X.rows * kNumClasses);
  for (std::size_t i = 0; i < X.rows; ++i)
    for (int k = 0; k < kNumClasses; ++k)
      scores[i * kNumClasses + static_cast<std::size_t>(k)] =
          model.base_score[static_cast<std::size_t>(k)];

  std::vector<double> grad(scores.size()), hess(scores.size());
  std::vector<double> g_k(X.rows), h_k(X.rows);
  model.trees.reserve(static_cast<std::size_t>(params.n_rounds) * kNumClasses);

  auto training_loss = [&]() {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double* z = scores.data() + i * kNumClasses;
      double zmax = z[0];
      for (int k = 1; k < kNumClasses; ++k) zmax = std::max(zmax, z[k]);
      double sum = 0.0;
      for (int k = 0; k < kNumClasses; ++k) sum += std::exp(z[k] - zmax);
      loss += std::log(sum) - (z[X.labels[i]] - zmax);
    }
    return loss / static_cast<double>(X.rows);
  };

  for (int round = 0; round < params.n_rounds; ++round) {
    softmax_grad_hess(scores, X.labels, grad, hess);
    for (int k = 0; k < kNumClasses; ++k) {
      for (std::size_t i = 0; i < X.rows; ++i) {
        g_k[i] = grad[i * kNumClasses + static_cast<std::size_t>(k)];
        h_k[i] = hess[i * kNumClasses + static_cast<std::size_t>(k)];
      }
      const std::uint64_t tree_index =
          static_cast<std::uint64_t>(round) * kNumClasses + static_cast<std::uint64_t>(k);
      Rng row_rng = Rng::stream(params.seed, kTagRowSample, tree_index);
      Rng col_rng = Rng::stream(params.seed, kTagColSample, tree_index);
      const std::vector<std::uint8_t> mask = draw_row_mask(X.rows, params.subsample, row_rng);
      const std::vector<int> features = draw_columns(X.dim, params.colsample, col_rng);
      GbtTree tree = build_gbt_tree(X, sorted, g_k, h_k, mask, features, params);

      // scores advance for every row, sampled or not
      parallel_chunks(X.rows, 16384, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
          scores[i * kNumClasses + static_cast<std::size_t>(k)] +=
              params.learning_rate * gbt_leaf_value(tree, X.row(i));
      });
      model.trees.push_back(std::move(tree));
    }
    const double loss = training_loss();
    if (!std::isfinite(loss)) throw NumericError("boosting diverged: non-finite training loss");
    result.round_losses.push_back(loss);
  }
  return result;
}

double gbt_leaf_value(const GbtTree& tree, const double* x) {
  const GbtNode* node = &tree.nodes[0];
  while (!node->is_leaf()) {
    if (x[node->feature] <= node->threshold)
      node = &tree.nodes[static_cast<std::size_t>(node->left)];
    else
      node = &tree.nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

std::vector<double> predict_proba(const GbtModel& model, const DesignMatrix& X) {
  X.check_dim(model.dim);
  std::vector<double> proba(X.rows * kNumClasses);
  parallel_chunks(X.rows, 8192, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* z = proba.data() + i * kNumClasses;
      const double* x = X.row(i);
      for (int k = 0; k < kNumClasses; ++k) z[k] = model.base_score[static_cast<std::size_t>(k)];
      for (std::size_t t = 0; t < model.trees.size(); ++t)
        z[t % kNumClasses] += model.learning_rate * gbt_leaf_value(model.trees[t], x);
      double zmax = z[0];
      for (int k = 1; k < kNumClasses; ++k) zmax = std::max(zmax, z[k]);
      double sum = 0.0;
      for (int k = 0; k < kNumClasses; ++k) {
        z[k] = std::exp(z[k] - zmax);
        sum += z[k];
      }
      const double inv = 1.0 / sum;
      for (int k = 0; k < kNumClasses; ++k) z[k] *= inv;
    }
  });
  return proba;
}

std::vector<std::uint8_t> predict(const GbtModel& model, const DesignMatrix& X) {
  const std::vector<double> proba = predict_proba(model, X);
  std::vector<std::uint8_t> labels(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i)
    labels[i] = argmax_class({proba.data() + i * kNumClasses, kNumClasses});
  return labels;
}

}  // namespace nids
