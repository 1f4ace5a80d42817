#include <doctest.h>

#include <numeric>

#include "rng.hpp"
#include "support/fixtures.hpp"
#include "tree.hpp"

using namespace nids;
using namespace nids::testing;

namespace {

bool same_structure(const Tree& a, const Tree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const TreeNode& x = a.nodes[i];
    const TreeNode& y = b.nodes[i];
    if (x.feature != y.feature || x.threshold != y.threshold || x.left != y.left ||
        x.right != y.right || x.counts != y.counts)
      return false;
  }
  return true;
}

DesignMatrix random_separable(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(rng.below(kNumClasses));
    for (std::size_t j = 0; j < d; ++j)
      rows[i][j] = rng.next_double() + (j == 0 ? labels[i] * 0.1 : 0.0);
  }
  return make_matrix(rows, labels);
}

}  // namespace

TEST_CASE("gini closed forms") {
  CHECK(gini(std::array<std::int64_t, 5>{10, 0, 0, 0, 0}) == 0.0);
  CHECK(gini(std::array<std::int64_t, 5>{1, 1, 0, 0, 0}) == 0.5);
  CHECK(gini(std::array<std::int64_t, 5>{2, 1, 1, 0, 0}) == 0.625);
  CHECK(gini(std::array<std::int64_t, 5>{1, 1, 1, 1, 1}) == doctest::Approx(0.8));  // 1 - 1/K
  CHECK_THROWS_AS(gini(std::array<std::int64_t, 5>{0, 0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("split gain closed forms") {
  const std::array<std::int64_t, 5> parent{1, 1, 0, 0, 0};
  SUBCASE("perfect separation of a 50/50 node gains 0.5") {
    CHECK(split_gain(parent, std::array<std::int64_t, 5>{1, 0, 0, 0, 0},
                     std::array<std::int64_t, 5>{0, 1, 0, 0, 0}) == 0.5);
  }
  SUBCASE("children with the parent's mix gain 0") {
    const std::array<std::int64_t, 5> p2{2, 2, 0, 0, 0};
    CHECK(split_gain(p2, std::array<std::int64_t, 5>{1, 1, 0, 0, 0},
                     std::array<std::int64_t, 5>{1, 1, 0, 0, 0}) == 0.0);
  }
  SUBCASE("children must partition the parent") {
    CHECK_THROWS_AS(split_gain(parent, std::array<std::int64_t, 5>{1, 0, 0, 0, 0},
                               std::array<std::int64_t, 5>{1, 1, 0, 0, 0}),
                    std::invalid_argument);
  }
  SUBCASE("gain is non-negative on random legal splits") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      std::array<std::int64_t, 5> p{}, l{}, r{};
      for (int k = 0; k < 5; ++k) {
        l[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rng.below(20));
        r[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rng.below(20));
        p[static_cast<std::size_t>(k)] = l[static_cast<std::size_t>(k)] + r[static_cast<std::size_t>(k)];
      }
      if (std::accumulate(l.begin(), l.end(), std::int64_t{0}) == 0 ||
          std::accumulate(r.begin(), r.end(), std::int64_t{0}) == 0)
        continue;
      CHECK(split_gain(p, l, r) >= -1e-12);
    }
  }
}

TEST_CASE("find_best_split fundamentals") {
  const std::vector<int> all_features{0};
  SUBCASE("single midpoint: values [0,1], two classes") {
    const DesignMatrix X = make_matrix({{0.0}, {1.0}}, {0, 1});
    const std::vector<std::uint32_t> rows{0, 1};
    const auto split = find_best_split(X, rows, all_features, 1);
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
    CHECK(split->threshold == 0.5);
    CHECK(split->gain == 0.5);
  }
  SUBCASE("constant feature yields nothing") {
    const DesignMatrix X = make_matrix({{3.0}, {3.0}}, {0, 1});
    const std::vector<std::uint32_t> rows{0, 1};
    CHECK(!find_best_split(X, rows, all_features, 1).has_value());
  }
  SUBCASE("equal gain on two features resolves to the lower index") {
    // feature 1 mirrors feature 0, both separate the classes perfectly
    const DesignMatrix X = make_matrix({{0.0, 0.0}, {1.0, 1.0}}, {0, 1});
    const std::vector<std::uint32_t> rows{0, 1};
    const std::vector<int> features{0, 1};
    const auto split = find_best_split(X, rows, features, 1);
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
  }
  SUBCASE("min_samples_leaf disallows degenerate children") {
    const DesignMatrix X = make_matrix({{0.0}, {1.0}, {1.0}, {1.0}}, {0, 1, 1, 1});
    const std::vector<std::uint32_t> rows{0, 1, 2, 3};
    const auto split = find_best_split(X, rows, all_features, 2);
    CHECK(!split.has_value());  // the only boundary leaves one row on the left
  }
}

TEST_CASE("growth on the xor fixture") {
  // (0,0) and (1,1) are one class, (0,1) and (1,0) the other: every single
  // split has zero gain, so depth 2 must still be reachable through it
  const DesignMatrix X =
      make_matrix({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}, {0, 1, 1, 0});
  SUBCASE("depth 2 fits the data exactly") {
    TreeParams p{.max_depth = 2, .min_samples_leaf = 1, .min_samples_split = 2};
    const Tree tree = grow(X, p);
    const auto pred = predict(tree, X);
    for (std::size_t i = 0; i < X.rows; ++i) CHECK(pred[i] == X.labels[i]);
    CHECK(tree.depth == 2);
  }
  SUBCASE("depth 1 cannot represent it") {
    TreeParams p{.max_depth = 1, .min_samples_leaf = 1, .min_samples_split = 2};
    const Tree tree = grow(X, p);
    const auto pred = predict(tree, X);
    int correct = 0;
    for (std::size_t i = 0; i < X.rows; ++i) correct += pred[i] == X.labels[i];
    CHECK(correct <= 3);  // == 0.75 accuracy at best
  }
}

TEST_CASE("stopping rules") {
  SUBCASE("pure input becomes a single leaf") {
    const DesignMatrix X = make_matrix({{0.0}, {1.0}, {2.0}}, {2, 2, 2});
    const Tree tree = grow(X, TreeParams{.max_depth = 10, .min_samples_leaf = 1});
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(tree.depth == 0);
    CHECK(tree.nodes[0].prob[2] == 1.0);
  }
  SUBCASE("depth never exceeds max_depth") {
    const DesignMatrix X = random_separable(200, 3, 19);
    for (const int depth : {1, 2, 4, 7}) {
      TreeParams p{.max_depth = depth, .min_samples_leaf = 1, .min_samples_split = 2};
      CHECK(grow(X, p).depth <= depth);
    }
  }
  SUBCASE("every leaf respects min_samples_leaf") {
    const DesignMatrix X = random_separable(300, 3, 23);
    TreeParams p{.max_depth = 0, .min_samples_leaf = 7, .min_samples_split = 14};
    const Tree tree = grow(X, p);
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) continue;
      const std::int64_t total = std::accumulate(node.counts.begin(), node.counts.end(), std::int64_t{0});
      CHECK(total >= 7);
    }
  }
}

TEST_CASE("an unconstrained tree memorizes conflict-free data") {
  const DesignMatrix X = random_separable(250, 4, 29);
  TreeParams p{.max_depth = 0, .min_samples_leaf = 1, .min_samples_split = 2};
  const Tree tree = grow(X, p);
  const auto pred = predict(tree, X);
  for (std::size_t i = 0; i < X.rows; ++i) CHECK(pred[i] == X.labels[i]);
}

TEST_CASE("routing sends boundary values left") {
  // hand-built stump: feature 0, threshold 2.5
  Tree tree;
  tree.dim = 1;
  tree.nodes.resize(3);
  tree.nodes[0].feature = 0;
  tree.nodes[0].threshold = 2.5;
  tree.nodes[0].left = 1;
  tree.nodes[0].right = 2;
  tree.nodes[1].prob = {1, 0, 0, 0, 0};
  tree.nodes[2].prob = {0, 1, 0, 0, 0};

  const DesignMatrix X = make_matrix({{2.5}, {2.5000001}}, {0, 0});
  const auto pred = predict(tree, X);
  CHECK(pred[0] == 0);  // exactly equal routes left
  CHECK(pred[1] == 1);

  SUBCASE("grown trees follow the same rule") {
    const DesignMatrix train = make_matrix({{0.0}, {1.0}}, {0, 1});
    const Tree grown = grow(train, TreeParams{.max_depth = 5, .min_samples_leaf = 1,
                                              .min_samples_split = 2});
    REQUIRE(!grown.nodes[0].is_leaf());
    const DesignMatrix probe = make_matrix({{0.5}}, {0});
    CHECK(predict(grown, probe)[0] == 0);  // 0.5 <= 0.5 goes left
  }
}

TEST_CASE("training rows land in their own pure leaves") {
  const DesignMatrix X = random_separable(64, 3, 37);
  TreeParams p{.max_depth = 0, .min_samples_leaf = 1, .min_samples_split = 2};
  const Tree tree = grow(X, p);
  const auto proba = predict_proba(tree, X);
  for (std::size_t i = 0; i < X.rows; ++i)
    CHECK(proba[i * kNumClasses + X.labels[i]] == 1.0);
}

TEST_CASE("single-leaf trees hand out the training distribution") {
  const DesignMatrix X = make_matrix({{0.0}, {0.0}, {0.0}, {0.0}}, {0, 0, 1, 2});
  const Tree tree = grow(X, TreeParams{.max_depth = 0, .min_samples_leaf = 4});
  REQUIRE(tree.nodes.size() == 1);
  const DesignMatrix probe = make_matrix({{123.0}}, {0});
  const auto proba = predict_proba(tree, probe);
  CHECK(proba[0] == 0.5);
  CHECK(proba[1] == 0.25);
  CHECK(proba[2] == 0.25);
}

TEST_CASE("growth is deterministic, including with feature subsampling") {
  const DesignMatrix X = random_separable(150, 6, 43);
  TreeParams p{.max_depth = 0, .min_samples_leaf = 2, .min_samples_split = 4, .mtry = 2,
               .seed = 99};
  const Tree a = grow(X, p);
  const Tree b = grow(X, p);
  CHECK(same_structure(a, b));

  p.seed = 100;
  const Tree c = grow(X, p);
  CHECK(!same_structure(a, c));  // a different stream picks different candidates
}

TEST_CASE("leaf probabilities are normalized counts") {
  const DesignMatrix X = random_separable(120, 3, 47);
  const Tree tree = grow(X, TreeParams{.max_depth = 3, .min_samples_leaf = 5});
  for (const TreeNode& node : tree.nodes) {
    double sum = 0;
    for (int k = 0; k < kNumClasses; ++k) sum += node.prob[static_cast<std::size_t>(k)];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
