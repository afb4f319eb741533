#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "gfmm/errors.hpp"
#include "gfmm/tree.hpp"
#include "support/generators.hpp"

using namespace gfmm;
using gfmm::testing::Gen;

namespace {

TreeTable categorical_table(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels) {
  TreeTable t;
  t.rows = rows.size();
  t.categorical = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) t.c.insert(t.c.end(), r.begin(), r.end());
  t.labels = labels;
  return t;
}

std::vector<std::size_t> counts_of(const std::vector<int>& labels, std::size_t p) {
  std::vector<std::size_t> c(p, 0);
  for (int y : labels) c[static_cast<std::size_t>(y)] += 1;
  return c;
}

/// Weighted Gini of a partition of `labels`, by brute force.
double partition_gini(const std::vector<std::vector<int>>& parts, std::size_t p, double total) {
  double s = 0;
  for (const auto& part : parts) s += static_cast<double>(part.size()) * gini(counts_of(part, p));
  return s / total;
}

}  // namespace

TEST_CASE("gini impurity") {
  CHECK(gini({4, 0}) == 0.0);
  CHECK(gini({2, 2}) == 0.5);
  CHECK(gini({}) == 0.0);
}

TEST_CASE("pure input gives a single leaf") {
  const auto t = categorical_table({{0}, {1}, {2}}, {1, 1, 1});
  const auto tree = DecisionTree::train(t, 2);
  CHECK(tree.nodes().size() == 1);
  CHECK(tree.nodes()[0].majority == 1);
}

TEST_CASE("XOR over two binary features is learned exactly at depth 2") {
  const auto t = categorical_table({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  const auto tree = DecisionTree::train(t, 2, 2);
  CHECK(tree.predict_all(t) == t.labels);
  CHECK(tree.leaves() == 4);
  CHECK(tree.depth() == 2);
}

TEST_CASE("max depth 0 gives a majority stump with ties to the lowest class") {
  const auto t = categorical_table({{0}, {1}, {0}, {1}}, {1, 0, 0, 1});
  const auto tree = DecisionTree::train(t, 2, 0);
  CHECK(tree.nodes().size() == 1);
  CHECK(tree.nodes()[0].majority == 0);
  const auto t2 = categorical_table({{0}, {1}, {0}}, {1, 0, 1});
  CHECK(DecisionTree::train(t2, 2, 0).predict(nullptr, t2.cat(1)) == 1);
}

TEST_CASE("unseen categorical value follows the largest child") {
  const auto t = categorical_table({{0}, {0}, {0}, {1}, {2}}, {0, 0, 0, 1, 1});
  const auto tree = DecisionTree::train(t, 2);
  const int unseen = 9;
  CHECK(tree.nodes()[0].kind == TreeNode::Kind::Multiway);
  CHECK(tree.predict(nullptr, &unseen) == 0);
}

TEST_CASE("level-2 table with agreeing columns reproduces the agreed label") {
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int rep = 0; rep < 4; ++rep)
    for (int y = 0; y < 3; ++y) {
      rows.push_back({y, y});
      labels.push_back(y);
    }
  const auto t = categorical_table(rows, labels);
  const auto tree = DecisionTree::train(t, 3);
  for (int y = 0; y < 3; ++y) {
    const int x[2] = {y, y};
    CHECK(tree.predict(nullptr, x) == y);
  }
}

TEST_CASE("property: the root split is the best Gini split") {
  Gen gen(41);
  for (int trial = 0; trial < 300; ++trial) {
    TreeTable t;
    t.rows = static_cast<std::size_t>(gen.integer(2, 25));
    t.numeric = static_cast<std::size_t>(gen.integer(0, 2));
    t.categorical = static_cast<std::size_t>(gen.integer(t.numeric == 0 ? 1 : 0, 2));
    const std::size_t p = static_cast<std::size_t>(gen.integer(2, 3));
    for (std::size_t i = 0; i < t.rows; ++i) {
      for (std::size_t j = 0; j < t.numeric; ++j) t.x.push_back(gen.grid(6));
      for (std::size_t j = 0; j < t.categorical; ++j) t.c.push_back(gen.integer(0, 2));
      t.labels.push_back(gen.integer(0, static_cast<int>(p) - 1));
    }
    const auto tree = DecisionTree::train(t, p, 1);
    const auto& root = tree.nodes()[0];
    const double total = static_cast<double>(t.rows);

    double best = INFINITY;
    for (std::size_t j = 0; j < t.numeric; ++j) {
      std::set<double> values;
      for (std::size_t i = 0; i < t.rows; ++i) values.insert(t.num(i)[j]);
      for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
        const double cut = (*it + *std::next(it)) / 2;
        std::vector<std::vector<int>> parts(2);
        for (std::size_t i = 0; i < t.rows; ++i) parts[t.num(i)[j] <= cut ? 0 : 1].push_back(t.labels[i]);
        best = std::min(best, partition_gini(parts, p, total));
      }
    }
    for (std::size_t j = 0; j < t.categorical; ++j) {
      std::map<int, std::vector<int>> groups;
      for (std::size_t i = 0; i < t.rows; ++i) groups[t.cat(i)[j]].push_back(t.labels[i]);
      if (groups.size() < 2) continue;
      std::vector<std::vector<int>> parts;
      for (auto& [v, g] : groups) parts.push_back(g);
      best = std::min(best, partition_gini(parts, p, total));
    }

    if (root.kind == TreeNode::Kind::Leaf) {
      // Either the node is pure or no feature separates the rows.
      CHECK((gini(root.counts) == 0.0 || best == INFINITY));
      continue;
    }
    std::vector<std::vector<int>> chosen;
    if (root.kind == TreeNode::Kind::Threshold) {
      chosen.resize(2);
      for (std::size_t i = 0; i < t.rows; ++i)
        chosen[t.num(i)[root.feature] <= root.threshold ? 0 : 1].push_back(t.labels[i]);
    } else {
      std::map<int, std::vector<int>> groups;
      for (std::size_t i = 0; i < t.rows; ++i) groups[t.cat(i)[root.feature]].push_back(t.labels[i]);
      for (auto& [v, g] : groups) chosen.push_back(g);
    }
    CHECK(partition_gini(chosen, p, total) <= best + 1e-12);
  }
}

TEST_CASE("stacking requires both feature kinds") {
  Gen gen(42);
  const auto numeric_only = gen.mixed(20, 2, 0, 2, 3);
  const auto categorical_only = gen.mixed(20, 0, 2, 2, 3);
  NumericLearnerConfig cfg;
  CHECK_THROWS_AS(train_stacked_a(numeric_only, cfg), NoCategoricalFeatures);
  CHECK_THROWS_AS(train_stacked_a(categorical_only, cfg), NoNumericFeatures);
  CHECK_THROWS_AS(train_stacked_b(categorical_only, cfg, 0), NoNumericFeatures);
}

TEST_CASE("stacked models predict valid labels and are deterministic") {
  Gen gen(43);
  const auto d = gen.mixed(60, 2, 2, 3, 4);
  NumericLearnerConfig cfg;
  cfg.algorithm = Algorithm::Iol;
  cfg.theta = 0.7;
  for (int scheme = 0; scheme < 2; ++scheme) {
    const auto m = scheme == 0 ? train_stacked_a(d, cfg) : train_stacked_b(d, cfg, 5);
    const auto again = scheme == 0 ? train_stacked_a(d, cfg) : train_stacked_b(d, cfg, 5);
    const auto p = m.predict_all(d);
    CHECK(p == again.predict_all(d));
    for (int y : p) CHECK((y >= 0 && y < 3));
  }
}
