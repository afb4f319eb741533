#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gfmm/dataset.hpp"
#include "gfmm/learners.hpp"

namespace gfmm {

/// Row-major training table for the decision tree. Numeric and categorical
/// features are stored separately; categorical values are arbitrary integers.
struct TreeTable {
  std::size_t rows = 0;
  std::size_t numeric = 0;
  std::size_t categorical = 0;
  std::vector<double> x;  // rows x numeric
  std::vector<int> c;     // rows x categorical
  std::vector<int> labels;

  const double* num(std::size_t i) const { return x.data() + i * numeric; }
  const int* cat(std::size_t i) const { return c.data() + i * categorical; }

  /// Categorical codes of a dataset (numeric features dropped).
  static TreeTable from_categorical(const Dataset& data);
};

struct TreeNode {
  enum class Kind { Leaf, Threshold, Multiway };
  Kind kind = Kind::Leaf;
  std::size_t feature = 0;
  double threshold = 0;               // Threshold: left when value <= threshold
  std::vector<int> values;            // Multiway: branch value per child
  std::vector<std::size_t> children;  // node indices
  std::size_t fallback = 0;           // Multiway: child with the largest training mass
  std::vector<std::size_t> counts;    // class distribution of the training rows
  int majority = 0;
  std::size_t depth = 0;
};

class DecisionTree {
 public:
  DecisionTree() = default;

  /// Greedy Gini tree. Numeric features split at midpoints between adjacent
  /// distinct values; categorical features split multiway on the values
  /// present at the node. An impure node is split even when the best split does
  /// not lower the impurity. A node becomes a leaf when it is pure, at
  /// `max_depth`, or when no feature separates its rows.
  static DecisionTree train(const TreeTable& table, std::size_t class_count, std::size_t max_depth = 10);

  int predict(const double* num, const int* cat) const;
  std::vector<int> predict_all(const TreeTable& table) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t max_depth() const { return max_depth_; }
  std::size_t leaves() const;

 private:
  std::size_t grow(const TreeTable& t, std::vector<std::size_t>& idx, std::size_t depth);
  std::vector<TreeNode> nodes_;
  std::size_t class_count_ = 0;
  std::size_t max_depth_ = 10;
};

double gini(const std::vector<std::size_t>& counts);

enum class StackingScheme { TrainOnly, TrainValid };

/// GFMM over numeric features plus a tree over categorical features, combined
/// by a level-2 tree over their two predicted labels.
struct StackedModel {
  StackingScheme scheme = StackingScheme::TrainOnly;
  GfmmModel gfmm;
  DecisionTree level1_tree;
  DecisionTree level2_tree;

  int predict(const MixedSample& x) const;
  std::vector<int> predict_all(const Dataset& data) const;
};

/// Level-1 models fit on the whole training set and re-applied to it.
StackedModel train_stacked_a(const Dataset& train, const NumericLearnerConfig& cfg, std::size_t max_depth = 10);
/// Level-1 models fit on one stratified half, level-2 on predictions for the other.
StackedModel train_stacked_b(const Dataset& train, const NumericLearnerConfig& cfg, std::uint64_t seed,
                             std::size_t max_depth = 10);

}  // namespace gfmm
