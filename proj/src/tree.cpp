#include "gfmm/tree.hpp"

#include <algorithm>
#include <map>

#include "gfmm/errors.hpp"

namespace gfmm {

namespace {

constexpr double kMinGain = 1e-12;

int argmax(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return static_cast<int>(best);
}

std::vector<std::size_t> count_labels(const TreeTable& t, const std::vector<std::size_t>& idx, std::size_t p) {
  std::vector<std::size_t> counts(p, 0);
  for (auto i : idx) counts[static_cast<std::size_t>(t.labels[i])] += 1;
  return counts;
}

struct SplitChoice {
  TreeNode::Kind kind = TreeNode::Kind::Leaf;
  std::size_t feature = 0;
  double threshold = 0;
  double gain = -1;  // any split that separates the rows beats no split
};

}  // namespace

double gini(const std::vector<std::size_t>& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0) return 0;
  double sum = 0;
  for (auto c : counts) {
    const double q = static_cast<double>(c) / total;
    sum += q * q;
  }
  return 1.0 - sum;
}

TreeTable TreeTable::from_categorical(const Dataset& data) {
  TreeTable t;
  t.rows = data.size();
  t.categorical = data.r();
  t.c.reserve(t.rows * t.categorical);
  for (const auto& s : data.samples) {
    t.c.insert(t.c.end(), s.categorical.begin(), s.categorical.end());
    t.labels.push_back(s.label.value_or(0));
  }
  return t;
}

DecisionTree DecisionTree::train(const TreeTable& table, std::size_t class_count, std::size_t max_depth) {
  if (table.rows == 0) throw TooFewSamples("decision tree needs at least one row");
  DecisionTree tree;
  tree.class_count_ = class_count;
  for (int y : table.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= class_count) throw MissingLabels("tree label out of range");
  tree.max_depth_ = max_depth;
  std::vector<std::size_t> idx(table.rows);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  tree.grow(table, idx, 0);
  return tree;
}

std::size_t DecisionTree::grow(const TreeTable& t, std::vector<std::size_t>& idx, std::size_t depth) {
  const std::size_t id = nodes_.size();
  nodes_.emplace_back();
  {
    auto& node = nodes_[id];
    node.counts = count_labels(t, idx, class_count_);
    node.majority = argmax(node.counts);
    node.depth = depth;
  }
  const auto counts = nodes_[id].counts;
  const double parent = gini(counts);
  if (parent == 0 || depth >= max_depth_) return id;

  const double total = static_cast<double>(idx.size());
  SplitChoice best;

  for (std::size_t j = 0; j < t.numeric; ++j) {
    std::vector<std::size_t> order = idx;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.num(a)[j] < t.num(b)[j]; });
    std::vector<std::size_t> left(class_count_, 0), right = counts;
    for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
      const auto y = static_cast<std::size_t>(t.labels[order[pos]]);
      left[y] += 1;
      right[y] -= 1;
      const double a = t.num(order[pos])[j], b = t.num(order[pos + 1])[j];
      if (!(a < b)) continue;
      const double nl = static_cast<double>(pos + 1);
      const double child = (nl * gini(left) + (total - nl) * gini(right)) / total;
      const double gain = parent - child;
      if (gain > best.gain + kMinGain) best = {TreeNode::Kind::Threshold, j, a + (b - a) / 2.0, gain};
    }
  }
  for (std::size_t j = 0; j < t.categorical; ++j) {
    std::map<int, std::vector<std::size_t>> groups;
    for (auto i : idx) {
      auto& g = groups[t.cat(i)[j]];
      if (g.empty()) g.assign(class_count_, 0);
      g[static_cast<std::size_t>(t.labels[i])] += 1;
    }
    if (groups.size() < 2) continue;
    double child = 0;
    for (const auto& [value, g] : groups) {
      double m = 0;
      for (auto c : g) m += static_cast<double>(c);
      child += m * gini(g);
    }
    const double gain = parent - child / total;
    if (gain > best.gain + kMinGain) best = {TreeNode::Kind::Multiway, j, 0, gain};
  }
  if (best.kind == TreeNode::Kind::Leaf) return id;

  nodes_[id].kind = best.kind;
  nodes_[id].feature = best.feature;
  if (best.kind == TreeNode::Kind::Threshold) {
    nodes_[id].threshold = best.threshold;
    std::vector<std::size_t> l, r;
    for (auto i : idx) (t.num(i)[best.feature] <= best.threshold ? l : r).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const auto lc = grow(t, l, depth + 1);
    const auto rc = grow(t, r, depth + 1);
    nodes_[id].children = {lc, rc};
    return id;
  }
  std::map<int, std::vector<std::size_t>> parts;
  for (auto i : idx) parts[t.cat(i)[best.feature]].push_back(i);
  idx.clear();
  idx.shrink_to_fit();
  std::vector<int> values;
  std::vector<std::size_t> children;
  std::size_t fallback = 0, fallback_mass = 0;
  for (auto& [value, rows] : parts) {
    const std::size_t mass = rows.size();
    const auto child = grow(t, rows, depth + 1);
    if (children.empty() || mass > fallback_mass) {
      fallback = child;
      fallback_mass = mass;
    }
    values.push_back(value);
    children.push_back(child);
  }
  nodes_[id].values = std::move(values);
  nodes_[id].children = std::move(children);
  nodes_[id].fallback = fallback;
  return id;
}

int DecisionTree::predict(const double* num, const int* cat) const {
  if (nodes_.empty()) throw ConfigError("decision tree is not trained");
  std::size_t at = 0;
  for (;;) {
    const auto& node = nodes_[at];
    switch (node.kind) {
      case TreeNode::Kind::Leaf: return node.majority;
      case TreeNode::Kind::Threshold: at = node.children[num[node.feature] <= node.threshold ? 0 : 1]; break;
      case TreeNode::Kind::Multiway: {
        const int value = cat[node.feature];
        auto it = std::lower_bound(node.values.begin(), node.values.end(), value);
        if (it != node.values.end() && *it == value) {
          at = node.children[static_cast<std::size_t>(it - node.values.begin())];
        } else {
          at = node.fallback;
        }
        break;
      }
    }
  }
}

std::vector<int> DecisionTree::predict_all(const TreeTable& table) const {
  std::vector<int> out(table.rows);
  for (std::size_t i = 0; i < table.rows; ++i) out[i] = predict(table.num(i), table.cat(i));
  return out;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::size_t DecisionTree::leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.kind == TreeNode::Kind::Leaf; }));
}

namespace {

void require_mixed(const Dataset& d) {
  if (d.n() == 0) throw NoNumericFeatures("stacked model needs at least one numeric feature");
  if (d.r() == 0) throw NoCategoricalFeatures("stacked model needs at least one categorical feature");
}

// Level-2 table: column 0 holds the GFMM label, column 1 the tree label.
TreeTable level2_table(const GfmmModel& gfmm, const DecisionTree& tree, const Dataset& rows) {
  const auto numeric = IntervalData::from_numeric(rows);
  const auto cats = TreeTable::from_categorical(rows);
  const auto g = gfmm.predict_all(numeric);
  const auto c = tree.predict_all(cats);
  TreeTable t;
  t.rows = rows.size();
  t.categorical = 2;
  for (std::size_t i = 0; i < t.rows; ++i) {
    t.c.push_back(g[i].label);
    t.c.push_back(c[i]);
  }
  t.labels = cats.labels;
  return t;
}

StackedModel fit_stack(const Dataset& level1, const Dataset& level2, const NumericLearnerConfig& cfg,
                       std::size_t max_depth, StackingScheme scheme) {
  StackedModel m;
  m.scheme = scheme;
  m.gfmm = train_numeric(IntervalData::from_numeric(level1), cfg);
  m.level1_tree = DecisionTree::train(TreeTable::from_categorical(level1), level1.class_count(), max_depth);
  m.level2_tree = DecisionTree::train(level2_table(m.gfmm, m.level1_tree, level2), level2.class_count(), max_depth);
  return m;
}

}  // namespace

int StackedModel::predict(const MixedSample& x) const {
  const int g = gfmm.predict(x.lower.data(), x.upper.data()).label;
  const int c = level1_tree.predict(nullptr, x.categorical.data());
  const int pair[2] = {g, c};
  return level2_tree.predict(nullptr, pair);
}

std::vector<int> StackedModel::predict_all(const Dataset& data) const {
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(predict(s));
  return out;
}

StackedModel train_stacked_a(const Dataset& train, const NumericLearnerConfig& cfg, std::size_t max_depth) {
  require_mixed(train);
  return fit_stack(train, train, cfg, max_depth, StackingScheme::TrainOnly);
}

StackedModel train_stacked_b(const Dataset& train, const NumericLearnerConfig& cfg, std::uint64_t seed,
                             std::size_t max_depth) {
  require_mixed(train);
  auto [first, second] = stratified_halves(train.labels(), seed);
  if (first.empty() || second.empty()) throw TooFewSamples("scheme B needs at least two training rows");
  return fit_stack(train.subset(first), train.subset(second), cfg, max_depth, StackingScheme::TrainValid);
}

}  // namespace gfmm
