#include "scobot/tree.hpp"

#include <cmath>

#include "scobot/common.hpp"

namespace scobot {

int DecisionTree::leaf_of(std::span<const double> x) const {
  int n = 0;
  while (!nodes[static_cast<std::size_t>(n)].leaf()) {
    const TreeNode& t = nodes[static_cast<std::size_t>(n)];
    n = x[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
  }
  return n;
}

std::vector<TreePath> DecisionTree::paths() const {
  std::vector<TreePath> out;
  std::vector<kernels::PremiseTerm> prefix;
  auto walk = [&](auto&& self, int n) -> void {
    const TreeNode& t = nodes[static_cast<std::size_t>(n)];
    if (t.leaf()) {
      out.push_back({prefix, t.label, n});
      return;
    }
    prefix.push_back({t.feature, false, t.threshold});
    self(self, t.left);
    prefix.back().greater = true;
    self(self, t.right);
    prefix.pop_back();
  };
  if (!nodes.empty()) walk(walk, 0);
  return out;
}

namespace {

// A short decimal strictly between the two sides when one exists, so that
// printed rules stay readable; otherwise the midpoint.
double pick_threshold(double lower, double upper) {
  double mid = lower + 0.5 * (upper - lower);
  if (!(mid < upper)) mid = lower;
  for (double scale : {1e2, 1e3, 1e4}) {
    const double t = std::round(mid * scale) / scale;
    if (lower < t && t < upper) return t;
  }
  return mid;
}

struct Builder {
  std::span<const double> x;
  int dim;
  std::span<const int> y;
  int classes;
  int mu;
  DecisionTree tree;

  int build(std::vector<int> rows) {
    TreeNode node;
    node.counts.assign(static_cast<std::size_t>(classes), 0);
    for (int r : rows) ++node.counts[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])];
    for (int c = 1; c < classes; ++c)
      if (node.counts[static_cast<std::size_t>(c)] > node.counts[static_cast<std::size_t>(node.label)]) node.label = c;
    const bool pure = node.counts[static_cast<std::size_t>(node.label)] == static_cast<long>(rows.size());

    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    if (pure || static_cast<int>(rows.size()) < mu) return id;

    const auto splits = kernels::best_splits(x, dim, y, classes, rows);
    double gain_sum = 0.0;
    int positive = 0;
    for (const auto& s : splits)
      if (s.gain > 1e-12) {
        gain_sum += s.gain;
        ++positive;
      }
    if (positive == 0) return id;
    const double avg = gain_sum / positive;
    const kernels::FeatureSplit* best = nullptr;
    for (const auto& s : splits) {
      if (s.gain <= 1e-12 || s.gain < avg - 1e-12) continue;
      if (!best || s.gain_ratio > best->gain_ratio + 1e-12) best = &s;
    }

    const int feature = best->feature;
    const double threshold = pick_threshold(best->lower, best->upper);
    std::vector<int> left, right;
    for (int r : rows)
      (x[static_cast<std::size_t>(r) * dim + feature] <= threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = build(std::move(left));
    const int r = build(std::move(right));
    TreeNode& t = tree.nodes[static_cast<std::size_t>(id)];
    t.feature = feature;
    t.threshold = threshold;
    t.left = l;
    t.right = r;
    return id;
  }
};

}  // namespace

DecisionTree induce_tree(std::span<const double> features, int dim, std::span<const int> labels,
                         int classes, int mu) {
  if (labels.empty()) throw ContractError("induce_tree: empty data");
  if (dim < 1 || features.size() != labels.size() * static_cast<std::size_t>(dim))
    throw ContractError("induce_tree: feature matrix does not match labels");
  if (mu < 2) throw ContractError("induce_tree: mu must be at least 2");
  for (int l : labels)
    if (l < 0 || l >= classes) throw ContractError("induce_tree: label out of range");
  Builder b{features, dim, labels, classes, mu, {}};
  b.tree.dim = dim;
  b.tree.classes = classes;
  std::vector<int> rows(labels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  b.build(std::move(rows));
  return std::move(b.tree);
}

}  // namespace scobot
