#pragma once

#include <span>
#include <vector>

#include "scobot/kernels.hpp"

namespace scobot {

inline constexpr int kDefaultMu = 16;

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1, right = -1;
  int label = 0;  // majority class of the node
  std::vector<long> counts;

  bool leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Root-to-leaf path as a conjunction of threshold tests.
struct TreePath {
  std::vector<kernels::PremiseTerm> premise;
  int label = 0;
  int leaf = 0;  // node index
};

/// Binary threshold tree; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  int dim = 0;
  int classes = 0;

  int leaf_of(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return nodes[static_cast<std::size_t>(leaf_of(x))].label; }
  std::vector<TreePath> paths() const;

  bool operator==(const DecisionTree&) const = default;
};

/// Top-down induction with binary splits scored by gain ratio (among splits
/// with at least average gain). A node with fewer than `mu` samples, a pure
/// node, or one without a positive-gain split becomes a leaf labeled with its
/// majority class (ties: lowest class id).
DecisionTree induce_tree(std::span<const double> features, int dim, std::span<const int> labels,
                         int classes, int mu = kDefaultMu);

}  // namespace scobot
