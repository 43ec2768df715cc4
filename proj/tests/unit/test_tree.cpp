#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "scobot/common.hpp"
#include "scobot/tree.hpp"

using namespace scobot;

namespace {

bool satisfies(const std::vector<kernels::PremiseTerm>& premise, std::span<const double> x) {
  for (const auto& t : premise) {
    const double v = x[static_cast<std::size_t>(t.feature)];
    if (t.greater ? !(v > t.threshold) : !(v <= t.threshold)) return false;
  }
  return true;
}

struct Data {
  std::vector<double> x;
  std::vector<int> y;
  int dim = 0;
};

Data noisy_data(Rng& r, int n, int dim, int classes) {
  Data d;
  d.dim = dim;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < dim; ++j) {
      // Rounded values make repeated feature values common.
      const double v = std::round(r.uniform() * 20) / 20;
      d.x.push_back(v);
      s += (j + 1) * v;
    }
    d.y.push_back(r.bernoulli(0.15) ? r.below(classes) : static_cast<int>(s * 3) % classes);
  }
  return d;
}

}  // namespace

TEST_CASE("pure labels give a single leaf") {
  const std::vector<double> x{0.1, 0.5, 0.9, 0.3};
  const std::vector<int> y{2, 2, 2, 2};
  const DecisionTree t = induce_tree(x, 1, y, 3, 2);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].leaf());
  CHECK(t.nodes[0].label == 2);
}

TEST_CASE("separable one-dimensional data splits once inside the gap") {
  Rng r(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x;
    std::vector<int> y;
    double below = 0.0, above = 1.0;
    for (int i = 0; i < 40; ++i) {
      const double v = r.uniform();
      x.push_back(v);
      y.push_back(v > 0.5 ? 1 : 0);
      if (v <= 0.5) below = std::max(below, v);
      else above = std::min(above, v);
    }
    if (std::count(y.begin(), y.end(), 1) % 40 == 0) continue;
    const DecisionTree t = induce_tree(x, 1, y, 2, 2);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold > below);
    CHECK(t.nodes[0].threshold < above);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(t.predict(std::span(&x[i], 1)) == y[i]);
  }
}

TEST_CASE("training accuracy is at least the majority baseline") {
  Rng r(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int classes = 2 + r.below(4);
    const Data d = noisy_data(r, 50 + r.below(400), 1 + r.below(5), classes);
    const int mu = 2 + r.below(30);
    const DecisionTree t = induce_tree(d.x, d.dim, d.y, classes, mu);
    std::vector<long> counts(static_cast<std::size_t>(classes), 0);
    for (int l : d.y) ++counts[static_cast<std::size_t>(l)];
    long correct = 0;
    for (std::size_t i = 0; i < d.y.size(); ++i)
      correct += t.predict(std::span(&d.x[i * d.dim], static_cast<std::size_t>(d.dim))) == d.y[i];
    CHECK(correct >= *std::max_element(counts.begin(), counts.end()));

    for (const TreeNode& n : t.nodes) {
      long total = 0;
      for (long c : n.counts) total += c;
      if (!n.leaf()) CHECK(total >= mu);
      // Leaf label is the majority, lowest class on ties.
      const auto top = std::max_element(n.counts.begin(), n.counts.end());
      CHECK(n.label == static_cast<int>(top - n.counts.begin()));
    }
  }
}

TEST_CASE("paths reproduce the routing of every training row") {
  Rng r(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = 2 + r.below(3);
    const Data d = noisy_data(r, 300, 3, classes);
    const DecisionTree t = induce_tree(d.x, d.dim, d.y, classes, 8);
    const auto paths = t.paths();
    int leaves = 0;
    for (const TreeNode& n : t.nodes) leaves += n.leaf();
    CHECK(static_cast<int>(paths.size()) == leaves);
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      const std::span<const double> row(&d.x[i * 3], 3);
      int hits = 0;
      for (const TreePath& p : paths)
        if (satisfies(p.premise, row)) {
          ++hits;
          CHECK(p.leaf == t.leaf_of(row));
          CHECK(p.label == t.predict(row));
        }
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("induction is deterministic and validates input") {
  Rng r(4);
  const Data d = noisy_data(r, 200, 4, 3);
  CHECK(induce_tree(d.x, d.dim, d.y, 3) == induce_tree(d.x, d.dim, d.y, 3));
  CHECK_THROWS_AS(induce_tree(std::vector<double>{}, 1, std::vector<int>{}, 2), ContractError);
  CHECK_THROWS_AS(induce_tree(d.x, d.dim, d.y, 3, 1), ContractError);
  CHECK_THROWS_AS(induce_tree(d.x, d.dim, d.y, 2), ContractError);
  CHECK_THROWS_AS(induce_tree(std::vector<double>{0.1, 0.2, 0.3}, 2, std::vector<int>{0, 1}, 2), ContractError);
}

TEST_CASE("small nodes stay leaves") {
  const std::vector<double> x{0.1, 0.2, 0.8, 0.9};
  const std::vector<int> y{0, 0, 1, 1};
  CHECK(induce_tree(x, 1, y, 2, 5).nodes.size() == 1);
  CHECK(induce_tree(x, 1, y, 2, 4).nodes.size() == 3);
  // 2/2 tie at the root leaf goes to the lowest class.
  CHECK(induce_tree(x, 1, y, 2, 5).nodes[0].label == 0);
}
