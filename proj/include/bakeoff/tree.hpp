#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "bakeoff/dataset.hpp"
#include "bakeoff/linalg.hpp"
#include "bakeoff/random.hpp"

namespace bakeoff {

struct C45Params {
  int min_leaf = 2;
  bool use_pruning = true;
  double pruning_confidence = 0.25;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::vector<double> counts;        // training class counts
  std::vector<double> distribution;  // Laplace-smoothed counts

  bool is_leaf() const { return feature < 0; }
};

/// Binary decision tree over numeric features.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t num_features, std::size_t num_classes);

  std::span<const double> distribution(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_leaves() const;
  std::size_t depth() const;

  /// One line per node, preorder: "node <id> split <f> <t> <l> <r>" or
  /// "node <id> leaf <p0> <p1> ...", doubles at full precision.
  void dump(std::ostream& out) const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t num_features_ = 0;
  std::size_t num_classes_ = 0;
};

struct TreeOptions {
  C45Params c45;
  std::vector<std::size_t> feature_mask;  // empty: every feature is allowed
  std::size_t features_per_node = 0;      // 0: every allowed feature; else a random subset per node
};

/// Top-down induction on the rows listed in `rows` (duplicates allowed).
/// Splits maximise gain ratio among features whose information gain is at
/// least the average; numeric thresholds sit at midpoints between
/// consecutive distinct values. Per-node feature sampling draws from `rng`.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                       std::span<const std::size_t> rows, const TreeOptions& options, Rng* rng);

/// C4.5 on every row of a numeric dataset.
DecisionTree c45_train(const Dataset& d, const C45Params& p = {},
                       std::span<const std::size_t> feature_mask = {}, Rng* rng = nullptr);

/// Pessimistic extra errors for e errors in n cases at confidence cf.
double pessimistic_extra_errors(double n, double e, double cf);

/// Dataset rows as a dense matrix.
Matrix feature_matrix(const Dataset& d);

}  // namespace bakeoff
