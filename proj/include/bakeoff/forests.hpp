#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "bakeoff/dataset.hpp"
#include "bakeoff/linalg.hpp"
#include "bakeoff/tree.hpp"

namespace bakeoff {

enum class FeatureCountRule { sqrt, log2plus1, explicit_count };

struct RandomForestParams {
  int n_trees = 10;
  FeatureCountRule rule = FeatureCountRule::log2plus1;
  std::size_t explicit_features = 0;  // used with FeatureCountRule::explicit_count
  bool bootstrap = true;              // test hook: false trains every tree on all rows

  void validate() const;
};

/// sqrt: floor(sqrt(m)); log2plus1: floor(log2(m + 1)); both at least 1.
std::size_t resolve_feature_count(const RandomForestParams& p, std::size_t m);

class RandomForestModel {
 public:
  RandomForestModel(std::vector<DecisionTree> trees, std::size_t num_features, std::size_t num_classes);

  /// Mean of the leaf distributions of the first `n_trees` trees (all by default).
  std::vector<double> distribution(std::span<const double> x) const;
  std::vector<double> distribution_prefix(std::span<const double> x, std::size_t n_trees) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t num_features_;
  std::size_t num_classes_;
};

/// Unpruned trees (min_leaf 1) on bootstrap samples with per-node random
/// feature subsets. Tree i draws from its own substream of `seed`.
RandomForestModel rf_train(const Dataset& d, const RandomForestParams& p, std::uint64_t seed);

struct RotationForestParams {
  int n_trees = 10;
  std::size_t group_size = 3;     // features per PCA subset
  double sample_proportion = 0.5;
  bool force_all_classes = false;  // test hook: include every class in each subset PCA

  void validate(std::size_t num_features) const;
};

/// One rotation-forest member: disjoint feature subsets, their PCA
/// rotations, and the tree trained on the rotated data.
struct RotationTree {
  std::vector<std::vector<std::size_t>> partition;
  std::vector<PcaModel> rotations;
  DecisionTree tree;
  std::size_t pca_fallbacks = 0;  // subsets that refitted on all rows or used the identity

  /// Component c of subset j lands in column partition[j][c].
  void rotate(std::span<const double> x, std::span<double> out) const;
  void dump(std::ostream& out) const;
};

class RotationForestModel {
 public:
  RotationForestModel(std::vector<RotationTree> trees, std::size_t num_features, std::size_t num_classes);

  std::vector<double> distribution(std::span<const double> x) const;
  std::vector<double> distribution_prefix(std::span<const double> x, std::size_t n_trees) const;

  const std::vector<RotationTree>& trees() const { return trees_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }
  void dump(std::ostream& out) const;

 private:
  std::vector<RotationTree> trees_;
  std::size_t num_features_;
  std::size_t num_classes_;
};

/// Shuffled feature indices cut into ceil(m / f) subsets; the last may be smaller.
std::vector<std::vector<std::size_t>> partition_features(std::size_t m, std::size_t f, Rng& rng);

RotationForestModel rot_train(const Dataset& d, const RotationForestParams& p, const C45Params& c45,
                              std::uint64_t seed);

}  // namespace bakeoff
