#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bakeoff/classifier.hpp"
#include "bakeoff/dataset.hpp"

namespace bakeoff {

struct ParamGrid {
  Family family = Family::svm;
  std::vector<ParamMap> points;

  /// Throws std::invalid_argument for an empty grid or repeated points.
  void validate() const;
  std::size_t size() const { return points.size(); }
};

/// {2^lo, 2^(lo+step), ..., 2^hi} as parameter strings.
std::vector<std::string> powers_of_two(int lo, int hi, int step = 1);

/// Cartesian product of explicit value lists, each point merged over `base`.
ParamGrid grid_from_values(Family family, const ParamMap& base,
                           const std::map<std::string, std::vector<std::string>>& values);

/// Standard tuning grids:
///   svm rbf:        C, gamma in 2^-16 .. 2^8          (625 points)
///   svm linear:     C in 2^-16 .. 2^8                 (25 points)
///   svm polynomial: C in 2^-16 .. 2^8, degree fixed   (25 points)
///   random forest:  n_trees in {10, 50, 100, 200, 300, ..., 1000, 1250, 1500, 1750, 2000}, n_features sqrt
///   rotation forest: same n_trees, f = 3, p = 0.5
///   logistic, nn1:  the single default point
ParamGrid default_grid(const ClassifierSpec& base);

const std::vector<int>& forest_tree_counts();

/// Mean validation accuracy over the folds. Each fold is min-max rescaled on
/// its own training part; the model for fold i is seeded from (seed, i).
double cross_val_accuracy(const ClassifierSpec& spec, const Dataset& d, int k, std::uint64_t seed);
double cross_val_accuracy(const ClassifierSpec& spec, const Dataset& d, const std::vector<Fold>& folds,
                          std::uint64_t seed);

/// The fold partition shared by every point of one tuning run.
std::vector<Fold> tuning_folds(const Dataset& d, int k, std::uint64_t seed);

struct TuningResult {
  ParamMap best_params;
  double best_cv_accuracy = 0.0;
  std::vector<double> per_point_cv_accuracy;  // grid order
  std::vector<ParamMap> tie_set;              // sorted by formatted params
  std::uint64_t tie_break_seed = 0;
};

/// Evaluates every grid point on one fold partition. Ties at the maximum
/// are broken uniformly at random with a stream derived from `seed`.
/// Forest grids that differ only in n_trees train the largest forest once
/// per fold and score its prefixes, which gives the same numbers.
TuningResult grid_search(const ClassifierSpec& base, const ParamGrid& grid, const Dataset& d, int k,
                         std::uint64_t seed);

}  // namespace bakeoff
