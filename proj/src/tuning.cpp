#include "bakeoff/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bakeoff/random.hpp"

namespace bakeoff {

void ParamGrid::validate() const {
  if (points.empty()) throw std::invalid_argument("parameter grid is empty");
  std::set<ParamMap> seen;
  for (const auto& p : points) {
    if (!seen.insert(p).second) throw std::invalid_argument("parameter grid repeats " + format_params(p));
  }
}

std::vector<std::string> powers_of_two(int lo, int hi, int step) {
  if (step < 1) throw std::invalid_argument("step must be positive");
  std::vector<std::string> out;
  for (int e = lo; e <= hi; e += step) out.push_back(format_double(std::ldexp(1.0, e)));
  return out;
}

ParamGrid grid_from_values(Family family, const ParamMap& base,
                           const std::map<std::string, std::vector<std::string>>& values) {
  ParamGrid g{family, {base}};
  for (const auto& [key, list] : values) {
    if (list.empty()) throw std::invalid_argument("no values given for " + key);
    std::vector<ParamMap> next;
    for (const auto& p : g.points) {
      for (const auto& v : list) {
        ParamMap q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    g.points = std::move(next);
  }
  g.validate();
  return g;
}

const std::vector<int>& forest_tree_counts() {
  static const std::vector<int> counts{10, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000,
                                       1250, 1500, 1750, 2000};
  return counts;
}

ParamGrid default_grid(const ClassifierSpec& base) {
  const ParamMap p = base.resolved();
  std::vector<std::string> trees;
  for (int t : forest_tree_counts()) trees.push_back(std::to_string(t));
  switch (base.family) {
    case Family::svm: {
      const auto c = powers_of_two(-16, 8);
      if (p.at("kernel") == "rbf") return grid_from_values(base.family, p, {{"C", c}, {"gamma", c}});
      return grid_from_values(base.family, p, {{"C", c}});
    }
    case Family::random_forest:
      return grid_from_values(base.family, p, {{"n_trees", trees}, {"n_features", {"sqrt"}}});
    case Family::rotation_forest:
      return grid_from_values(base.family, p, {{"n_trees", trees}, {"f", {"3"}}, {"p", {"0.5"}}});
    case Family::logistic:
    case Family::nn1:
      return ParamGrid{base.family, {p}};
  }
  throw UnknownFamilyError("unknown classifier family");
}

std::vector<Fold> tuning_folds(const Dataset& d, int k, std::uint64_t seed) {
  return kfold_partition(d, k, combine_seed(seed, "folds"));
}

namespace {

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  return combine_seed(combine_seed(seed, "fold-model"), static_cast<std::uint64_t>(fold));
}

std::pair<Dataset, Dataset> fold_data(const Dataset& d, const Fold& f) {
  auto n = normalize_fit_apply(d.subset(f.train_rows), d.subset(f.validation_rows));
  return {std::move(n.train), std::move(n.test)};
}

bool is_forest(Family f) { return f == Family::random_forest || f == Family::rotation_forest; }

// True when every point agrees on all keys except n_trees.
bool varies_only_in_trees(const std::vector<ParamMap>& points) {
  auto strip = [](ParamMap p) {
    p.erase("n_trees");
    return p;
  };
  const ParamMap first = strip(points.front());
  return std::all_of(points.begin(), points.end(), [&](const ParamMap& p) { return strip(p) == first; });
}

}  // namespace

double cross_val_accuracy(const ClassifierSpec& spec, const Dataset& d, const std::vector<Fold>& folds,
                          std::uint64_t seed) {
  if (folds.empty()) throw std::invalid_argument("no folds");
  double sum = 0.0;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    auto [tr, va] = fold_data(d, folds[i]);
    sum += accuracy(*train(spec, tr, fold_seed(seed, i)), va);
  }
  return sum / static_cast<double>(folds.size());
}

double cross_val_accuracy(const ClassifierSpec& spec, const Dataset& d, int k, std::uint64_t seed) {
  return cross_val_accuracy(spec, d, tuning_folds(d, k, seed), seed);
}

TuningResult grid_search(const ClassifierSpec& base, const ParamGrid& grid, const Dataset& d, int k,
                         std::uint64_t seed) {
  grid.validate();
  const auto folds = tuning_folds(d, k, seed);
  std::vector<ClassifierSpec> specs;
  for (const auto& p : grid.points) {
    ClassifierSpec s{grid.family, base.family == grid.family ? base.params : ParamMap{}};
    for (const auto& [key, v] : p) s.params[key] = v;
    s.validate();
    specs.push_back(std::move(s));
  }

  TuningResult res;
  res.per_point_cv_accuracy.assign(specs.size(), 0.0);
  std::vector<ParamMap> resolved;
  for (const auto& s : specs) resolved.push_back(s.resolved());

  if (is_forest(grid.family) && specs.size() > 1 && varies_only_in_trees(resolved)) {
    std::vector<std::size_t> trees;
    for (const auto& p : resolved) trees.push_back(static_cast<std::size_t>(std::stoul(p.at("n_trees"))));
    const std::size_t max_trees = *std::max_element(trees.begin(), trees.end());
    ClassifierSpec big{grid.family, resolved.front()};
    big.params["n_trees"] = std::to_string(max_trees);
    for (std::size_t i = 0; i < folds.size(); ++i) {
      auto [tr, va] = fold_data(d, folds[i]);
      const auto model = train(big, tr, fold_seed(seed, i));
      for (std::size_t j = 0; j < specs.size(); ++j) {
        res.per_point_cv_accuracy[j] += accuracy_prefix(*model, va, trees[j]);
      }
    }
    for (double& a : res.per_point_cv_accuracy) a /= static_cast<double>(folds.size());
  } else {
    for (std::size_t j = 0; j < specs.size(); ++j) {
      res.per_point_cv_accuracy[j] = cross_val_accuracy(specs[j], d, folds, seed);
    }
  }

  res.best_cv_accuracy = *std::max_element(res.per_point_cv_accuracy.begin(), res.per_point_cv_accuracy.end());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (res.per_point_cv_accuracy[j] == res.best_cv_accuracy) res.tie_set.push_back(specs[j].params);
  }
  std::sort(res.tie_set.begin(), res.tie_set.end(),
            [](const ParamMap& a, const ParamMap& b) { return format_params(a) < format_params(b); });
  res.tie_break_seed = combine_seed(seed, "tie-break");
  Rng rng(res.tie_break_seed);
  res.best_params = res.tie_set[rng.uniform_index(res.tie_set.size())];
  return res;
}

}  // namespace bakeoff
