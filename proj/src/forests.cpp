#include "bakeoff/forests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace bakeoff {

void RandomForestParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("random forest needs at least one tree");
  if (rule == FeatureCountRule::explicit_count && explicit_features < 1) {
    throw std::invalid_argument("explicit feature count must be at least 1");
  }
}

std::size_t resolve_feature_count(const RandomForestParams& p, std::size_t m) {
  std::size_t k = 1;
  switch (p.rule) {
    case FeatureCountRule::sqrt:
      k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m))));
      break;
    case FeatureCountRule::log2plus1:
      k = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(m) + 1.0)));
      break;
    case FeatureCountRule::explicit_count:
      k = p.explicit_features;
      if (k > m) throw std::invalid_argument("explicit feature count exceeds the number of features");
      break;
  }
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(m, 1));
}

namespace {

void check_arity(std::span<const double> x, std::size_t m) {
  if (x.size() != m) throw std::invalid_argument("instance arity does not match the model");
}

void print_doubles(std::ostream& out, std::span<const double> v) {
  char buf[32];
  for (double d : v) {
    std::snprintf(buf, sizeof buf, " %.17g", d);
    out << buf;
  }
}

double matrix_trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Matrix gather(const Matrix& x, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = x(rows[r], cols[c]);
  }
  return out;
}

// PCA on the given rows, or nothing when the sample is too small or has no variance.
std::optional<PcaModel> try_pca(const Matrix& x, std::span<const std::size_t> rows,
                                std::span<const std::size_t> cols) {
  if (rows.size() < 2) return std::nullopt;
  const Matrix sub = gather(x, rows, cols);
  if (!(matrix_trace(covariance(sub)) > 0.0)) return std::nullopt;
  return pca_fit(sub);
}

}  // namespace

RandomForestModel::RandomForestModel(std::vector<DecisionTree> trees, std::size_t num_features,
                                     std::size_t num_classes)
    : trees_(std::move(trees)), num_features_(num_features), num_classes_(num_classes) {
  if (trees_.empty()) throw std::invalid_argument("forest has no trees");
}

std::vector<double> RandomForestModel::distribution(std::span<const double> x) const {
  return distribution_prefix(x, trees_.size());
}

std::vector<double> RandomForestModel::distribution_prefix(std::span<const double> x, std::size_t n_trees) const {
  check_arity(x, num_features_);
  n_trees = std::clamp<std::size_t>(n_trees, 1, trees_.size());
  std::vector<double> acc(num_classes_, 0.0);
  for (std::size_t t = 0; t < n_trees; ++t) {
    const auto d = trees_[t].distribution(x);
    for (std::size_t c = 0; c < num_classes_; ++c) acc[c] += d[c];
  }
  for (double& v : acc) v /= static_cast<double>(n_trees);
  return acc;
}

RandomForestModel rf_train(const Dataset& d, const RandomForestParams& p, std::uint64_t seed) {
  p.validate();
  const Matrix x = feature_matrix(d);
  const std::size_t n = d.num_rows();
  const std::size_t m = x.cols();
  TreeOptions options;
  options.c45.min_leaf = 1;
  options.c45.use_pruning = false;
  options.features_per_node = resolve_feature_count(p, m);
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_trees));
  std::vector<std::size_t> rows(n);
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng(combine_seed(seed, static_cast<std::uint64_t>(t)));
    if (p.bootstrap) {
      for (auto& r : rows) r = rng.uniform_index(n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees.push_back(grow_tree(x, d.labels(), d.schema().num_classes(), rows, options, &rng));
  }
  return RandomForestModel(std::move(trees), m, d.schema().num_classes());
}

void RotationForestParams::validate(std::size_t num_features) const {
  if (n_trees < 1) throw std::invalid_argument("rotation forest needs at least one tree");
  if (group_size < 1 || group_size > num_features) {
    throw std::invalid_argument("feature partition size must lie in [1, number of features]");
  }
  if (!(sample_proportion > 0.0 && sample_proportion <= 1.0)) {
    throw std::invalid_argument("sample proportion must lie in (0, 1]");
  }
}

void RotationTree::rotate(std::span<const double> x, std::span<double> out) const {
  std::vector<double> in;
  std::vector<double> res;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const auto& s = partition[j];
    in.resize(s.size());
    res.resize(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) in[c] = x[s[c]];
    rotations[j].transform_into(in, res);
    for (std::size_t c = 0; c < s.size(); ++c) out[s[c]] = res[c];
  }
}

void RotationTree::dump(std::ostream& out) const {
  for (std::size_t j = 0; j < partition.size(); ++j) {
    out << "subset " << j;
    for (std::size_t f : partition[j]) out << ' ' << f;
    out << "\nmeans";
    print_doubles(out, rotations[j].means);
    out << "\ncomponents";
    print_doubles(out, rotations[j].components.data());
    out << '\n';
  }
  tree.dump(out);
}

RotationForestModel::RotationForestModel(std::vector<RotationTree> trees, std::size_t num_features,
                                         std::size_t num_classes)
    : trees_(std::move(trees)), num_features_(num_features), num_classes_(num_classes) {
  if (trees_.empty()) throw std::invalid_argument("forest has no trees");
}

std::vector<double> RotationForestModel::distribution(std::span<const double> x) const {
  return distribution_prefix(x, trees_.size());
}

std::vector<double> RotationForestModel::distribution_prefix(std::span<const double> x,
                                                             std::size_t n_trees) const {
  check_arity(x, num_features_);
  n_trees = std::clamp<std::size_t>(n_trees, 1, trees_.size());
  std::vector<double> rotated(num_features_);
  std::vector<double> acc(num_classes_, 0.0);
  for (std::size_t t = 0; t < n_trees; ++t) {
    trees_[t].rotate(x, rotated);
    const auto d = trees_[t].tree.distribution(rotated);
    for (std::size_t c = 0; c < num_classes_; ++c) acc[c] += d[c];
  }
  for (double& v : acc) v /= static_cast<double>(n_trees);
  return acc;
}

void RotationForestModel::dump(std::ostream& out) const {
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    out << "tree " << t << '\n';
    trees_[t].dump(out);
  }
}

std::vector<std::vector<std::size_t>> partition_features(std::size_t m, std::size_t f, Rng& rng) {
  if (f < 1) throw std::invalid_argument("partition size must be at least 1");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> parts;
  for (std::size_t begin = 0; begin < m; begin += f) {
    const std::size_t end = std::min(m, begin + f);
    parts.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                       order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return parts;
}

RotationForestModel rot_train(const Dataset& d, const RotationForestParams& p, const C45Params& c45,
                              std::uint64_t seed) {
  const Matrix x = feature_matrix(d);
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  const std::size_t k = d.schema().num_classes();
  p.validate(m);
  c45.validate();
  if (n < 2) throw std::invalid_argument("rotation forest needs at least two rows");

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::vector<std::vector<std::size_t>> rows_by_class(k);
  for (std::size_t r = 0; r < n; ++r) rows_by_class[static_cast<std::size_t>(d.label(r))].push_back(r);

  TreeOptions options;
  options.c45 = c45;

  std::vector<RotationTree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_trees));
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng(combine_seed(seed, static_cast<std::uint64_t>(t)));
    RotationTree member;
    member.partition = partition_features(m, p.group_size, rng);
    Matrix rotated(n, m);
    std::vector<double> in;
    std::vector<double> out;
    for (const auto& subset : member.partition) {
      std::vector<bool> include(k, true);
      if (!p.force_all_classes) {
        bool any = false;
        while (!any) {
          for (std::size_t c = 0; c < k; ++c) {
            include[c] = rng.bernoulli(0.5);
            any = any || include[c];
          }
        }
      }
      std::vector<std::size_t> pool;
      for (std::size_t c = 0; c < k; ++c) {
        if (include[c]) pool.insert(pool.end(), rows_by_class[c].begin(), rows_by_class[c].end());
      }
      std::sort(pool.begin(), pool.end());
      std::size_t want = static_cast<std::size_t>(std::ceil(p.sample_proportion * static_cast<double>(pool.size())));
      want = std::min(std::max<std::size_t>(want, 2), pool.size());
      rng.shuffle(std::span<std::size_t>(pool));
      pool.resize(want);
      std::sort(pool.begin(), pool.end());

      auto pca = try_pca(x, pool, subset);
      if (!pca) {
        ++member.pca_fallbacks;
        pca = try_pca(x, all_rows, subset);
        if (!pca) pca = PcaModel::identity(subset.size());
      }
      in.resize(subset.size());
      out.resize(subset.size());
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < subset.size(); ++c) in[c] = x(r, subset[c]);
        pca->transform_into(in, out);
        for (std::size_t c = 0; c < subset.size(); ++c) rotated(r, subset[c]) = out[c];
      }
      member.rotations.push_back(std::move(*pca));
    }
    member.tree = grow_tree(rotated, d.labels(), k, all_rows, options, nullptr);
    trees.push_back(std::move(member));
  }
  return RotationForestModel(std::move(trees), m, k);
}

}  // namespace bakeoff
