#include "bakeoff/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace bakeoff {

namespace {

constexpr double kMinGain = 1e-12;

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// n * entropy for the given counts.
double weighted_entropy(std::span<const double> counts, double n) {
  double s = xlogx(n);
  for (double c : counts) s -= xlogx(c);
  return s;
}

std::vector<double> laplace(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> d(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    d[c] = (counts[c] + 1.0) / (total + static_cast<double>(counts.size()));
  }
  return d;
}

double training_errors(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  return total - *std::max_element(counts.begin(), counts.end());
}

struct SplitCandidate {
  std::size_t slot = 0;  // index into allowed features
  double gain = 0.0;
  double ratio = 0.0;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t k,
              std::span<const std::size_t> rows, const TreeOptions& options, Rng* rng)
      : k_(k), options_(options), rng_(rng), n_(rows.size()) {
    if (options.feature_mask.empty()) {
      allowed_.resize(x.cols());
      std::iota(allowed_.begin(), allowed_.end(), 0);
    } else {
      allowed_ = options.feature_mask;
      std::sort(allowed_.begin(), allowed_.end());
      allowed_.erase(std::unique(allowed_.begin(), allowed_.end()), allowed_.end());
      for (std::size_t f : allowed_) {
        if (f >= x.cols()) throw std::invalid_argument("feature mask index out of range");
      }
    }
    if (options.features_per_node > 0 && options.features_per_node < allowed_.size() && rng == nullptr) {
      throw std::invalid_argument("per-node feature sampling needs a random stream");
    }
    labels_.resize(n_);
    for (std::size_t s = 0; s < n_; ++s) labels_[s] = y[rows[s]];
    values_.assign(allowed_.size(), std::vector<double>(n_));
    order_.assign(allowed_.size(), std::vector<std::uint32_t>(n_));
    for (std::size_t a = 0; a < allowed_.size(); ++a) {
      auto& col = values_[a];
      for (std::size_t s = 0; s < n_; ++s) col[s] = x(rows[s], allowed_[a]);
      auto& ord = order_[a];
      std::iota(ord.begin(), ord.end(), 0U);
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t p, std::uint32_t q) { return col[p] < col[q]; });
    }
    goes_left_.resize(n_);
    scratch_.resize(n_);
    xlogx_.resize(n_ + 1);
    for (std::size_t v = 0; v <= n_; ++v) xlogx_[v] = xlogx(static_cast<double>(v));
  }

  std::vector<TreeNode> build() {
    if (n_ == 0) throw std::invalid_argument("cannot grow a tree on zero rows");
    grow(0, n_);
    return std::move(nodes_);
  }

 private:
  int grow(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<double> counts(k_, 0.0);
    const auto& ord0 = order_[0];
    for (std::size_t i = begin; i < end; ++i) counts[static_cast<std::size_t>(labels_[ord0[i]])] += 1.0;
    nodes_[id].distribution = laplace(counts);
    nodes_[id].counts = counts;

    const std::size_t n = end - begin;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, options_.c45.min_leaf));
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || n < 2 * min_leaf) return id;

    auto best = choose_split(begin, end, counts, min_leaf);
    if (!best) return id;

    const auto& col = values_[best->slot];
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t s = order_[best->slot][i];
      goes_left_[s] = col[s] <= best->threshold ? 1 : 0;
    }
    std::size_t mid = begin;
    for (auto& ord : order_) {
      std::size_t l = begin;
      std::size_t r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t s = ord[i];
        if (goes_left_[s]) {
          ord[l++] = s;
        } else {
          scratch_[r++] = s;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), ord.begin() + static_cast<std::ptrdiff_t>(l));
      mid = l;
    }

    nodes_[id].feature = static_cast<int>(allowed_[best->slot]);
    nodes_[id].threshold = best->threshold;
    const int left = grow(begin, mid);
    const int right = grow(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  std::optional<SplitCandidate> evaluate(std::size_t slot, std::size_t begin, std::size_t end,
                                         std::span<const double> counts, std::size_t min_leaf) {
    const auto& ord = order_[slot];
    const auto& col = values_[slot];
    const double n = static_cast<double>(end - begin);
    const double parent = weighted_entropy(counts, n);
    std::vector<std::size_t> left(k_, 0);
    std::vector<std::size_t> right(k_);
    for (std::size_t c = 0; c < k_; ++c) right[c] = static_cast<std::size_t>(counts[c]);
    // Same terms and order as weighted_entropy, with x log x looked up.
    auto table_entropy = [&](const std::vector<std::size_t>& part, std::size_t total) {
      double e = xlogx_[total];
      for (std::size_t v : part) e -= xlogx_[v];
      return e;
    };
    std::optional<SplitCandidate> best;
    for (std::size_t i = begin; i + 1 < end; ++i) {
      const auto c = static_cast<std::size_t>(labels_[ord[i]]);
      ++left[c];
      --right[c];
      const double lo = col[ord[i]];
      const double hi = col[ord[i + 1]];
      if (!(lo < hi)) continue;
      const std::size_t nl = i + 1 - begin;
      const std::size_t nr = end - begin - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double gain = (parent - table_entropy(left, nl) - table_entropy(right, nr)) / n;
      if (!best || gain > best->gain) {
        double threshold = 0.5 * (lo + hi);
        if (!(threshold < hi)) threshold = lo;
        const double pl = static_cast<double>(nl) / n;
        const double pr = static_cast<double>(nr) / n;
        const double split_info = -(pl * std::log(pl) + pr * std::log(pr));
        best = SplitCandidate{slot, gain, split_info > 0 ? gain / split_info : 0.0, threshold};
      }
    }
    if (best && best->gain <= kMinGain) return std::nullopt;
    return best;
  }

  std::optional<SplitCandidate> choose_split(std::size_t begin, std::size_t end,
                                             std::span<const double> counts, std::size_t min_leaf) {
    std::vector<SplitCandidate> found;
    const std::size_t a = allowed_.size();
    const std::size_t want = options_.features_per_node;
    if (want == 0 || want >= a) {
      for (std::size_t slot = 0; slot < a; ++slot) {
        if (auto c = evaluate(slot, begin, end, counts, min_leaf)) found.push_back(*c);
      }
    } else {
      // Random subset of `want` features; keep drawing past it until some
      // feature yields a positive gain.
      std::vector<std::size_t> perm(a);
      std::iota(perm.begin(), perm.end(), 0);
      rng_->shuffle(std::span<std::size_t>(perm));
      for (std::size_t i = 0; i < a && (i < want || found.empty()); ++i) {
        if (auto c = evaluate(perm[i], begin, end, counts, min_leaf)) found.push_back(*c);
      }
    }
    if (found.empty()) return std::nullopt;
    double avg = 0.0;
    for (const auto& c : found) avg += c.gain;
    avg /= static_cast<double>(found.size());
    const SplitCandidate* best = nullptr;
    for (const auto& c : found) {
      if (c.gain < avg - 1e-12) continue;
      if (!best || c.ratio > best->ratio || (c.ratio == best->ratio && c.slot < best->slot)) best = &c;
    }
    return *best;
  }

  std::size_t k_;
  const TreeOptions& options_;
  Rng* rng_;
  std::size_t n_;
  std::vector<std::size_t> allowed_;
  std::vector<int> labels_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<double> xlogx_;
  std::vector<TreeNode> nodes_;
};

void make_leaf(TreeNode& node) {
  node.feature = -1;
  node.left = -1;
  node.right = -1;
  node.threshold = 0.0;
}

double subtree_training_errors(const std::vector<TreeNode>& nodes, int id) {
  const auto& node = nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) return training_errors(node.counts);
  return subtree_training_errors(nodes, node.left) + subtree_training_errors(nodes, node.right);
}

// Subtree replacement by pessimistic error estimate. Returns the estimated
// errors of the (possibly pruned) subtree.
double prune(std::vector<TreeNode>& nodes, int id, double cf) {
  auto& node = nodes[static_cast<std::size_t>(id)];
  const double n = std::accumulate(node.counts.begin(), node.counts.end(), 0.0);
  const double leaf_errors = training_errors(node.counts);
  const double as_leaf = leaf_errors + pessimistic_extra_errors(n, leaf_errors, cf);
  if (node.is_leaf()) return as_leaf;
  // A subtree that fixes no training errors is collapsed outright.
  if (subtree_training_errors(nodes, id) >= leaf_errors - 1e-3) {
    make_leaf(nodes[static_cast<std::size_t>(id)]);
    return as_leaf;
  }
  const int l = node.left;
  const int r = node.right;
  const double as_tree = prune(nodes, l, cf) + prune(nodes, r, cf);
  if (as_leaf <= as_tree + 0.1) {
    make_leaf(nodes[static_cast<std::size_t>(id)]);
    return as_leaf;
  }
  return as_tree;
}

int compact(const std::vector<TreeNode>& in, int id, std::vector<TreeNode>& out) {
  const int new_id = static_cast<int>(out.size());
  out.push_back(in[static_cast<std::size_t>(id)]);
  if (!out.back().is_leaf()) {
    const int l = compact(in, in[static_cast<std::size_t>(id)].left, out);
    const int r = compact(in, in[static_cast<std::size_t>(id)].right, out);
    out[static_cast<std::size_t>(new_id)].left = l;
    out[static_cast<std::size_t>(new_id)].right = r;
  }
  return new_id;
}

}  // namespace

void C45Params::validate() const {
  if (min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
  if (!(pruning_confidence > 0.0 && pruning_confidence < 1.0)) {
    throw std::invalid_argument("pruning confidence must lie in (0, 1)");
  }
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t num_features, std::size_t num_classes)
    : nodes_(std::move(nodes)), num_features_(num_features), num_classes_(num_classes) {}

std::span<const double> DecisionTree::distribution(std::span<const double> x) const {
  if (x.size() != num_features_) throw std::invalid_argument("tree instance arity mismatch");
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes_[id].distribution;
}

int DecisionTree::predict(std::span<const double> x) const {
  auto d = distribution(x);
  return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t best = 0;
  // Preorder storage: children always follow their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
    }
  }
  return best;
}

void DecisionTree::dump(std::ostream& out) const {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    out << "node " << i;
    if (node.is_leaf()) {
      out << " leaf";
      for (double p : node.distribution) out << ' ' << num(p);
    } else {
      out << " split " << node.feature << ' ' << num(node.threshold) << ' ' << node.left << ' ' << node.right;
    }
    out << '\n';
  }
}

double pessimistic_extra_errors(double n, double e, double cf) {
  if (n <= 0.0) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(cf, 1.0 / n));
    if (e == 0.0) return base;
    return base + e * (pessimistic_extra_errors(n, 1.0, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  static const boost::math::normal standard_normal;
  const double z = boost::math::quantile(standard_normal, 1.0 - cf);
  const double f = (e + 0.5) / n;
  const double r = (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) / (1.0 + z * z / n);
  return r * n - e;
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                       std::span<const std::size_t> rows, const TreeOptions& options, Rng* rng) {
  options.c45.validate();
  TreeBuilder builder(x, y, num_classes, rows, options, rng);
  auto nodes = builder.build();
  if (options.c45.use_pruning) {
    prune(nodes, 0, options.c45.pruning_confidence);
    std::vector<TreeNode> compacted;
    compact(nodes, 0, compacted);
    nodes = std::move(compacted);
  }
  return DecisionTree(std::move(nodes), x.cols(), num_classes);
}

Matrix feature_matrix(const Dataset& d) {
  return Matrix(d.num_rows(), d.num_features(), std::vector<double>(d.values().begin(), d.values().end()));
}

DecisionTree c45_train(const Dataset& d, const C45Params& p, std::span<const std::size_t> feature_mask, Rng* rng) {
  if (d.empty()) throw std::invalid_argument("C4.5 needs at least one row");
  TreeOptions options;
  options.c45 = p;
  options.feature_mask.assign(feature_mask.begin(), feature_mask.end());
  std::vector<std::size_t> rows(d.num_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return grow_tree(feature_matrix(d), d.labels(), d.num_classes(), rows, options, rng);
}

}  // namespace bakeoff
