#include "bakeoff/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <string>

#include "bakeoff/random.hpp"

namespace bakeoff {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Kernel rows on demand with an LRU budget. Holding at least two rows keeps
// the pair of rows used by one SMO step resident together.
class KernelCache {
 public:
  KernelCache(const Matrix& x, const KernelSpec& kernel, std::size_t budget_bytes)
      : x_(x), kernel_(kernel), n_(x.rows()), rows_(n_), where_(n_), diag_(n_) {
    sq_norms_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) sq_norms_[i] = dot(x_.row(i), x_.row(i));
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = eval(i, i);
    capacity_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, n_ * sizeof(double)));
  }

  double diag(std::size_t i) const { return diag_[i]; }

  std::span<const double> row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      rows_[victim].clear();
      rows_[victim].shrink_to_fit();
    }
    auto& r = rows_[i];
    r.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) r[j] = eval(i, j);
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return r;
  }

 private:
  double eval(std::size_t i, std::size_t j) const {
    switch (kernel_.kind) {
      case KernelKind::linear:
        return dot(x_.row(i), x_.row(j));
      case KernelKind::polynomial:
        return int_pow(dot(x_.row(i), x_.row(j)), kernel_.degree);
      case KernelKind::rbf: {
        const double d2 = std::max(0.0, sq_norms_[i] + sq_norms_[j] - 2.0 * dot(x_.row(i), x_.row(j)));
        return std::exp(-kernel_.gamma * d2);
      }
    }
    return 0.0;
  }

  const Matrix& x_;
  KernelSpec kernel_;
  std::size_t n_;
  std::size_t capacity_ = 2;
  std::vector<std::vector<double>> rows_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::list<std::size_t> lru_;
  std::vector<double> sq_norms_;
  std::vector<double> diag_;
};

// Platt's sequential minimal optimization with a full error cache.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const int> y, const KernelSpec& kernel, const SmoParams& p,
            std::uint64_t seed)
      : y_(y), c_(p.c), tol_(p.kkt_tolerance), eps_(p.alpha_epsilon), max_steps_(p.max_pair_steps),
        cache_(x, kernel, p.cache_bytes), rng_(seed), n_(x.rows()),
        alpha_(n_, 0.0), error_(n_) {
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -y_[i];
  }

  void run() {
    for (int round = 0; round < 8; ++round) {
      sweep();
      if (!refit_bias()) break;
    }
  }

  std::vector<double>& alphas() { return alpha_; }
  double bias() const { return bias_; }
  std::size_t steps() const { return steps_; }

 private:
  void sweep() {
    std::size_t changed = 0;
    bool examine_all = true;
    while (changed > 0 || examine_all) {
      changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
      } else {
        for (std::size_t i = 0; i < n_; ++i) {
          if (is_free(i)) changed += examine(i);
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
  }

  // Mean over free vectors, else the middle of the interval the bounded ones allow.
  // Returns true if the new bias exposes violations worth another sweep.
  bool refit_bias() {
    double sum = 0.0;
    std::size_t free = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      const double target = y_[i] - (error_[i] + y_[i] - bias_);
      if (is_free(i)) {
        sum += target;
        ++free;
      } else if ((alpha_[i] == 0.0) == (y_[i] > 0)) {
        lower = std::max(lower, target);
      } else {
        upper = std::min(upper, target);
      }
    }
    double b;
    if (free > 0) {
      b = sum / static_cast<double>(free);
    } else if (std::isfinite(lower) && std::isfinite(upper)) {
      b = 0.5 * (lower + upper);
    } else {
      b = std::isfinite(lower) ? lower : upper;
    }
    const double db = b - bias_;
    if (db == 0.0) return false;
    for (double& e : error_) e += db;
    bias_ = b;
    return current_violation() > tol_;
  }

  bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;

    // Second-choice heuristic: maximise |E1 - E2| over the free set.
    std::size_t free_count = 0;
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!is_free(i)) continue;
      ++free_count;
      const double gap = std::abs(error_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (free_count > 1 && best != n_ && take_step(best, i2)) return 1;

    const std::size_t start_free = rng_.uniform_index(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start_free + k) % n_;
      if (is_free(i1) && take_step(i1, i2)) return 1;
    }
    const std::size_t start_all = rng_.uniform_index(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start_all + k) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (lo >= hi) return false;

    auto row1 = cache_.row(i1);
    const double k11 = cache_.diag(i1);
    const double k22 = cache_.diag(i2);
    const double k12 = row1[i2];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Dual objective along the feasible segment, other multipliers fixed.
      const double v1 = e1 + y1 - bias_ - y1 * a1 * k11 - y2 * a2 * k12;
      const double v2 = e2 + y2 - bias_ - y1 * a1 * k12 - y2 * a2 * k22;
      auto objective = [&](double a2_end) {
        const double a1_end = a1 + s * (a2 - a2_end);
        return a1_end + a2_end - 0.5 * k11 * a1_end * a1_end - 0.5 * k22 * a2_end * a2_end -
               s * k12 * a1_end * a2_end - y1 * a1_end * v1 - y2 * a2_end * v2;
      };
      const double obj_lo = objective(lo);
      const double obj_hi = objective(hi);
      if (obj_lo > obj_hi + eps_) {
        a2_new = lo;
      } else if (obj_lo < obj_hi - eps_) {
        a2_new = hi;
      } else {
        a2_new = a2;
      }
    }
    if (std::abs(a2_new - a2) < eps_ * (a2_new + a2 + eps_)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    const double snap = eps_ * c_;
    if (a1_new < snap) a1_new = 0.0;
    if (a1_new > c_ - snap) a1_new = c_;
    if (a2_new < snap) a2_new = 0.0;
    if (a2_new > c_ - snap) a2_new = c_;

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > 0.0 && a1_new < c_) {
      b_new = b1;
    } else if (a2_new > 0.0 && a2_new < c_) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - bias_;

    auto row2 = cache_.row(i2);  // i1 is most recent, so row1 stays resident
    for (std::size_t i = 0; i < n_; ++i) error_[i] += d1 * row1[i] + d2 * row2[i] + db;

    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    bias_ = b_new;
    if (++steps_ > max_steps_) {
      throw ConvergenceError("SMO exceeded " + std::to_string(max_steps_) + " pair optimisations",
                             current_violation());
    }
    return true;
  }

  double current_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = error_[i] * y_[i];
      if (alpha_[i] < c_ && r < 0) worst = std::max(worst, -r);
      if (alpha_[i] > 0 && r > 0) worst = std::max(worst, r);
    }
    return worst;
  }

  std::span<const int> y_;
  double c_;
  double tol_;
  double eps_;
  std::size_t max_steps_;
  KernelCache cache_;
  Rng rng_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double bias_ = 0.0;
  std::size_t steps_ = 0;
};

}  // namespace

void KernelSpec::validate() const {
  if (kind == KernelKind::polynomial && degree < 1) {
    throw std::invalid_argument("polynomial kernel degree must be >= 1");
  }
  if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw std::invalid_argument("rbf kernel gamma must be > 0");
  }
}

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel arity mismatch");
  switch (k.kind) {
    case KernelKind::linear:
      return dot(x, y);
    case KernelKind::polynomial:
      return int_pow(dot(x, y), k.degree);
    case KernelKind::rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
      return std::exp(-k.gamma * d2);
    }
  }
  return 0.0;
}

void SmoParams::validate() const {
  if (!(c > 0.0 && std::isfinite(c))) throw std::invalid_argument("SVM C must be > 0");
  if (!(kkt_tolerance > 0.0)) throw std::invalid_argument("KKT tolerance must be > 0");
  if (!(alpha_epsilon > 0.0)) throw std::invalid_argument("alpha epsilon must be > 0");
  if (max_pair_steps == 0) throw std::invalid_argument("max_pair_steps must be > 0");
}

BinarySvmModel::BinarySvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> alphas,
                               std::vector<int> labels, double bias)
    : kernel_(kernel),
      support_vectors_(std::move(support_vectors)),
      alphas_(std::move(alphas)),
      labels_(std::move(labels)),
      bias_(bias) {
  coef_.resize(alphas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i) coef_[i] = alphas_[i] * labels_[i];
  if (kernel_.kind == KernelKind::linear) {
    weights_.assign(support_vectors_.cols(), 0.0);
    for (std::size_t i = 0; i < coef_.size(); ++i) {
      auto sv = support_vectors_.row(i);
      for (std::size_t j = 0; j < sv.size(); ++j) weights_[j] += coef_[i] * sv[j];
    }
  }
}

double BinarySvmModel::decision(std::span<const double> x) const {
  if (kernel_.kind == KernelKind::linear) return dot(weights_, x) + bias_;
  double f = bias_;
  for (std::size_t i = 0; i < coef_.size(); ++i) f += coef_[i] * kernel_eval(kernel_, support_vectors_.row(i), x);
  return f;
}

SmoSolution smo_train_binary(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                             const SmoParams& params, std::uint64_t seed) {
  kernel.validate();
  params.validate();
  if (y.size() != x.rows()) throw std::invalid_argument("label count does not match rows");
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y) {
    if (v == 1) {
      has_pos = true;
    } else if (v == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("binary SVM labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("binary SVM needs both classes");

  SmoSolver solver(x, y, kernel, params, seed);
  solver.run();

  SmoSolution out;
  out.alphas = std::move(solver.alphas());
  out.bias = solver.bias();
  out.pair_steps = solver.steps();
  out.max_kkt_violation = max_kkt_violation(x, y, kernel, out.alphas, out.bias, params.c);

  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < out.alphas.size(); ++i) {
    if (out.alphas[i] > 0.0) sv.push_back(i);
  }
  Matrix svs(sv.size(), x.cols());
  std::vector<double> sv_alpha;
  std::vector<int> sv_label;
  for (std::size_t k = 0; k < sv.size(); ++k) {
    std::copy(x.row(sv[k]).begin(), x.row(sv[k]).end(), svs.row(k).begin());
    sv_alpha.push_back(out.alphas[sv[k]]);
    sv_label.push_back(y[sv[k]]);
  }
  out.model = BinarySvmModel(kernel, std::move(svs), std::move(sv_alpha), std::move(sv_label), out.bias);
  return out;
}

double dual_objective(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                      std::span<const double> alphas) {
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    linear += alphas[i];
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (alphas[j] == 0.0) continue;
      quad += alphas[i] * alphas[j] * y[i] * y[j] * kernel_eval(kernel, x.row(i), x.row(j));
    }
  }
  return linear - 0.5 * quad;
}

double max_kkt_violation(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                         std::span<const double> alphas, double bias, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    double f = bias;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (alphas[j] != 0.0) f += alphas[j] * y[j] * kernel_eval(kernel, x.row(j), x.row(i));
    }
    const double r = y[i] * f - 1.0;
    if (alphas[i] < c && r < 0) worst = std::max(worst, -r);
    if (alphas[i] > 0 && r > 0) worst = std::max(worst, r);
  }
  return worst;
}

PairwiseSvmModel::PairwiseSvmModel(std::size_t num_classes, std::size_t num_features,
                                   std::vector<Pair> pairs)
    : num_classes_(num_classes), num_features_(num_features), pairs_(std::move(pairs)) {}

std::vector<int> PairwiseSvmModel::votes(std::span<const double> x) const {
  if (x.size() != num_features_) throw std::invalid_argument("SVM instance arity mismatch");
  std::vector<int> v(num_classes_, 0);
  for (const auto& p : pairs_) {
    if (p.constant_vote >= 0) {
      ++v[static_cast<std::size_t>(p.constant_vote)];
    } else {
      ++v[static_cast<std::size_t>(p.model.decision(x) >= 0.0 ? p.positive : p.negative)];
    }
  }
  return v;
}

int PairwiseSvmModel::predict(std::span<const double> x) const {
  auto v = votes(x);
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

PairwiseSvmModel pairwise_train(const Dataset& d, const KernelSpec& kernel, const SmoParams& params,
                                std::uint64_t seed) {
  kernel.validate();
  params.validate();
  const std::size_t k = d.num_classes();
  const std::size_t m = d.num_features();
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < d.num_rows(); ++i) by_class[static_cast<std::size_t>(d.label(i))].push_back(i);

  std::vector<PairwiseSvmModel::Pair> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      PairwiseSvmModel::Pair pair{static_cast<int>(a), static_cast<int>(b), -1, {}};
      if (by_class[a].empty() && by_class[b].empty()) continue;
      if (by_class[a].empty() || by_class[b].empty()) {
        pair.constant_vote = by_class[a].empty() ? pair.negative : pair.positive;
        pairs.push_back(std::move(pair));
        continue;
      }
      std::vector<std::size_t> rows;
      std::merge(by_class[a].begin(), by_class[a].end(), by_class[b].begin(), by_class[b].end(),
                 std::back_inserter(rows));
      Matrix x(rows.size(), m);
      std::vector<int> y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = d.row(rows[r]);
        std::copy(src.begin(), src.end(), x.row(r).begin());
        y[r] = d.label(rows[r]) == static_cast<int>(a) ? 1 : -1;
      }
      pair.model = smo_train_binary(x, y, kernel, params, combine_seed(seed, a * k + b)).model;
      pairs.push_back(std::move(pair));
    }
  }
  return PairwiseSvmModel(k, m, std::move(pairs));
}

}  // namespace bakeoff
