#include "bakeoff/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>

namespace bakeoff {

namespace {

// Class probabilities for one row; the reference class has logit 0.
void softmax_row(std::span<const double> w, std::size_t k, std::span<const double> x,
                 std::span<double> prob) {
  const std::size_t cols = x.size() + 1;
  double max_logit = 0.0;
  for (std::size_t c = 0; c + 1 < k; ++c) {
    double z = w[c * cols];
    for (std::size_t j = 0; j < x.size(); ++j) z += w[c * cols + j + 1] * x[j];
    prob[c] = z;
    max_logit = std::max(max_logit, z);
  }
  prob[k - 1] = 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    prob[c] = std::exp(prob[c] - max_logit);
    total += prob[c];
  }
  for (std::size_t c = 0; c < k; ++c) prob[c] /= total;
}

double log_likelihood(const Dataset& d, std::span<const double> w) {
  const std::size_t k = d.num_classes();
  const std::size_t cols = d.num_features() + 1;
  double ll = 0.0;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    auto x = d.row(i);
    double max_logit = 0.0;
    for (std::size_t c = 0; c + 1 < k; ++c) {
      double s = w[c * cols];
      for (std::size_t j = 0; j < x.size(); ++j) s += w[c * cols + j + 1] * x[j];
      z[c] = s;
      max_logit = std::max(max_logit, s);
    }
    z[k - 1] = 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) total += std::exp(z[c] - max_logit);
    ll += z[static_cast<std::size_t>(d.label(i))] - max_logit - std::log(total);
  }
  return ll;
}

double penalty(std::span<const double> w, std::size_t cols) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i % cols != 0) s += w[i] * w[i];
  }
  return s;
}

}  // namespace

LogisticModel::LogisticModel(Matrix weights, std::size_t num_classes, int iterations, bool converged)
    : weights_(std::move(weights)),
      num_classes_(num_classes),
      iterations_(iterations),
      converged_(converged) {}

std::vector<double> LogisticModel::distribution(std::span<const double> x) const {
  if (x.size() != num_features()) throw std::invalid_argument("logistic instance arity mismatch");
  std::vector<double> p(num_classes_);
  softmax_row(weights_.data(), num_classes_, x, p);
  return p;
}

int LogisticModel::predict(std::span<const double> x) const {
  auto p = distribution(x);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double logistic_objective(const Dataset& d, std::span<const double> weights, double ridge) {
  return log_likelihood(d, weights) - ridge * penalty(weights, d.num_features() + 1);
}

std::vector<double> logistic_gradient(const Dataset& d, std::span<const double> w, double ridge) {
  const std::size_t k = d.num_classes();
  const std::size_t cols = d.num_features() + 1;
  std::vector<double> g(w.size(), 0.0);
  std::vector<double> p(k);
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    auto x = d.row(i);
    softmax_row(w, k, x, p);
    for (std::size_t c = 0; c + 1 < k; ++c) {
      const double r = (d.label(i) == static_cast<int>(c) ? 1.0 : 0.0) - p[c];
      g[c * cols] += r;
      for (std::size_t j = 0; j < x.size(); ++j) g[c * cols + j + 1] += r * x[j];
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i % cols != 0) g[i] -= 2.0 * ridge * w[i];
  }
  return g;
}

LogisticModel logistic_train(const Dataset& d, const LogisticParams& params) {
  if (params.ridge < 0) throw std::invalid_argument("ridge must be >= 0");
  if (d.empty()) throw std::invalid_argument("logistic regression needs training rows");
  const std::size_t k = d.num_classes();
  const std::size_t m = d.num_features();
  const std::size_t cols = m + 1;
  const std::size_t dim = (k - 1) * cols;

  std::vector<double> w(dim, 0.0);
  double obj = logistic_objective(d, w, params.ridge);
  if (!std::isfinite(obj)) throw NonFiniteLikelihoodError("non-finite log-likelihood at start");

  std::vector<double> p(k);
  std::vector<double> xa(cols);
  Matrix neg_hessian(dim, dim);
  std::vector<double> step(dim);
  std::vector<double> trial(dim);
  bool converged = false;
  int iter = 0;
  for (; iter < params.max_newton_iters; ++iter) {
    auto g = logistic_gradient(d, w, params.ridge);
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm <= params.gradient_tolerance) {
      converged = true;
      break;
    }
    // -H = sum_i (diag(p) - p p^T) (x) x x^T + 2 ridge I (non-intercept)
    neg_hessian = Matrix(dim, dim);
    for (std::size_t i = 0; i < d.num_rows(); ++i) {
      auto x = d.row(i);
      softmax_row(w, k, x, p);
      xa[0] = 1.0;
      std::copy(x.begin(), x.end(), xa.begin() + 1);
      for (std::size_t c1 = 0; c1 + 1 < k; ++c1) {
        for (std::size_t c2 = c1; c2 + 1 < k; ++c2) {
          const double wgt = (c1 == c2 ? p[c1] : 0.0) - p[c1] * p[c2];
          if (wgt == 0.0) continue;
          for (std::size_t a = 0; a < cols; ++a) {
            const double wa = wgt * xa[a];
            for (std::size_t b = 0; b < cols; ++b) neg_hessian(c1 * cols + a, c2 * cols + b) += wa * xa[b];
          }
        }
      }
    }
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < r; ++c) neg_hessian(r, c) = neg_hessian(c, r);
      if (r % cols != 0) neg_hessian(r, r) += 2.0 * params.ridge;
    }
    for (double jitter = 1e-10; !solve_spd(neg_hessian, g, step); jitter *= 10.0) {
      if (jitter > 1e6) throw NonFiniteLikelihoodError("Newton system is not positive definite");
      for (std::size_t r = 0; r < dim; ++r) neg_hessian(r, r) += jitter;
    }

    double scale = 1.0;
    double trial_obj = 0.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = w[i] + scale * step[i];
      trial_obj = logistic_objective(d, trial, params.ridge);
      if (std::isfinite(trial_obj) && trial_obj >= obj) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;  // no ascent possible at machine precision
    w = trial;
    if (!std::isfinite(trial_obj)) throw NonFiniteLikelihoodError("non-finite log-likelihood");
    obj = trial_obj;
  }
  static std::atomic<bool> warned{false};
  if (!converged && iter >= params.max_newton_iters && !warned.exchange(true)) {
    std::cerr << "warning: logistic regression hit the Newton iteration cap (" << params.max_newton_iters
              << "); further occurrences are not reported\n";
  }
  return LogisticModel(Matrix(k - 1, cols, std::move(w)), k, iter, converged);
}

int nn1_predict(const Dataset& train, std::span<const double> x) {
  if (train.empty()) throw std::invalid_argument("1-NN needs a non-empty training set");
  if (x.size() != train.num_features()) throw std::invalid_argument("1-NN instance arity mismatch");
  double best = std::numeric_limits<double>::infinity();
  int label = train.label(0);
  for (std::size_t i = 0; i < train.num_rows(); ++i) {
    auto r = train.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < r.size() && d2 < best; ++j) d2 += (r[j] - x[j]) * (r[j] - x[j]);
    if (d2 < best) {
      best = d2;
      label = train.label(i);
    }
  }
  return label;
}

}  // namespace bakeoff
