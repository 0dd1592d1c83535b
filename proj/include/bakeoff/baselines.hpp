#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bakeoff/dataset.hpp"
#include "bakeoff/linalg.hpp"

namespace bakeoff {

struct LogisticParams {
  double ridge = 1e-8;
  int max_newton_iters = 200;
  double gradient_tolerance = 1e-8;
};

/// Multinomial logistic regression with the last class as reference.
/// Row c of weights holds the intercept in column 0, then one coefficient
/// per feature.
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(Matrix weights, std::size_t num_classes, int iterations, bool converged);

  std::vector<double> distribution(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  const Matrix& weights() const { return weights_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_features() const { return weights_.cols() - 1; }
  int iterations() const { return iterations_; }
  bool converged() const { return converged_; }

 private:
  Matrix weights_;
  std::size_t num_classes_ = 0;
  int iterations_ = 0;
  bool converged_ = false;
};

class NonFiniteLikelihoodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton/IRLS with step halving on log-likelihood - ridge * |w|^2
/// (intercepts excluded from the penalty).
LogisticModel logistic_train(const Dataset& d, const LogisticParams& p = {});

/// Penalised log-likelihood and its gradient; weights laid out as in
/// LogisticModel, flattened row-major.
double logistic_objective(const Dataset& d, std::span<const double> weights, double ridge);
std::vector<double> logistic_gradient(const Dataset& d, std::span<const double> weights, double ridge);

/// Class of the Euclidean-nearest training row; the earliest row wins ties.
int nn1_predict(const Dataset& train, std::span<const double> x);

}  // namespace bakeoff
