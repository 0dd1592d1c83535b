#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bakeoff/dataset.hpp"
#include "bakeoff/linalg.hpp"

namespace bakeoff {

enum class KernelKind { linear, polynomial, rbf };

/// linear: x.y   polynomial: (x.y)^degree   rbf: exp(-gamma |x - y|^2)
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  int degree = 2;
  double gamma = 0.01;

  static KernelSpec linear() { return {KernelKind::linear, 1, 0.0}; }
  static KernelSpec polynomial(int degree) { return {KernelKind::polynomial, degree, 0.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::rbf, 1, gamma}; }
  void validate() const;
};

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> y);

struct SmoParams {
  double c = 1.0;
  double kkt_tolerance = 1e-3;
  double alpha_epsilon = 1e-12;
  std::size_t max_pair_steps = 10'000'000;
  std::size_t cache_bytes = std::size_t{64} << 20;

  void validate() const;
};

/// Raised when SMO exceeds max_pair_steps.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double kkt_violation)
      : std::runtime_error(what), kkt_violation_(kkt_violation) {}
  double kkt_violation() const { return kkt_violation_; }

 private:
  double kkt_violation_;
};

/// f(x) = sum_i alpha_i y_i k(sv_i, x) + bias over the support vectors.
class BinarySvmModel {
 public:
  BinarySvmModel() = default;
  BinarySvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> alphas,
                 std::vector<int> labels, double bias);

  double decision(std::span<const double> x) const;

  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& support_vectors() const { return support_vectors_; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<const int> labels() const { return labels_; }
  double bias() const { return bias_; }

 private:
  KernelSpec kernel_;
  Matrix support_vectors_;
  std::vector<double> alphas_;
  std::vector<int> labels_;
  std::vector<double> coef_;     // alpha_i * y_i
  std::vector<double> weights_;  // primal weights, linear kernel only
  double bias_ = 0.0;
};

struct SmoSolution {
  std::vector<double> alphas;  // one per training row
  double bias = 0.0;
  double max_kkt_violation = 0.0;
  std::size_t pair_steps = 0;
  BinarySvmModel model;
};

/// Platt's SMO. Labels must be +1/-1 with both present.
SmoSolution smo_train_binary(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                             const SmoParams& params, std::uint64_t seed);

/// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j)
double dual_objective(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                      std::span<const double> alphas);

/// Largest violation of the box-constrained KKT conditions, measured on
/// y_i f(x_i) - 1.
double max_kkt_violation(const Matrix& x, std::span<const int> y, const KernelSpec& kernel,
                         std::span<const double> alphas, double bias, double c);

/// One-vs-one ensemble. Pair (a, b) with a < b maps class a to +1; a
/// non-negative decision votes for a. Ties in the vote go to the lowest class.
class PairwiseSvmModel {
 public:
  struct Pair {
    int positive;
    int negative;
    // Set when one class of the pair was absent in training: always vote for it.
    int constant_vote = -1;
    BinarySvmModel model;
  };

  PairwiseSvmModel(std::size_t num_classes, std::size_t num_features, std::vector<Pair> pairs);

  std::vector<int> votes(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_features() const { return num_features_; }
  const std::vector<Pair>& pairs() const { return pairs_; }

 private:
  std::size_t num_classes_;
  std::size_t num_features_;
  std::vector<Pair> pairs_;
};

PairwiseSvmModel pairwise_train(const Dataset& d, const KernelSpec& kernel, const SmoParams& params,
                                std::uint64_t seed);

}  // namespace bakeoff
