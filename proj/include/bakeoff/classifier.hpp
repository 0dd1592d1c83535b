#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bakeoff/dataset.hpp"

namespace bakeoff {

enum class Family { svm, random_forest, rotation_forest, logistic, nn1 };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

using ParamMap = std::map<std::string, std::string>;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
/// "k1=v1;k2=v2" in key order.
std::string format_params(const ParamMap& p);
ParamMap parse_params(std::string_view text);

class UnknownFamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter keys per family:
///   svm:             kernel (linear|polynomial|rbf), C, gamma, degree
///   random_forest:   n_trees, n_features (sqrt|log2plus1|<int>)
///   rotation_forest: n_trees, f, p
///   logistic:        ridge
///   nn1:             (none)
struct ClassifierSpec {
  Family family = Family::logistic;
  ParamMap params;

  /// Declared keys with defaults filled in for anything not given.
  ParamMap resolved() const;
  /// Throws InvalidParamError for unknown keys or bad values.
  void validate() const;
  std::string to_string() const;
};

const std::vector<std::string>& declared_params(Family f);
ParamMap default_params(Family f);

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  /// Non-negative class probabilities summing to 1.
  virtual std::vector<double> distribution(std::span<const double> x) const = 0;
  virtual std::size_t num_features() const = 0;
  virtual std::size_t num_classes() const = 0;

  /// Ensembles: number of members, and the distribution of the first n of them.
  virtual std::size_t ensemble_size() const { return 0; }
  virtual std::vector<double> distribution_prefix(std::span<const double> x, std::size_t n) const;

  /// Argmax of distribution; ties go to the lowest class index.
  virtual int predict(std::span<const double> x) const;
};

/// Index of the largest entry, lowest index on ties.
int argmax(std::span<const double> v);

std::unique_ptr<TrainedModel> train(const ClassifierSpec& spec, const Dataset& train, std::uint64_t seed);

/// Fraction of rows predicted correctly.
double accuracy(const TrainedModel& m, const Dataset& d);
/// Accuracy of the first n ensemble members.
double accuracy_prefix(const TrainedModel& m, const Dataset& d, std::size_t n);

}  // namespace bakeoff
