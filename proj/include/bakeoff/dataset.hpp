#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bakeoff {

enum class FeatureKind { numeric, nominal };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> values;  // nominal only, in declaration order

  static FeatureSpec numeric(std::string name);
  /// Throws std::invalid_argument on an empty or duplicated value list.
  static FeatureSpec nominal(std::string name, std::vector<std::string> values);

  bool is_nominal() const { return kind == FeatureKind::nominal; }
};

struct DatasetSchema {
  std::vector<FeatureSpec> features;
  std::vector<std::string> class_values;

  std::size_t num_attributes() const { return features.size(); }
  std::size_t num_classes() const { return class_values.size(); }
  void validate() const;
};

/// Load or parse failure. line() is 0 when no line applies.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable row-major instance table. Nominal cells hold the value index;
/// missing numeric cells hold NaN until imputed.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string id, DatasetSchema schema, std::vector<double> values,
          std::vector<int> labels);

  const std::string& id() const { return id_; }
  const DatasetSchema& schema() const { return schema_; }
  std::size_t num_rows() const { return labels_.size(); }
  std::size_t num_features() const { return schema_.num_attributes(); }
  std::size_t num_classes() const { return schema_.num_classes(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_features(), num_features()};
  }
  double value(std::size_t i, std::size_t j) const { return values_[i * num_features() + j]; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  std::span<const double> values() const { return values_; }

  std::vector<std::size_t> class_counts() const;
  bool has_missing() const;
  bool all_numeric() const;

  /// Rows in the given order (duplicates allowed).
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_id(std::string id) const;

 private:
  std::string id_;
  DatasetSchema schema_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

enum class DataFormat { arff, csv };

/// Dataset id is the file stem. Format is chosen from the extension.
Dataset load_dataset(const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset parse_arff(std::istream& in, const std::string& id);
Dataset parse_csv(std::istream& in, const std::string& id);

/// Nominal features with k > 2 values become k 0/1 indicators named
/// "name=value"; k <= 2 becomes one feature that is 1 for the first value.
Dataset encode_nominal_to_binary(const Dataset& d);

struct NormStats {
  std::vector<double> min;
  std::vector<double> max;
};

struct NormalizedPair {
  Dataset train;
  Dataset test;
  NormStats stats;
};

/// Min-max scaling fitted on train. Test values are not clipped; a constant
/// train feature maps everything to 0.
NormalizedPair normalize_fit_apply(const Dataset& train, const Dataset& test);

/// Replaces NaN cells with train means (numeric) or train modes (nominal).
std::pair<Dataset, Dataset> impute_missing(const Dataset& train, const Dataset& test);

/// impute -> encode -> normalize, all fitted on train.
std::pair<Dataset, Dataset> preprocess(const Dataset& train, const Dataset& test);

struct SplitPair {
  Dataset train;
  Dataset test;
  int resample_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Stratified random train/test split, deterministic in
/// (master_seed, d.id(), resample_id).
SplitPair stratified_resample(const Dataset& d, int resample_id, std::uint64_t master_seed,
                              double train_fraction = 0.5);

/// Per-class training counts: round-half-even of n * fraction in total,
/// distributed by largest remainder.
std::vector<std::size_t> stratified_train_counts(std::span<const std::size_t> class_counts,
                                                 double train_fraction);

struct Fold {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
};

/// Stratified k-fold partition. Validation folds are disjoint, cover every
/// row and differ in size by at most one.
std::vector<Fold> kfold_partition(const Dataset& d, int k, std::uint64_t seed);

}  // namespace bakeoff
