#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bakeoff/classifier.hpp"
#include "bakeoff/stats.hpp"

namespace bakeoff {

struct ClassifierConfig {
  std::string id;
  ClassifierSpec spec;
  bool tuned = false;
  // Explicit value lists per parameter; replaces the standard grid when set.
  std::optional<std::map<std::string, std::vector<std::string>>> grid;
};

struct ExperimentConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<ClassifierConfig> classifiers;
  int resamples = 30;
  double train_fraction = 0.5;
  int cv_folds = 10;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::filesystem::path out_dir = "results";
  bool record_train_time = true;  // false writes 0 so reruns compare byte for byte

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// JSON keys: datasets[], classifiers[] {id, family, params{}, tuned, grid{}},
/// resamples, train_fraction, cv_folds, seed, alpha, out_dir, record_train_time.
/// Relative paths are resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");

struct EvalRecord {
  std::string dataset;
  std::string classifier;
  int resample_id = 0;
  double test_accuracy = 0.0;
  double train_cv_accuracy = 0.0;
  ParamMap params;
  double train_time_ms = 0.0;
};

using RecordKey = std::tuple<std::string, std::string, int>;

extern const char* const kResultsHeader;

std::string format_record(const EvalRecord& r);
/// Throws std::invalid_argument for a malformed line.
EvalRecord parse_record(const std::string& line);

/// Append-only record set backed by a CSV file. Appends are serialised and
/// flushed; canonicalize() rewrites the file sorted by key.
class ResultStore {
 public:
  ResultStore() = default;
  /// Loads existing rows; a malformed trailing row from an interrupted run is dropped.
  explicit ResultStore(std::filesystem::path path);

  bool contains(const RecordKey& key) const;
  /// Returns false (and writes nothing) if the key is already present.
  bool append(const EvalRecord& r);
  std::vector<EvalRecord> records() const;  // sorted by key
  std::size_t size() const;
  void canonicalize() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<RecordKey, EvalRecord> records_;
};

std::vector<EvalRecord> read_results(const std::filesystem::path& path);

/// Mean test accuracy per (dataset, classifier) in first-appearance order.
/// Throws if some classifier has no record for some dataset.
AccuracyMatrix accuracy_matrix(const std::vector<EvalRecord>& records);
/// Same layout for the train_cv_accuracy column.
AccuracyMatrix cv_accuracy_matrix(const std::vector<EvalRecord>& records);

struct RunSummary {
  std::size_t tasks = 0;
  std::size_t skipped = 0;  // already in the store
  std::size_t trained = 0;
  std::size_t failed = 0;
  bool complete = false;  // every key has a record
};

struct RunOptions {
  unsigned threads = 0;           // 0: BAKEOFF_THREADS or hardware concurrency
  std::size_t stop_after = 0;     // test hook: stop scheduling after this many new records
  bool quiet = false;
};

unsigned default_thread_count();

/// Runs every missing (dataset, classifier, resample) task and writes
/// out_dir/results.csv (sorted) and out_dir/failures.csv.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// One task of the protocol: split, optional grid search, final fit, test.
EvalRecord run_task(const Dataset& d, const ClassifierConfig& c, int resample_id, const ExperimentConfig& cfg);

struct ReportOptions {
  double alpha = 0.05;
  std::filesystem::path out_dir;
};

/// Matrix, ranks, Friedman, Holm-Wilcoxon cliques, per-dataset paired tests and
/// all figures for an existing results file. Returns the text summary.
std::string write_report(const std::vector<EvalRecord>& records, const ReportOptions& opts);

/// Per-dataset (train CV ratio, test ratio) of classifier a over b.
SharpshooterSummary sharpshooter_for_pair(const std::vector<EvalRecord>& records, const std::string& a,
                                          const std::string& b, std::vector<std::string>* labels = nullptr);

}  // namespace bakeoff
