#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace bakeoff {

/// Mean accuracy per (dataset, classifier).
struct AccuracyMatrix {
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers;
  std::vector<std::vector<double>> cells;  // [dataset][classifier]

  /// Throws std::invalid_argument when a row is short or a value is not in [0, 1].
  void validate() const;
  std::vector<double> column(std::size_t classifier) const;
};

/// Header `dataset,<classifier ids...>`, one row per dataset.
AccuracyMatrix read_accuracy_matrix(const std::string& path);
void write_accuracy_matrix(const AccuracyMatrix& m, const std::string& path);

/// Rank 1 = highest value; ties share the average rank.
std::vector<double> average_ranks(const std::vector<double>& values);

struct RankSummary {
  std::vector<double> mean_ranks;  // per classifier
};

RankSummary mean_ranks(const AccuracyMatrix& m);

struct FriedmanResult {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
};

FriedmanResult friedman_test(const AccuracyMatrix& m);

struct WilcoxonResult {
  double w = 0.0;       // min(W+, W-)
  double w_plus = 0.0;  // rank sum of positive a - b
  double w_minus = 0.0;
  double p = 1.0;
  std::size_t n = 0;     // non-zero differences
  bool exact = false;
  bool no_information = false;  // every difference was zero
};

/// Zero differences are dropped; exact two-sided p for n <= 25 (enumerating all sign
/// assignments via the rank-sum distribution), otherwise the tie-corrected normal
/// approximation with continuity correction.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);
/// Same test forced to the normal approximation.
WilcoxonResult wilcoxon_normal_approx(const std::vector<double>& a, const std::vector<double>& b);

struct SignTestResult {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  double p = 1.0;
};

/// Exact two-sided binomial(n, 1/2) test over non-tied pairs.
SignTestResult sign_test(const std::vector<double>& a, const std::vector<double>& b);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  bool degenerate = false;  // zero variance of the differences
};

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

struct HolmResult {
  std::vector<double> adjusted_p;  // input order
  std::vector<bool> rejected;
};

HolmResult holm_adjust(const std::vector<double>& raw_p, double alpha);

struct PairwiseTestResult {
  std::size_t first = 0;
  std::size_t second = 0;
  double statistic = 0.0;
  double raw_p = 1.0;
  double holm_adjusted_p = 1.0;
  bool rejected = false;
  double alpha = 0.05;
};

/// Wilcoxon test for every classifier pair across datasets, Holm-adjusted.
std::vector<PairwiseTestResult> pairwise_wilcoxon(const AccuracyMatrix& m, double alpha);

/// Symmetric k x k rejection matrix from pairwise results.
std::vector<std::vector<bool>> rejection_matrix(std::size_t k, const std::vector<PairwiseTestResult>& tests);

struct CliqueSet {
  std::vector<std::size_t> order;                // classifiers sorted by mean rank
  std::vector<std::vector<std::size_t>> cliques;  // classifier indices, contiguous in `order`
};

/// Maximal runs of the rank order with no rejected pair inside.
CliqueSet form_cliques(const RankSummary& ranks, const std::vector<std::vector<bool>>& rejected);

enum class Quadrant { tp, tn, fp, fn };
const char* quadrant_name(Quadrant q);

struct SharpshooterPoint {
  double train_ratio = 1.0;
  double test_ratio = 1.0;
  Quadrant quadrant = Quadrant::tn;
};

/// A ratio of exactly 1 counts as "no gain".
Quadrant classify_ratio(double train_ratio, double test_ratio);

struct SharpshooterSummary {
  std::vector<SharpshooterPoint> points;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  double correct_decision_rate = 0.0;
};

SharpshooterSummary sharpshooter(const std::vector<std::pair<double, double>>& ratios);

}  // namespace bakeoff
