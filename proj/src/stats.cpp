#include "bakeoff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace bakeoff {

namespace {

constexpr std::size_t kExactWilcoxonLimit = 25;

void check_paired(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  if (a.empty()) throw std::invalid_argument("paired samples are empty");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct SignedRanks {
  std::vector<double> ranks;  // ranks of |d| for non-zero d
  std::vector<bool> positive;
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
};

SignedRanks signed_ranks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  SignedRanks out;
  std::vector<double> mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::fabs(d[i]);
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return mag[x] < mag[y]; });
  out.ranks.assign(d.size(), 0.0);
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && mag[idx[j + 1]] == mag[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) out.ranks[idx[q]] = r;
    const double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  out.positive.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out.positive[i] = d[i] > 0;
  return out;
}

WilcoxonResult wilcoxon_impl(const std::vector<double>& a, const std::vector<double>& b, bool allow_exact) {
  check_paired(a, b);
  const SignedRanks sr = signed_ranks(a, b);
  WilcoxonResult res;
  res.n = sr.ranks.size();
  if (res.n == 0) {
    res.no_information = true;
    return res;
  }
  for (std::size_t i = 0; i < res.n; ++i) (sr.positive[i] ? res.w_plus : res.w_minus) += sr.ranks[i];
  res.w = std::min(res.w_plus, res.w_minus);
  const double n = static_cast<double>(res.n);
  if (allow_exact && res.n <= kExactWilcoxonLimit) {
    // Ranks are multiples of 1/2; count sign assignments by doubled positive rank sum.
    std::vector<long> doubled(res.n);
    long total = 0;
    for (std::size_t i = 0; i < res.n; ++i) {
      doubled[i] = std::lround(2.0 * sr.ranks[i]);
      total += doubled[i];
    }
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
      for (long s = reach; s >= 0; --s) {
        if (ways[static_cast<std::size_t>(s)] != 0.0) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
      }
      reach += r;
    }
    const long w2 = std::lround(2.0 * res.w);
    double tail = 0.0;
    for (long s = 0; s <= w2; ++s) tail += ways[static_cast<std::size_t>(s)];
    res.p = std::min(1.0, 2.0 * std::ldexp(tail, -static_cast<int>(res.n)));
    res.exact = true;
    return res;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - sr.tie_term / 48.0;
  if (!(var > 0.0)) {
    res.p = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::fabs(res.w_plus - mean) - 0.5) / std::sqrt(var);
  const boost::math::normal_distribution<double> norm;
  res.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(norm, z)));
  return res;
}

}  // namespace

void AccuracyMatrix::validate() const {
  if (cells.size() != datasets.size()) throw std::invalid_argument("accuracy matrix row count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != classifiers.size()) {
      throw std::invalid_argument("accuracy matrix row for " + datasets[i] + " is incomplete");
    }
    for (double v : cells[i]) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("accuracy outside [0, 1] for " + datasets[i]);
    }
  }
}

std::vector<double> AccuracyMatrix::column(std::size_t classifier) const {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& row : cells) out.push_back(row.at(classifier));
  return out;
}

AccuracyMatrix read_accuracy_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  AccuracyMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "dataset") {
    throw std::runtime_error(path + ": header must be dataset,<classifier ids...>");
  }
  m.classifiers.assign(header.begin() + 1, header.end());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                               " fields, expected " + std::to_string(header.size()));
    }
    m.datasets.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": bad value '" + cells[c] + "'");
      }
    }
    m.cells.push_back(std::move(row));
  }
  m.validate();
  return m;
}

void write_accuracy_matrix(const AccuracyMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "dataset";
  for (const auto& c : m.classifiers) out << ',' << c;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.datasets.size(); ++i) {
    out << m.datasets[i];
    for (double v : m.cells[i]) {
      std::snprintf(buf, sizeof buf, ",%.9f", v);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) ranks[idx[q]] = r;
    i = j + 1;
  }
  return ranks;
}

RankSummary mean_ranks(const AccuracyMatrix& m) {
  m.validate();
  if (m.datasets.empty()) throw std::invalid_argument("accuracy matrix has no datasets");
  RankSummary s;
  s.mean_ranks.assign(m.classifiers.size(), 0.0);
  for (const auto& row : m.cells) {
    const auto r = average_ranks(row);
    for (std::size_t c = 0; c < r.size(); ++c) s.mean_ranks[c] += r[c];
  }
  for (double& r : s.mean_ranks) r /= static_cast<double>(m.datasets.size());
  return s;
}

FriedmanResult friedman_test(const AccuracyMatrix& m) {
  const std::size_t k = m.classifiers.size();
  const std::size_t n = m.datasets.size();
  if (k < 2 || n < 2) throw std::invalid_argument("Friedman test needs at least two classifiers and two datasets");
  const auto ranks = mean_ranks(m);
  const double kd = static_cast<double>(k);
  double ss = 0.0;
  for (double r : ranks.mean_ranks) ss += (r - (kd + 1.0) / 2.0) * (r - (kd + 1.0) / 2.0);
  FriedmanResult res;
  res.chi2 = 12.0 * static_cast<double>(n) / (kd * (kd + 1.0)) * ss;
  res.df = static_cast<int>(k) - 1;
  if (res.chi2 <= 0.0) {
    res.chi2 = 0.0;
    res.p = 1.0;
  } else {
    const boost::math::chi_squared_distribution<double> chi(res.df);
    res.p = boost::math::cdf(boost::math::complement(chi, res.chi2));
  }
  return res;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  return wilcoxon_impl(a, b, true);
}

WilcoxonResult wilcoxon_normal_approx(const std::vector<double>& a, const std::vector<double>& b) {
  return wilcoxon_impl(a, b, false);
}

SignTestResult sign_test(const std::vector<double>& a, const std::vector<double>& b) {
  check_paired(a, b);
  SignTestResult res;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++res.wins;
    } else if (a[i] < b[i]) {
      ++res.losses;
    } else {
      ++res.ties;
    }
  }
  const std::size_t n = res.wins + res.losses;
  if (n == 0) return res;
  const std::size_t low = std::min(res.wins, res.losses);
  if (n <= 1000) {
    double coef = 1.0;
    double tail = 0.0;
    for (std::size_t i = 0; i <= low; ++i) {
      tail += coef;
      coef = coef * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    res.p = std::min(1.0, 2.0 * std::ldexp(tail, -static_cast<int>(n)));
  } else {
    const boost::math::binomial_distribution<double> bin(static_cast<double>(n), 0.5);
    res.p = std::min(1.0, 2.0 * boost::math::cdf(bin, static_cast<double>(low)));
  }
  return res;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  check_paired(a, b);
  if (a.size() < 2) throw std::invalid_argument("paired t-test needs at least two pairs");
  const double n = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  TTestResult res;
  res.df = static_cast<int>(a.size()) - 1;
  const double se = std::sqrt(ss / (n - 1.0) / n);
  // Differences equal to rounding noise count as constant.
  const double scale = std::max(1.0, std::fabs(mean));
  if (!(se > 1e-14 * scale)) {
    res.degenerate = true;
    const bool differ = std::any_of(d.begin(), d.end(), [](double v) { return v != 0.0; });
    res.p = differ && mean != 0.0 ? 0.0 : 1.0;
    return res;
  }
  res.t = mean / se;
  const boost::math::students_t_distribution<double> dist(res.df);
  res.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(res.t))));
  return res;
}

HolmResult holm_adjust(const std::vector<double>& raw_p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::size_t m = raw_p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return raw_p[a] < raw_p[b]; });
  HolmResult res;
  res.adjusted_p.assign(m, 1.0);
  res.rejected.assign(m, false);
  double running = 0.0;
  bool still_rejecting = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = raw_p[idx[i]];
    const double factor = static_cast<double>(m - i);
    running = std::max(running, std::min(1.0, factor * p));
    res.adjusted_p[idx[i]] = running;
    still_rejecting = still_rejecting && p <= alpha / factor;
    res.rejected[idx[i]] = still_rejecting;
  }
  return res;
}

std::vector<PairwiseTestResult> pairwise_wilcoxon(const AccuracyMatrix& m, double alpha) {
  m.validate();
  std::vector<PairwiseTestResult> out;
  std::vector<double> raw;
  const std::size_t k = m.classifiers.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto w = wilcoxon_signed_rank(m.column(i), m.column(j));
      PairwiseTestResult r;
      r.first = i;
      r.second = j;
      r.statistic = w.w;
      r.raw_p = w.p;
      r.alpha = alpha;
      out.push_back(r);
      raw.push_back(w.p);
    }
  }
  const auto holm = holm_adjust(raw, alpha);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t].holm_adjusted_p = holm.adjusted_p[t];
    out[t].rejected = holm.rejected[t];
  }
  return out;
}

std::vector<std::vector<bool>> rejection_matrix(std::size_t k, const std::vector<PairwiseTestResult>& tests) {
  std::vector<std::vector<bool>> r(k, std::vector<bool>(k, false));
  for (const auto& t : tests) {
    r.at(t.first).at(t.second) = t.rejected;
    r.at(t.second).at(t.first) = t.rejected;
  }
  return r;
}

CliqueSet form_cliques(const RankSummary& ranks, const std::vector<std::vector<bool>>& rejected) {
  const std::size_t k = ranks.mean_ranks.size();
  if (rejected.size() != k) throw std::invalid_argument("rejection matrix size mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    if (rejected[i].size() != k) throw std::invalid_argument("rejection matrix size mismatch");
    for (std::size_t j = 0; j < k; ++j) {
      if (rejected[i][j] != rejected[j][i]) throw std::invalid_argument("rejection matrix is not symmetric");
    }
  }
  CliqueSet cs;
  cs.order.resize(k);
  std::iota(cs.order.begin(), cs.order.end(), 0);
  std::stable_sort(cs.order.begin(), cs.order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks.mean_ranks[a] < ranks.mean_ranks[b]; });
  std::size_t prev_end = 0;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t e = s;
    while (e + 1 < k) {
      bool ok = true;
      for (std::size_t q = s; q <= e && ok; ++q) ok = !rejected[cs.order[q]][cs.order[e + 1]];
      if (!ok) break;
      ++e;
    }
    // Ends are non-decreasing in s, so an interval is contained in its
    // predecessor exactly when they end at the same place.
    if (s > 0 && e == prev_end) continue;
    prev_end = e;
    cs.cliques.emplace_back(cs.order.begin() + static_cast<std::ptrdiff_t>(s),
                            cs.order.begin() + static_cast<std::ptrdiff_t>(e + 1));
  }
  return cs;
}

const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::tp: return "TP";
    case Quadrant::tn: return "TN";
    case Quadrant::fp: return "FP";
    case Quadrant::fn: return "FN";
  }
  return "?";
}

Quadrant classify_ratio(double train_ratio, double test_ratio) {
  const bool predicted = train_ratio > 1.0;
  const bool observed = test_ratio > 1.0;
  if (predicted) return observed ? Quadrant::tp : Quadrant::fp;
  return observed ? Quadrant::fn : Quadrant::tn;
}

SharpshooterSummary sharpshooter(const std::vector<std::pair<double, double>>& ratios) {
  SharpshooterSummary s;
  for (const auto& [tr, te] : ratios) {
    if (!(tr > 0.0 && te > 0.0)) throw std::invalid_argument("sharpshooter ratios must be positive");
    const Quadrant q = classify_ratio(tr, te);
    s.points.push_back({tr, te, q});
    switch (q) {
      case Quadrant::tp: ++s.tp; break;
      case Quadrant::tn: ++s.tn; break;
      case Quadrant::fp: ++s.fp; break;
      case Quadrant::fn: ++s.fn; break;
    }
  }
  if (!s.points.empty()) {
    s.correct_decision_rate = static_cast<double>(s.tp + s.tn) / static_cast<double>(s.points.size());
  }
  return s;
}

}  // namespace bakeoff
