#include "bakeoff/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bakeoff/dataset.hpp"
#include "bakeoff/plots.hpp"
#include "bakeoff/random.hpp"
#include "bakeoff/tuning.hpp"

namespace bakeoff {

const char* const kResultsHeader = "dataset,classifier,resample_id,test_accuracy,train_cv_accuracy,params,train_time_ms";

namespace {

using json = nlohmann::json;

std::string json_scalar(const json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw std::invalid_argument(what + " must be a string or number");
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out;
}

AccuracyMatrix matrix_of(const std::vector<EvalRecord>& records, bool cv) {
  AccuracyMatrix m;
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    if (std::find(m.datasets.begin(), m.datasets.end(), r.dataset) == m.datasets.end()) m.datasets.push_back(r.dataset);
    if (std::find(m.classifiers.begin(), m.classifiers.end(), r.classifier) == m.classifiers.end()) {
      m.classifiers.push_back(r.classifier);
    }
    auto& s = sums[{r.dataset, r.classifier}];
    s.first += cv ? r.train_cv_accuracy : r.test_accuracy;
    s.second += 1;
  }
  for (const auto& d : m.datasets) {
    std::vector<double> row;
    for (const auto& c : m.classifiers) {
      auto it = sums.find({d, c});
      if (it == sums.end()) throw std::runtime_error("no results for classifier " + c + " on dataset " + d);
      row.push_back(it->second.first / static_cast<double>(it->second.second));
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw std::invalid_argument("config lists no datasets");
  if (classifiers.empty()) throw std::invalid_argument("config lists no classifiers");
  if (resamples < 1) throw std::invalid_argument("resamples must be at least 1");
  if (!(train_fraction > 0 && train_fraction < 1)) throw std::invalid_argument("train_fraction must lie in (0, 1)");
  if (cv_folds < 2) throw std::invalid_argument("cv_folds must be at least 2");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  std::set<std::string> stems;
  for (const auto& p : datasets) {
    if (!std::filesystem::exists(p)) throw std::invalid_argument("dataset file not found: " + p.string());
    if (!stems.insert(p.stem().string()).second) throw std::invalid_argument("dataset id repeated: " + p.stem().string());
  }
  std::set<std::string> ids;
  for (const auto& c : classifiers) {
    if (c.id.empty() || c.id.find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument("classifier id must be non-empty without commas: '" + c.id + "'");
    }
    if (!ids.insert(c.id).second) throw std::invalid_argument("classifier id repeated: " + c.id);
    c.spec.validate();
    if (c.grid) {
      if (!c.tuned) throw std::invalid_argument("classifier " + c.id + " has a grid but is not tuned");
      grid_from_values(c.spec.family, c.spec.resolved(), *c.grid);
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{"datasets", "classifiers", "resamples", "train_fraction", "cv_folds",
                                          "seed", "alpha", "out_dir", "record_train_time"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument("unknown config key '" + k + "'");
  }
  ExperimentConfig cfg;
  for (const auto& d : j.at("datasets")) {
    std::filesystem::path p = d.get<std::string>();
    cfg.datasets.push_back(p.is_absolute() ? p : base_dir / p);
  }
  for (const auto& c : j.at("classifiers")) {
    ClassifierConfig cc;
    cc.spec.family = parse_family(c.at("family").get<std::string>());
    cc.id = c.value("id", std::string(family_name(cc.spec.family)));
    if (c.contains("params")) {
      for (const auto& [k, v] : c.at("params").items()) cc.spec.params[k] = json_scalar(v, "parameter " + k);
    }
    cc.tuned = c.value("tuned", false);
    if (c.contains("grid")) {
      std::map<std::string, std::vector<std::string>> g;
      for (const auto& [k, vs] : c.at("grid").items()) {
        for (const auto& v : vs) g[k].push_back(json_scalar(v, "grid value for " + k));
      }
      cc.grid = std::move(g);
    }
    cfg.classifiers.push_back(std::move(cc));
  }
  cfg.resamples = j.value("resamples", cfg.resamples);
  cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
  cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("out_dir")) {
    std::filesystem::path p = j.at("out_dir").get<std::string>();
    cfg.out_dir = p.is_absolute() ? p : base_dir / p;
  } else {
    cfg.out_dir = base_dir / cfg.out_dir;
  }
  cfg.record_train_time = j.value("record_train_time", cfg.record_train_time);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

std::string format_record(const EvalRecord& r) {
  char t[32];
  std::snprintf(t, sizeof t, "%.1f", r.train_time_ms);
  return r.dataset + "," + r.classifier + "," + std::to_string(r.resample_id) + "," + fixed6(r.test_accuracy) + "," +
         fixed6(r.train_cv_accuracy) + "," + format_params(r.params) + "," + (r.train_time_ms == 0.0 ? "0" : t);
}

EvalRecord parse_record(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 7) throw std::invalid_argument("results row has " + std::to_string(f.size()) + " fields");
  EvalRecord r;
  r.dataset = f[0];
  r.classifier = f[1];
  r.resample_id = static_cast<int>(parse_number(f[2], "resample id"));
  r.test_accuracy = parse_number(f[3], "test accuracy");
  r.train_cv_accuracy = parse_number(f[4], "cv accuracy");
  r.params = parse_params(f[5]);
  r.train_time_ms = parse_number(f[6], "train time");
  if (r.dataset.empty() || r.classifier.empty()) throw std::invalid_argument("results row lacks a key");
  if (!(r.test_accuracy >= 0 && r.test_accuracy <= 1 && r.train_cv_accuracy >= 0 && r.train_cv_accuracy <= 1)) {
    throw std::invalid_argument("accuracy outside [0, 1]");
  }
  return r;
}

std::vector<EvalRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) throw std::runtime_error(path.string() + ": bad header");
  std::map<RecordKey, EvalRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto r = parse_record(line);
      out[{r.dataset, r.classifier, r.resample_id}] = r;
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<EvalRecord> v;
  for (auto& [k, r] : out) v.push_back(std::move(r));
  return v;
}

ResultStore::ResultStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  if (!std::getline(in, line)) return;
  if (line != kResultsHeader) throw std::runtime_error(path_.string() + ": unexpected header");
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  const bool ends_cleanly = [&] {
    std::ifstream raw(path_, std::ios::binary | std::ios::ate);
    const auto size = raw.tellg();
    if (size <= 0) return true;
    raw.seekg(-1, std::ios::end);
    return raw.get() == '\n';
  }();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      auto r = parse_record(lines[i]);
      records_.emplace(RecordKey{r.dataset, r.classifier, r.resample_id}, r);
    } catch (const std::exception& e) {
      if (i + 1 == lines.size() && !ends_cleanly) {
        std::cerr << "warning: dropping incomplete last row of " << path_.string() << '\n';
        continue;
      }
      throw std::runtime_error(path_.string() + ": row " + std::to_string(i + 2) + ": " + e.what());
    }
  }
  // Rewrite so later appends never follow a torn row.
  if (!ends_cleanly) canonicalize();
}

bool ResultStore::contains(const RecordKey& key) const {
  std::lock_guard lock(mutex_);
  return records_.count(key) > 0;
}

bool ResultStore::append(const EvalRecord& r) {
  const std::string line = format_record(r);
  const EvalRecord stored = parse_record(line);
  std::lock_guard lock(mutex_);
  if (!records_.emplace(RecordKey{r.dataset, r.classifier, r.resample_id}, stored).second) return false;
  if (!path_.empty()) {
    const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path_.string());
    if (fresh) out << kResultsHeader << '\n';
    out << line << '\n';
    out.flush();
  }
  return true;
}

std::vector<EvalRecord> ResultStore::records() const {
  std::lock_guard lock(mutex_);
  std::vector<EvalRecord> v;
  for (const auto& [k, r] : records_) v.push_back(r);
  return v;
}

std::size_t ResultStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

void ResultStore::canonicalize() const {
  if (path_.empty()) return;
  std::lock_guard lock(mutex_);
  const auto tmp = std::filesystem::path(path_.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << kResultsHeader << '\n';
    for (const auto& [k, r] : records_) out << format_record(r) << '\n';
  }
  std::filesystem::rename(tmp, path_);
}

AccuracyMatrix accuracy_matrix(const std::vector<EvalRecord>& records) { return matrix_of(records, false); }
AccuracyMatrix cv_accuracy_matrix(const std::vector<EvalRecord>& records) { return matrix_of(records, true); }

unsigned default_thread_count() {
  if (const char* env = std::getenv("BAKEOFF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

EvalRecord run_task(const Dataset& d, const ClassifierConfig& c, int resample_id, const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const SplitPair split = stratified_resample(d, resample_id, cfg.seed, cfg.train_fraction);
  auto [tr, te] = preprocess(split.train, split.test);
  const auto rid = static_cast<std::uint64_t>(resample_id);
  const std::uint64_t tune_seed = derive_seed(cfg.seed, d.id(), rid, "tune/" + c.id);
  ClassifierSpec chosen = c.spec;
  EvalRecord rec;
  if (c.tuned) {
    const ParamGrid grid = c.grid ? grid_from_values(c.spec.family, c.spec.resolved(), *c.grid) : default_grid(c.spec);
    const TuningResult res = grid_search(c.spec, grid, tr, cfg.cv_folds, tune_seed);
    chosen.params = res.best_params;
    rec.train_cv_accuracy = res.best_cv_accuracy;
  } else {
    rec.train_cv_accuracy = cross_val_accuracy(c.spec, tr, cfg.cv_folds, tune_seed);
  }
  const auto model = train(chosen, tr, derive_seed(cfg.seed, d.id(), rid, "model/" + c.id));
  rec.test_accuracy = accuracy(*model, te);
  rec.dataset = d.id();
  rec.classifier = c.id;
  rec.resample_id = resample_id;
  rec.params = chosen.resolved();
  if (cfg.record_train_time) {
    rec.train_time_ms = std::max(0.1, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  return rec;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<Dataset> data;
  for (const auto& p : cfg.datasets) data.push_back(load_dataset(p));

  ResultStore store(cfg.out_dir / "results.csv");
  struct Task {
    std::size_t dataset, classifier;
    int resample;
  };
  std::vector<Task> pending;
  RunSummary summary;
  for (std::size_t di = 0; di < data.size(); ++di) {
    for (std::size_t ci = 0; ci < cfg.classifiers.size(); ++ci) {
      for (int r = 0; r < cfg.resamples; ++r) {
        ++summary.tasks;
        if (store.contains({data[di].id(), cfg.classifiers[ci].id, r})) {
          ++summary.skipped;
        } else {
          pending.push_back({di, ci, r});
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> stop{false};
  std::mutex log_mutex;
  std::vector<std::string> failures;
  auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= pending.size()) return;
      const Task& t = pending[i];
      const Dataset& d = data[t.dataset];
      const ClassifierConfig& c = cfg.classifiers[t.classifier];
      try {
        const EvalRecord rec = run_task(d, c, t.resample, cfg);
        store.append(rec);
        const std::size_t n = ++done;
        if (!opts.quiet) {
          std::lock_guard lock(log_mutex);
          std::cerr << '[' << n << '/' << pending.size() << "] " << d.id() << ' ' << c.id << " resample "
                    << t.resample << " test=" << fixed6(rec.test_accuracy) << " cv=" << fixed6(rec.train_cv_accuracy)
                    << '\n';
        }
        if (opts.stop_after > 0 && n >= opts.stop_after) stop = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        std::string reason = e.what();
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        failures.push_back(d.id() + "," + c.id + "," + std::to_string(t.resample) + "," + reason);
        if (!opts.quiet) std::cerr << "failed: " << d.id() << ' ' << c.id << " resample " << t.resample << ": " << e.what() << '\n';
      }
    }
  };
  const unsigned threads = std::max(1U, opts.threads ? opts.threads : default_thread_count());
  if (threads == 1 || pending.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, pending.size()); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  summary.trained = done;
  summary.failed = failures.size();
  std::sort(failures.begin(), failures.end());
  {
    std::ofstream out(cfg.out_dir / "failures.csv", std::ios::trunc);
    out << "dataset,classifier,resample_id,reason\n";
    for (const auto& f : failures) out << f << '\n';
  }
  if (!stop) store.canonicalize();
  summary.complete = store.size() == summary.tasks;
  return summary;
}

SharpshooterSummary sharpshooter_for_pair(const std::vector<EvalRecord>& records, const std::string& a,
                                          const std::string& b, std::vector<std::string>* labels) {
  const AccuracyMatrix test = accuracy_matrix(records);
  const AccuracyMatrix cv = cv_accuracy_matrix(records);
  auto col = [&](const std::string& id) {
    auto it = std::find(test.classifiers.begin(), test.classifiers.end(), id);
    if (it == test.classifiers.end()) throw std::invalid_argument("no results for classifier " + id);
    return static_cast<std::size_t>(it - test.classifiers.begin());
  };
  const std::size_t ia = col(a);
  const std::size_t ib = col(b);
  std::vector<std::pair<double, double>> ratios;
  for (std::size_t d = 0; d < test.datasets.size(); ++d) {
    if (!(cv.cells[d][ib] > 0 && test.cells[d][ib] > 0 && cv.cells[d][ia] > 0 && test.cells[d][ia] > 0)) {
      throw std::invalid_argument("zero accuracy on " + test.datasets[d] + " makes the ratio undefined");
    }
    ratios.emplace_back(cv.cells[d][ia] / cv.cells[d][ib], test.cells[d][ia] / test.cells[d][ib]);
  }
  if (labels) *labels = test.datasets;
  return sharpshooter(ratios);
}

std::string write_report(const std::vector<EvalRecord>& records, const ReportOptions& opts) {
  if (records.empty()) throw std::invalid_argument("no results to report");
  const std::filesystem::path dir = opts.out_dir;
  std::filesystem::create_directories(dir);
  const AccuracyMatrix m = accuracy_matrix(records);
  write_accuracy_matrix(m, (dir / "matrix.csv").string());
  write_accuracy_matrix(cv_accuracy_matrix(records), (dir / "cv_matrix.csv").string());
  const std::size_t k = m.classifiers.size();

  std::ostringstream out;
  char buf[256];
  out << "datasets " << m.datasets.size() << ", classifiers " << k << ", alpha " << opts.alpha << "\n\n";
  out << "mean accuracy\n";
  for (std::size_t d = 0; d < m.datasets.size(); ++d) {
    out << "  " << m.datasets[d];
    for (std::size_t c = 0; c < k; ++c) out << "  " << m.classifiers[c] << '=' << fixed6(m.cells[d][c]);
    out << '\n';
  }

  const RankSummary ranks = mean_ranks(m);
  out << "\nmean ranks\n";
  for (std::size_t c = 0; c < k; ++c) {
    std::snprintf(buf, sizeof buf, "  %-24s %.4f\n", m.classifiers[c].c_str(), ranks.mean_ranks[c]);
    out << buf;
  }
  if (k >= 2 && m.datasets.size() >= 2) {
    const FriedmanResult f = friedman_test(m);
    std::snprintf(buf, sizeof buf, "\nFriedman chi2 = %.6f, df = %d, p = %.6g\n", f.chi2, f.df, f.p);
    out << buf;
  }

  if (k >= 2) {
    const auto tests = pairwise_wilcoxon(m, opts.alpha);
    Table pw{{"a", "b", "wilcoxon_w", "raw_p", "holm_p", "rejected", "wins", "losses", "ties"}};
    out << "\npairwise Wilcoxon across datasets (Holm)\n";
    for (const auto& t : tests) {
      const auto& ca = m.column(t.first);
      const auto& cb = m.column(t.second);
      std::size_t wins = 0, losses = 0, ties = 0;
      for (std::size_t d = 0; d < ca.size(); ++d) {
        if (ca[d] > cb[d]) ++wins; else if (ca[d] < cb[d]) ++losses; else ++ties;
      }
      std::snprintf(buf, sizeof buf, "  %s vs %s: W=%.1f p=%.6g holm=%.6g %s  (%zu/%zu/%zu)\n",
                    m.classifiers[t.first].c_str(), m.classifiers[t.second].c_str(), t.statistic, t.raw_p,
                    t.holm_adjusted_p, t.rejected ? "rejected" : "not rejected", wins, losses, ties);
      out << buf;
      pw.push_back({m.classifiers[t.first], m.classifiers[t.second], format_double(t.statistic),
                    format_double(t.raw_p), format_double(t.holm_adjusted_p), t.rejected ? "1" : "0",
                    std::to_string(wins), std::to_string(losses), std::to_string(ties)});
    }
    write_table(pw, dir / "pairwise.csv");
    const CliqueSet cliques = form_cliques(ranks, rejection_matrix(k, tests));
    emit_cd_diagram(m.classifiers, ranks, cliques, dir / "cd");
    out << "\ncliques\n";
    for (const auto& c : cliques.cliques) {
      out << " ";
      for (std::size_t i : c) out << ' ' << m.classifiers[i];
      out << '\n';
    }

    // Per-dataset paired tests over resamples.
    std::map<std::pair<std::string, std::string>, std::map<int, double>> by_key;
    for (const auto& r : records) by_key[{r.dataset, r.classifier}][r.resample_id] = r.test_accuracy;
    Table per{{"dataset", "a", "b", "mean_a", "mean_b", "t_p", "sign_p", "wilcoxon_p"}};
    for (std::size_t d = 0; d < m.datasets.size(); ++d) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          const auto& ra = by_key[{m.datasets[d], m.classifiers[i]}];
          const auto& rb = by_key[{m.datasets[d], m.classifiers[j]}];
          std::vector<double> va, vb;
          for (const auto& [rid, acc] : ra) {
            auto it = rb.find(rid);
            if (it == rb.end()) continue;
            va.push_back(acc);
            vb.push_back(it->second);
          }
          if (va.size() < 2) continue;
          per.push_back({m.datasets[d], m.classifiers[i], m.classifiers[j], fixed6(m.cells[d][i]), fixed6(m.cells[d][j]),
                         format_double(paired_t_test(va, vb).p), format_double(sign_test(va, vb).p),
                         format_double(wilcoxon_signed_rank(va, vb).p)});
        }
      }
    }
    write_table(per, dir / "per_dataset_tests.csv");

    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const std::string a = m.classifiers[i];
        const std::string b = m.classifiers[j];
        const std::string tag = file_safe(a) + "_vs_" + file_safe(b);
        emit_scatter(m.datasets, m.column(i), m.column(j), a, b, dir / ("scatter_" + tag));
        std::vector<double> diffs;
        for (std::size_t d = 0; d < m.datasets.size(); ++d) diffs.push_back(m.cells[d][i] - m.cells[d][j]);
        emit_histogram(diffs, 0.01, dir / ("hist_" + tag));
        try {
          std::vector<std::string> labels;
          const auto s = sharpshooter_for_pair(records, a, b, &labels);
          emit_sharpshooter(labels, s, dir / ("sharpshooter_" + tag));
          std::snprintf(buf, sizeof buf, "sharpshooter %s / %s: TP=%zu TN=%zu FP=%zu FN=%zu correct=%.4f\n", a.c_str(),
                        b.c_str(), s.tp, s.tn, s.fp, s.fn, s.correct_decision_rate);
          out << (i == 0 && j == 1 ? "\n" : "") << buf;
        } catch (const std::invalid_argument& e) {
          out << "sharpshooter " << a << " / " << b << " skipped: " << e.what() << '\n';
        }
      }
    }
  }

  // Parameter choices per classifier, over the keys that vary.
  std::map<std::string, std::vector<const EvalRecord*>> per_clf;
  for (const auto& r : records) per_clf[r.classifier].push_back(&r);
  for (const auto& [id, recs] : per_clf) {
    std::set<std::string> varying;
    for (const auto& [key, v] : recs.front()->params) {
      for (const auto* r : recs) {
        auto it = r->params.find(key);
        if (it == r->params.end() || it->second != v) varying.insert(key);
      }
    }
    if (varying.empty()) continue;
    std::vector<std::string> choices;
    for (const auto* r : recs) {
      if (varying.size() == 1) {
        choices.push_back(r->params.at(*varying.begin()));
      } else {
        ParamMap sub;
        for (const auto& key : varying) sub[key] = r->params.count(key) ? r->params.at(key) : "";
        choices.push_back(format_params(sub));
      }
    }
    emit_param_frequency(choices, dir / ("params_" + file_safe(id)));
  }

  const std::string text = out.str();
  std::ofstream(dir / "report.txt") << text;
  return text;
}

}  // namespace bakeoff
