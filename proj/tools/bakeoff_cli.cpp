#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bakeoff/experiment.hpp"
#include "bakeoff/plots.hpp"
#include "bakeoff/stats.hpp"

namespace fs = std::filesystem;
using namespace bakeoff;

int main(int argc, char** argv) {
  CLI::App app{"Classifier bakeoff: resampled benchmarks, tuning and rank statistics"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: BAKEOFF_THREADS or all cores)");

  auto* run = app.add_subcommand("run", "Run or resume an experiment");
  std::string run_cfg;
  bool quiet = false;
  run->add_option("config", run_cfg, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_flag("-q,--quiet", quiet, "No per-task progress");

  auto* report = app.add_subcommand("report", "Statistics and figures for a results file");
  std::string report_csv;
  double alpha = 0.05;
  std::string report_out;
  report->add_option("results", report_csv, "results.csv")->required()->check(CLI::ExistingFile);
  report->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  report->add_option("--out", report_out, "Output directory (default: <results dir>/report)");

  auto* cd = app.add_subcommand("cd", "Critical difference diagram for an accuracy matrix");
  std::string matrix_csv;
  std::string cd_out;
  cd->add_option("matrix", matrix_csv, "CSV with header dataset,<classifiers...>")->required()->check(CLI::ExistingFile);
  cd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  cd->add_option("--out", cd_out, "Output stem (default: <matrix dir>/cd)");

  auto* sharp = app.add_subcommand("sharpshooter", "Train/test accuracy ratio analysis for one pair");
  std::string sharp_csv;
  std::string pair;
  std::string sharp_out;
  sharp->add_option("results", sharp_csv, "results.csv")->required()->check(CLI::ExistingFile);
  sharp->add_option("--pair", pair, "A,B: ratios are A over B")->required();
  sharp->add_option("--out", sharp_out, "Output stem (default: <results dir>/sharpshooter_A_vs_B)");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  std::string validate_cfg;
  validate->add_option("config", validate_cfg, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig cfg = load_config(run_cfg);
      RunOptions opts;
      opts.threads = threads;
      opts.quiet = quiet;
      const RunSummary s = run_experiment(cfg, opts);
      std::cout << "tasks " << s.tasks << ", skipped " << s.skipped << ", trained " << s.trained << ", failed "
                << s.failed << '\n'
                << "results: " << (cfg.out_dir / "results.csv").string() << '\n';
      return s.complete ? 0 : 1;
    }
    if (*report) {
      const fs::path out = report_out.empty() ? fs::path(report_csv).parent_path() / "report" : fs::path(report_out);
      std::cout << write_report(read_results(report_csv), {alpha, out});
      std::cout << "figures: " << out.string() << '\n';
      return 0;
    }
    if (*cd) {
      const AccuracyMatrix m = read_accuracy_matrix(matrix_csv);
      const RankSummary ranks = mean_ranks(m);
      const auto tests = pairwise_wilcoxon(m, alpha);
      const CliqueSet cliques = form_cliques(ranks, rejection_matrix(m.classifiers.size(), tests));
      const fs::path stem = cd_out.empty() ? fs::path(matrix_csv).parent_path() / "cd" : fs::path(cd_out);
      emit_cd_diagram(m.classifiers, ranks, cliques, stem);
      if (m.datasets.size() >= 2) {
        const FriedmanResult f = friedman_test(m);
        std::printf("Friedman chi2 = %.6f, df = %d, p = %.6g\n", f.chi2, f.df, f.p);
      }
      std::cout << render_cd_text(read_table(stem.string() + ".csv"));
      return 0;
    }
    if (*sharp) {
      const auto comma = pair.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--pair expects A,B");
      const std::string a = pair.substr(0, comma);
      const std::string b = pair.substr(comma + 1);
      std::vector<std::string> labels;
      const auto s = sharpshooter_for_pair(read_results(sharp_csv), a, b, &labels);
      const fs::path stem = sharp_out.empty() ? fs::path(sharp_csv).parent_path() / ("sharpshooter_" + a + "_vs_" + b)
                                              : fs::path(sharp_out);
      emit_sharpshooter(labels, s, stem);
      std::printf("TP %zu  TN %zu  FP %zu  FN %zu  correct decision rate %.4f\n", s.tp, s.tn, s.fp, s.fn,
                  s.correct_decision_rate);
      std::cout << "written: " << stem.string() << ".svg\n";
      return 0;
    }
    if (*validate) {
      const ExperimentConfig cfg = load_config(validate_cfg);
      cfg.validate();
      std::cout << "ok: " << cfg.datasets.size() << " datasets, " << cfg.classifiers.size() << " classifiers, "
                << cfg.resamples << " resamples\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
