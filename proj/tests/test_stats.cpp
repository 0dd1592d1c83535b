#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bakeoff/stats.hpp"

using namespace bakeoff;

namespace {

AccuracyMatrix matrix(std::vector<std::vector<double>> cells) {
  AccuracyMatrix m;
  for (std::size_t i = 0; i < cells.size(); ++i) m.datasets.push_back("d" + std::to_string(i));
  for (std::size_t j = 0; j < cells.front().size(); ++j) m.classifiers.push_back(std::string(1, static_cast<char>('A' + j)));
  m.cells = std::move(cells);
  return m;
}

// Brute-force signed-rank p: fraction of all 2^n sign flips whose min(W+, W-) is at most observed.
double brute_wilcoxon_p(const std::vector<double>& diffs, double* w_out = nullptr) {
  std::vector<double> d;
  for (double v : diffs) if (v != 0.0) d.push_back(v);
  const std::size_t n = d.size();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::fabs(d[i]);
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, same = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += mag[j] < mag[i];
      same += mag[j] == mag[i];
    }
    rank[i] = less + (same + 1) / 2;
  }
  const double total = n * (n + 1) / 2.0;
  double wp = 0;
  for (std::size_t i = 0; i < n; ++i) if (d[i] > 0) wp += rank[i];
  const double w = std::min(wp, total - wp);
  if (w_out) *w_out = w;
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) if (mask >> i & 1) s += rank[i];
    hits += std::min(s, total - s) <= w + 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(std::size_t{1} << n);
}

double binom_two_sided(int wins, int losses) {
  const int n = wins + losses;
  const int low = std::min(wins, losses);
  double tail = 0;
  for (int i = 0; i <= low; ++i) tail += std::tgamma(n + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(n - i + 1.0));
  return std::min(1.0, 2 * tail / std::pow(2.0, n));
}

}  // namespace

TEST_CASE("mean ranks") {
  CHECK(mean_ranks(matrix({{0.9, 0.8}, {0.7, 0.6}})).mean_ranks == std::vector<double>{1.0, 2.0});
  CHECK(average_ranks({0.5, 0.5}) == std::vector<double>{1.5, 1.5});
  const auto r = mean_ranks(matrix({{0.9, 0.8}, {0.7, 0.6}, {0.5, 0.5}}));
  CHECK(r.mean_ranks[0] == doctest::Approx((1 + 1 + 1.5) / 3.0));
  CHECK(r.mean_ranks[1] == doctest::Approx((2 + 2 + 1.5) / 3.0));
  CHECK(mean_ranks(matrix({{.3, .2, .1}, {.3, .2, .1}, {.6, .5, .4}, {.9, .8, .7}})).mean_ranks ==
        std::vector<double>{1, 2, 3});
  CHECK(average_ranks({0.1, 0.9, 0.5, 0.9}) == std::vector<double>{4, 1.5, 3, 1.5});
  auto bad = matrix({{0.9, 0.8}, {0.7, 0.6}});
  bad.cells[1].pop_back();
  CHECK_THROWS(mean_ranks(bad));
}

TEST_CASE("friedman") {
  const auto f = friedman_test(matrix({{.9, .8, .7}, {.9, .8, .7}, {.6, .5, .4}, {.3, .2, .1}}));
  CHECK(f.df == 2);
  CHECK(std::fabs(f.chi2 - 8.0) <= 1e-9);
  CHECK(std::fabs(f.p - std::exp(-4.0)) <= 1e-6);
  const auto z = friedman_test(matrix({{.5, .5, .5}, {.6, .6, .6}}));
  CHECK(z.chi2 == 0.0);
  CHECK(z.p == doctest::Approx(1.0));
  CHECK_THROWS(friedman_test(matrix({{.5, .6}})));
  CHECK_THROWS(friedman_test(matrix({{.5}, {.6}})));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<double>> cells(6, std::vector<double>(4));
    for (auto& row : cells) for (auto& v : row) v = std::round(u(gen) * 20) / 20;
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), gen);
    auto permuted = cells;
    for (std::size_t i = 0; i < cells.size(); ++i)
      for (std::size_t j = 0; j < 4; ++j) permuted[i][j] = cells[i][perm[j]];
    const auto a = friedman_test(matrix(cells));
    const auto b = friedman_test(matrix(permuted));
    CHECK(a.chi2 == doctest::Approx(b.chi2).epsilon(1e-12));
    const auto ra = mean_ranks(matrix(cells)).mean_ranks;
    const auto rb = mean_ranks(matrix(permuted)).mean_ranks;
    for (std::size_t j = 0; j < 4; ++j) CHECK(rb[j] == doctest::Approx(ra[perm[j]]));
    double sum = std::accumulate(ra.begin(), ra.end(), 0.0);
    CHECK(sum == doctest::Approx(10.0));
    // Closed form from the mean ranks.
    double dev = 0;
    for (double r : ra) dev += (r - 2.5) * (r - 2.5);
    CHECK(a.chi2 == doctest::Approx(12.0 * 6 / (4 * 5) * dev));
  }
}

TEST_CASE("wilcoxon worked values") {
  const auto w = wilcoxon_signed_rank({1, 2, 3, 4, 5}, {0, 0, 0, 0, 0});
  CHECK(w.w == 0.0);
  CHECK(w.w_minus == 0.0);
  CHECK(w.w_plus == 15.0);
  CHECK(w.p == 0.0625);
  CHECK(w.exact);
  const auto same = wilcoxon_signed_rank({.5, .6, .7}, {.5, .6, .7});
  CHECK(same.no_information);
  CHECK(same.p == 1.0);
  CHECK(same.w == 0.0);
  CHECK_THROWS(wilcoxon_signed_rank({1, 2}, {1}));
}

TEST_CASE("wilcoxon matches brute-force enumeration") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> len(1, 14);
  std::uniform_int_distribution<int> val(-6, 6);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = len(gen);
    std::vector<double> a(n), b(n, 0.0), diffs(n);
    for (int i = 0; i < n; ++i) diffs[i] = a[i] = val(gen) / 10.0;
    double w = 0;
    const bool any = std::any_of(diffs.begin(), diffs.end(), [](double v) { return v != 0.0; });
    const auto r = wilcoxon_signed_rank(a, b);
    if (!any) {
      CHECK(r.no_information);
      continue;
    }
    const double p = brute_wilcoxon_p(diffs, &w);
    CHECK(r.w == doctest::Approx(w));
    CHECK(r.p == doctest::Approx(p).epsilon(1e-12));
    const auto s = wilcoxon_signed_rank(b, a);
    CHECK(s.p == r.p);
    CHECK(s.w_plus == r.w_minus);
    CHECK(s.w_minus == r.w_plus);
  }
}

TEST_CASE("wilcoxon exact and normal approximation agree for moderate n") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> len(8, 25);
  std::normal_distribution<double> noise(0, 1);
  std::uniform_real_distribution<double> shift(-1, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = len(gen);
    const double mu = shift(gen);
    std::vector<double> a(n), b(n, 0.0);
    for (auto& v : a) v = mu + noise(gen);
    const auto e = wilcoxon_signed_rank(a, b);
    const auto z = wilcoxon_normal_approx(a, b);
    REQUIRE(e.exact);
    CHECK_FALSE(z.exact);
    CAPTURE(n);
    CHECK(std::fabs(e.p - z.p) <= 0.02);
  }
  std::vector<double> big(30), zero(30, 0.0);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i) - 10.5;
  CHECK_FALSE(wilcoxon_signed_rank(big, zero).exact);
}

TEST_CASE("sign test") {
  std::vector<double> a(10, 1.0), b(10, 0.0);
  b[3] = 2.0;
  const auto s = sign_test(a, b);
  CHECK(s.wins == 9);
  CHECK(s.losses == 1);
  CHECK(s.p == 22.0 / 1024.0);
  for (int w = 0; w <= 20; ++w) {
    for (int l = 0; l <= 20; ++l) {
      if (w + l == 0) continue;
      std::vector<double> x, y;
      for (int i = 0; i < w; ++i) { x.push_back(1); y.push_back(0); }
      for (int i = 0; i < l; ++i) { x.push_back(0); y.push_back(1); }
      x.push_back(0.5);
      y.push_back(0.5);
      const auto r = sign_test(x, y);
      CHECK(r.ties == 1);
      CHECK(r.p == doctest::Approx(binom_two_sided(w, l)).epsilon(1e-12));
    }
  }
  CHECK(sign_test({0.5}, {0.5}).p == 1.0);
}

TEST_CASE("paired t") {
  const auto same = paired_t_test({.5, .6, .7}, {.5, .6, .7});
  CHECK(same.degenerate);
  CHECK(same.p == 1.0);
  const auto shifted = paired_t_test({.51, .61, .71, .81}, {.50, .60, .70, .80});
  CHECK(shifted.degenerate);
  CHECK(shifted.p == 0.0);
  CHECK_THROWS(paired_t_test({.5}, {.4}));

  // Known value: d = (1, 2, 3, 4) gives mean 2.5, sd sqrt(5/3), t = 2.5 / (sd / 2).
  const auto t = paired_t_test({1, 2, 3, 4}, {0, 0, 0, 0});
  CHECK(t.df == 3);
  CHECK(t.t == doctest::Approx(2.5 / (std::sqrt(5.0 / 3.0) / 2.0)));
  CHECK(t.p == doctest::Approx(0.0302).epsilon(0.002));

  std::mt19937_64 gen(17);
  std::normal_distribution<double> noise(0, 0.05);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(12), b(12);
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i] = 0.5 + noise(gen);
      a[i] = b[i] + noise(gen);
    }
    const auto x = paired_t_test(a, b);
    const auto y = paired_t_test(b, a);
    CHECK(x.t == doctest::Approx(-y.t));
    CHECK(x.p == doctest::Approx(y.p));
    std::vector<double> a2 = a, b2 = b;
    for (std::size_t i = 0; i < a.size(); ++i) { a2[i] += 0.25; b2[i] += 0.25; }
    CHECK(paired_t_test(a2, b2).t == doctest::Approx(x.t).epsilon(1e-8));
  }
}

TEST_CASE("holm") {
  auto h = holm_adjust({0.01, 0.02, 0.04}, 0.05);
  CHECK(h.rejected == std::vector<bool>{true, true, true});
  CHECK(h.adjusted_p[0] == doctest::Approx(0.03));
  CHECK(h.adjusted_p[1] == doctest::Approx(0.04));
  CHECK(h.adjusted_p[2] == doctest::Approx(0.04));
  h = holm_adjust({0.02, 0.03, 0.04}, 0.05);
  CHECK(h.rejected == std::vector<bool>{false, false, false});
  CHECK(h.adjusted_p[0] == doctest::Approx(0.06));
  h = holm_adjust({0.03}, 0.05);
  CHECK(h.adjusted_p[0] == doctest::Approx(0.03));
  CHECK(h.rejected[0]);
  h = holm_adjust({0.04, 0.01, 0.02}, 0.05);
  CHECK(h.rejected == std::vector<bool>{true, true, true});
  CHECK(h.adjusted_p[1] == doctest::Approx(0.03));
  CHECK_THROWS(holm_adjust({0.1}, 0.0));
  CHECK_THROWS(holm_adjust({0.1}, 1.0));

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0, 0.06);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> p(1 + rep % 8);
    for (auto& v : p) v = u(gen);
    const auto r = holm_adjust(p, 0.05);
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    // Step-down oracle.
    const std::size_t m = p.size();
    bool going = true;
    double running = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = idx[i];
      going = going && p[j] <= 0.05 / static_cast<double>(m - i);
      running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[j]));
      CHECK(r.rejected[j] == going);
      CHECK(r.adjusted_p[j] == doctest::Approx(running));
      CHECK(r.adjusted_p[j] >= p[j]);
      CHECK(r.rejected[j] == (r.adjusted_p[j] <= 0.05 + 1e-15));
    }
    for (std::size_t i = 1; i < m; ++i) CHECK(r.adjusted_p[idx[i]] >= r.adjusted_p[idx[i - 1]]);
  }
}

TEST_CASE("cliques") {
  const RankSummary ranks{{1.0, 2.0, 3.0, 4.0}};
  std::vector<std::vector<bool>> none(4, std::vector<bool>(4, false));
  auto c = form_cliques(ranks, none);
  REQUIRE(c.cliques.size() == 1);
  CHECK(c.cliques[0] == std::vector<std::size_t>{0, 1, 2, 3});

  std::vector<std::vector<bool>> all(4, std::vector<bool>(4, true));
  c = form_cliques(ranks, all);
  CHECK(c.cliques.size() == 4);
  for (const auto& q : c.cliques) CHECK(q.size() == 1);

  auto some = none;
  some[0][3] = some[3][0] = some[0][2] = some[2][0] = true;
  c = form_cliques(ranks, some);
  REQUIRE(c.cliques.size() == 2);
  CHECK(c.cliques[0] == std::vector<std::size_t>{0, 1});
  CHECK(c.cliques[1] == std::vector<std::size_t>{1, 2, 3});

  // Order of classifiers follows mean rank, not index.
  c = form_cliques(RankSummary{{4.0, 3.0, 2.0, 1.0}}, none);
  CHECK(c.order == std::vector<std::size_t>{3, 2, 1, 0});

  std::mt19937_64 gen(29);
  std::bernoulli_distribution coin(0.3);
  std::uniform_real_distribution<double> u(1, 6);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t k = 2 + rep % 6;
    RankSummary r;
    for (std::size_t i = 0; i < k; ++i) r.mean_ranks.push_back(u(gen));
    std::vector<std::vector<bool>> rej(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) rej[i][j] = rej[j][i] = coin(gen);
    const auto cs = form_cliques(r, rej);
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[cs.order[i]] = i;
    for (std::size_t i = 1; i < k; ++i) CHECK(r.mean_ranks[cs.order[i - 1]] <= r.mean_ranks[cs.order[i]]);
    std::vector<bool> covered(k, false);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& q : cs.cliques) {
      for (std::size_t x : q) {
        covered[x] = true;
        for (std::size_t y : q) CHECK_FALSE(rej[x][y]);
      }
      const std::size_t lo = pos[q.front()], hi = pos[q.back()];
      CHECK(hi - lo + 1 == q.size());
      spans.emplace_back(lo, hi);
      // Extending either end breaks it.
      auto clash = [&](std::size_t add) {
        for (std::size_t x : q) if (rej[x][cs.order[add]]) return true;
        return false;
      };
      if (lo > 0) CHECK(clash(lo - 1));
      if (hi + 1 < k) CHECK(clash(hi + 1));
    }
    for (bool b : covered) CHECK(b);
    for (std::size_t i = 0; i < spans.size(); ++i)
      for (std::size_t j = 0; j < spans.size(); ++j)
        if (i != j) CHECK_FALSE((spans[i].first >= spans[j].first && spans[i].second <= spans[j].second));
  }
}

TEST_CASE("pairwise wilcoxon with holm") {
  std::vector<std::vector<double>> cells;
  for (int i = 0; i < 12; ++i) cells.push_back({0.9 - i * 0.01, 0.8 - i * 0.01, 0.8 - i * 0.01 + (i % 2 ? 0.003 : -0.003)});
  const auto m = matrix(cells);
  const auto tests = pairwise_wilcoxon(m, 0.05);
  REQUIRE(tests.size() == 3);
  std::vector<double> raw;
  for (const auto& t : tests) raw.push_back(t.raw_p);
  const auto h = holm_adjust(raw, 0.05);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(tests[i].holm_adjusted_p == h.adjusted_p[i]);
    CHECK(tests[i].rejected == h.rejected[i]);
    CHECK(tests[i].raw_p == wilcoxon_signed_rank(m.column(tests[i].first), m.column(tests[i].second)).p);
  }
  CHECK(tests[0].rejected);
  CHECK_FALSE(tests[2].rejected);
  const auto rej = rejection_matrix(3, tests);
  CHECK(rej[0][1]);
  CHECK(rej[1][0]);
  CHECK_FALSE(rej[1][2]);
  CHECK_FALSE(rej[0][0]);
}

TEST_CASE("sharpshooter") {
  CHECK(classify_ratio(1.1, 1.2) == Quadrant::tp);
  CHECK(classify_ratio(0.9, 0.8) == Quadrant::tn);
  CHECK(classify_ratio(1.1, 0.9) == Quadrant::fp);
  CHECK(classify_ratio(0.9, 1.1) == Quadrant::fn);
  CHECK(classify_ratio(1.0, 1.0) == Quadrant::tn);
  CHECK(classify_ratio(1.0, 1.1) == Quadrant::fn);
  CHECK(classify_ratio(1.1, 1.0) == Quadrant::fp);
  const auto s = sharpshooter({{1.1, 1.2}, {0.9, 0.8}, {1.1, 0.9}, {0.9, 1.1}});
  CHECK(s.tp == 1);
  CHECK(s.tn == 1);
  CHECK(s.fp == 1);
  CHECK(s.fn == 1);
  CHECK(s.correct_decision_rate == 0.5);
  CHECK(s.points.size() == 4);
  CHECK(std::string(quadrant_name(Quadrant::fp)) == "FP");
}
