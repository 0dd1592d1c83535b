#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bakeoff/svm.hpp"
#include "support.hpp"
#include "svm_oracle.hpp"

using namespace bakeoff;

namespace {

struct Problem {
  Matrix x;
  std::vector<int> y;
};

Problem random_problem(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Problem p{Matrix(n, d), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) p.x(i, j) = u(gen);
    p.y[i] = i % 2 == 0 ? 1 : -1;
  }
  return p;
}

}  // namespace

TEST_CASE("kernels") {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{3, -1};
  CHECK(kernel_eval(KernelSpec::linear(), a, b) == 1.0);
  CHECK(kernel_eval(KernelSpec::polynomial(2), a, b) == 1.0);
  CHECK(kernel_eval(KernelSpec::polynomial(3), a, a) == 125.0);
  CHECK(kernel_eval(KernelSpec::rbf(0.5), a, b) == doctest::Approx(std::exp(-0.5 * 13)));
  CHECK_THROWS(KernelSpec::rbf(0).validate());
  CHECK_THROWS(KernelSpec::polynomial(0).validate());
  SmoParams p;
  p.c = -1;
  CHECK_THROWS(p.validate());
}

TEST_CASE("separable problem: margin classifier with valid duals") {
  const Matrix x(4, 1, {0.0, 0.2, 0.8, 1.0});
  const std::vector<int> y{-1, -1, 1, 1};
  SmoParams p;
  p.c = 100;
  const auto s = smo_train_binary(x, y, KernelSpec::linear(), p, 1);
  // Hard margin: support vectors at 0.2 and 0.8, w = 1 / 0.3, b = -0.5 / 0.3.
  CHECK(s.model.decision(std::vector<double>{0.5}) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(s.model.decision(std::vector<double>{0.8}) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s.model.decision(std::vector<double>{0.2}) == doctest::Approx(-1.0).epsilon(1e-3));
  double balance = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.alphas[i] >= 0);
    CHECK(s.alphas[i] <= p.c);
    balance += s.alphas[i] * y[i];
  }
  CHECK(std::fabs(balance) <= 1e-8 * p.c);
  CHECK(s.alphas[0] == doctest::Approx(0.0));
  CHECK(s.max_kkt_violation <= p.kkt_tolerance);
}

TEST_CASE("SMO matches the coordinate ascent oracle") {
  std::mt19937_64 gen(2024);
  const KernelSpec kernels[] = {KernelSpec::linear(), KernelSpec::polynomial(2), KernelSpec::rbf(1.0)};
  int case_id = 0;
  for (double c : {0.1, 1.0, 100.0}) {
    for (const auto& k : kernels) {
      const std::size_t n = 4 + gen() % 9;
      const std::size_t d = 1 + gen() % 3;
      const Problem pr = random_problem(gen, n, d);
      SmoParams sp;
      sp.c = c;
      const auto s = smo_train_binary(pr.x, pr.y, k, sp, static_cast<std::uint64_t>(case_id++));
      const auto o = testing_support::coordinate_ascent_dual(pr.x, pr.y, k, c);
      REQUIRE(o.gap <= 1e-10);
      const double ours = dual_objective(pr.x, pr.y, k, s.alphas);
      const double ref = dual_objective(pr.x, pr.y, k, o.alphas);
      CHECK(std::fabs(ours - ref) <= 1e-4);
      CHECK(max_kkt_violation(pr.x, pr.y, k, s.alphas, s.bias, c) <= 1e-3);
    }
  }
}

TEST_CASE("SMO is deterministic in its seed") {
  std::mt19937_64 gen(5);
  const Problem pr = random_problem(gen, 30, 3);
  const auto a = smo_train_binary(pr.x, pr.y, KernelSpec::rbf(2.0), {}, 9);
  const auto b = smo_train_binary(pr.x, pr.y, KernelSpec::rbf(2.0), {}, 9);
  CHECK(a.alphas == b.alphas);
  CHECK(a.bias == b.bias);
}

TEST_CASE("step limit raises a convergence error") {
  std::mt19937_64 gen(8);
  const Problem pr = random_problem(gen, 40, 2);
  SmoParams p;
  p.c = 100;
  p.max_pair_steps = 2;
  CHECK_THROWS_AS(smo_train_binary(pr.x, pr.y, KernelSpec::rbf(10.0), p, 1), ConvergenceError);
}

TEST_CASE("a tiny kernel cache gives the same solution") {
  std::mt19937_64 gen(12);
  const Problem pr = random_problem(gen, 60, 3);
  SmoParams big;
  SmoParams small;
  small.cache_bytes = 1;
  const auto a = smo_train_binary(pr.x, pr.y, KernelSpec::rbf(3.0), big, 4);
  const auto b = smo_train_binary(pr.x, pr.y, KernelSpec::rbf(3.0), small, 4);
  CHECK(a.alphas == b.alphas);
}

TEST_CASE("one-vs-one over three classes") {
  const auto d = testing_support::blobs(90, 2, 3, 4.0, 3);
  const auto m = pairwise_train(d, KernelSpec::linear(), {}, 1);
  CHECK(m.pairs().size() == 3);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    const auto v = m.votes(d.row(i));
    CHECK(std::accumulate(v.begin(), v.end(), 0) == 3);
    if (m.predict(d.row(i)) == d.label(i)) ++correct;
  }
  CHECK(correct >= 85);
  const auto d4 = testing_support::blobs(40, 2, 4, 3.0, 3);
  CHECK(pairwise_train(d4, KernelSpec::rbf(1.0), {}, 1).pairs().size() == 6);
}

TEST_CASE("absent class in a pair votes for the present one") {
  const auto d = testing_support::numeric_dataset({{0.0}, {0.1}, {1.0}, {1.1}}, {0, 0, 2, 2}, 3);
  const auto m = pairwise_train(d, KernelSpec::linear(), {}, 1);
  // Pairs (0,1) and (1,2) are constant; (0,2) decides. No vote ever reaches class 1.
  const auto v = m.votes(std::vector<double>{0.05});
  CHECK(v[1] == 0);
  CHECK(m.predict(std::vector<double>{0.05}) == 0);
  CHECK(m.predict(std::vector<double>{1.05}) == 2);
}

TEST_CASE("bias satisfies KKT when every support vector is at the bound") {
  // Small C on overlapping points leaves no free multipliers.
  Matrix x(3, 1, std::vector<double>{-0.5, 0.01, -0.1});
  const std::vector<int> y{1, -1, -1};
  SmoParams p;
  p.c = 0.1;
  const auto s = smo_train_binary(x, y, KernelSpec::linear(), p, 0);
  CHECK(s.alphas[0] == doctest::Approx(0.1));
  CHECK(s.max_kkt_violation <= p.kkt_tolerance);

  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 200; ++rep) {
    const Problem pr = random_problem(gen, 2 + gen() % 10, 1 + gen() % 3);
    for (double c : {0.01, 0.1}) {
      p.c = c;
      const auto r = smo_train_binary(pr.x, pr.y, KernelSpec::rbf(0.5), p, static_cast<std::uint64_t>(rep));
      CHECK(max_kkt_violation(pr.x, pr.y, KernelSpec::rbf(0.5), r.alphas, r.bias, c) <= p.kkt_tolerance);
    }
  }
}
