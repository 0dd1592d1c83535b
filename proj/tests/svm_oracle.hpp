#pragma once

// Reference dual solver: cyclic exact updates over every index pair,
// projected onto the box, until the maximal violating pair gap is tiny.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "bakeoff/linalg.hpp"
#include "bakeoff/svm.hpp"

namespace testing_support {

struct OracleResult {
  std::vector<double> alphas;
  double gap = 0.0;
  int sweeps = 0;
};

inline OracleResult coordinate_ascent_dual(const bakeoff::Matrix& x, std::span<const int> y,
                                           const bakeoff::KernelSpec& kernel, double c, double tol = 1e-10,
                                           int max_sweeps = 200000) {
  const std::size_t n = x.rows();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] = bakeoff::kernel_eval(kernel, x.row(i), x.row(j));
  }
  OracleResult res;
  res.alphas.assign(n, 0.0);
  auto& a = res.alphas;
  // g = Q a - 1 for the minimisation form.
  std::vector<double> g(n, -1.0);
  auto gap = [&] {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = -y[i] * g[i];
      const bool in_up = (y[i] > 0 && a[i] < c) || (y[i] < 0 && a[i] > 0);
      const bool in_low = (y[i] < 0 && a[i] < c) || (y[i] > 0 && a[i] > 0);
      if (in_up) up = std::max(up, v);
      if (in_low) low = std::min(low, v);
    }
    return up - low;
  };
  for (res.sweeps = 0; res.sweeps < max_sweeps; ++res.sweeps) {
    res.gap = gap();
    if (res.gap <= tol) break;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Move a_i by y_i t and a_j by -y_j t, which keeps sum(a y) fixed.
        const double slope = y[i] * g[i] - y[j] * g[j];
        const double curv = k[i * n + i] + k[j * n + j] - 2 * k[i * n + j];
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        auto limit = [&](double ai, double dir) {
          // 0 <= ai + dir t <= c
          if (dir > 0) {
            lo = std::max(lo, -ai / dir);
            hi = std::min(hi, (c - ai) / dir);
          } else {
            lo = std::max(lo, (c - ai) / dir);
            hi = std::min(hi, -ai / dir);
          }
        };
        limit(a[i], y[i]);
        limit(a[j], -y[j]);
        double t;
        if (curv > 1e-15) {
          t = std::clamp(-slope / curv, lo, hi);
        } else {
          t = slope > 0 ? lo : (slope < 0 ? hi : 0.0);
        }
        if (t == 0.0) continue;
        const double di = y[i] * t;
        const double dj = -y[j] * t;
        a[i] = std::clamp(a[i] + di, 0.0, c);
        a[j] = std::clamp(a[j] + dj, 0.0, c);
        for (std::size_t r = 0; r < n; ++r) {
          g[r] += y[r] * (y[i] * di * k[r * n + i] + y[j] * dj * k[r * n + j]);
        }
      }
    }
  }
  return res;
}

}  // namespace testing_support
