#include "bakeoff/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bakeoff {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix covariance(const Matrix& rows) {
  const std::size_t n = rows.rows();
  const std::size_t f = rows.cols();
  if (n < 2) throw std::invalid_argument("covariance needs at least two rows");
  std::vector<double> mean(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) mean[j] += rows(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix cov(f, f);
  std::vector<double> centered(f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) centered[j] = rows(i, j) - mean[j];
    for (std::size_t a = 0; a < f; ++a) {
      for (std::size_t b = a; b < f; ++b) cov(a, b) += centered[a] * centered[b];
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < f; ++a) {
    for (std::size_t b = a; b < f; ++b) {
      cov(a, b) /= denom;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

EigenDecomposition symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw std::invalid_argument("eigen decomposition needs a square matrix");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > 1e-10) {
        throw std::invalid_argument("matrix is not symmetric");
      }
    }
  }
  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  }
  Matrix v = Matrix::identity(n);

  double scale = 0.0;
  for (double x : a.data()) scale = std::max(scale, std::abs(x));

  for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-30 * scale * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values[c] = a(src, src);
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(v(k, src)) > std::abs(v(big, src))) big = k;
    }
    const double sign = v(big, src) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = sign * v(k, src);
  }
  return out;
}

void PcaModel::transform_into(std::span<const double> x, std::span<double> out) const {
  const std::size_t f = dimension();
  for (std::size_t c = 0; c < f; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < f; ++j) s += components(j, c) * (x[j] - means[j]);
    out[c] = s;
  }
}

PcaModel PcaModel::identity(std::size_t f) {
  return PcaModel{std::vector<double>(f, 0.0), Matrix::identity(f), std::vector<double>(f, 0.0)};
}

PcaModel pca_fit(const Matrix& rows) {
  if (rows.rows() < 2) throw DegeneratePcaError("PCA needs at least two rows");
  if (rows.cols() < 1) throw DegeneratePcaError("PCA needs at least one column");
  const std::size_t n = rows.rows();
  const std::size_t f = rows.cols();
  PcaModel model;
  model.means.assign(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) model.means[j] += rows(i, j);
  }
  for (double& m : model.means) m /= static_cast<double>(n);
  auto eig = symmetric_eigen(covariance(rows));
  // Covariance is positive semidefinite; clamp rounding noise below zero.
  for (double& ev : eig.values) ev = std::max(ev, 0.0);
  model.components = std::move(eig.vectors);
  model.eigenvalues = std::move(eig.values);
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& rows) {
  if (rows.cols() != model.dimension()) throw std::invalid_argument("PCA transform arity mismatch");
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) model.transform_into(rows.row(i), out.row(i));
  return out;
}

bool solve_spd(const Matrix& a, std::span<const double> b, std::span<double> x) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return true;
}

}  // namespace bakeoff
