#include "psdrl/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace psdrl {

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw NonSpdError("cholesky: matrix not square");
  a.require_finite("cholesky");
  std::size_t n = a.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) scale = std::max(scale, std::abs(a.data()[i]));
  double sym_tol = 1e-10 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > sym_tol)
        throw NonSpdError("cholesky: matrix not symmetric");

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NonSpdError("cholesky: non-positive pivot");
    double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vec solve_lower(const Matrix& l, std::span<const double> b) {
  std::size_t n = l.rows();
  if (b.size() != n) throw std::invalid_argument("solve_lower: dimension mismatch");
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

Vec solve_lower_transposed(const Matrix& l, std::span<const double> b) {
  std::size_t n = l.rows();
  if (b.size() != n) throw std::invalid_argument("solve_lower_transposed: dimension mismatch");
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Vec solve_chol(const Matrix& l, std::span<const double> b) {
  Vec y = solve_lower(l, b);
  return solve_lower_transposed(l, y);
}

Matrix chol_inverse(const Matrix& l) {
  std::size_t n = l.rows();
  Matrix inv(n, n);
  Vec e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vec col = solve_chol(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  // Symmetrize to kill solve round-off before any downstream factorization.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

Vec mvn_sample(std::span<const double> mean, const Matrix& cov_chol, RandomStream& rng) {
  std::size_t n = cov_chol.rows();
  if (cov_chol.cols() != n || mean.size() != n)
    throw std::invalid_argument("mvn_sample: dimension mismatch");
  Vec eps(n);
  for (std::size_t i = 0; i < n; ++i) eps[i] = rng.normal();
  Vec x(mean.begin(), mean.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += cov_chol(i, j) * eps[j];
    x[i] += s;
  }
  return x;
}

}  // namespace psdrl
