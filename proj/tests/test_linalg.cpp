#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "psdrl/linalg.hpp"

using namespace psdrl;

namespace {

Matrix random_spd(std::size_t n, RandomStream& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.normal();
  Matrix a = matmul(transpose(m), m);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  return a;
}

}  // namespace

TEST_CASE("cholesky of a hand 2x2") {
  Matrix a(2, 2, {4.0, 2.0, 2.0, 3.0});
  Matrix l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(0, 1) == 0.0);
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cholesky recomposes random SPD matrices") {
  RandomStream rng(11, 0);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 1 + rng.below(8);
    Matrix a = random_spd(n, rng);
    Matrix l = cholesky(a);
    Matrix back = matmul(l, transpose(l));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(back(i, j) == doctest::Approx(a(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
  CHECK_THROWS_AS(cholesky(Matrix(2, 2, {1.0, 2.0, 2.0, 1.0})), NonSpdError);
  CHECK_THROWS_AS(cholesky(Matrix(2, 2, {1.0, 0.5, 0.1, 1.0})), NonSpdError);
}

TEST_CASE("solve_chol solves against the original matrix") {
  RandomStream rng(12, 0);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 1 + rng.below(8);
    Matrix a = random_spd(n, rng);
    Vec b(n);
    for (double& v : b) v = rng.normal();
    Vec x = solve_chol(cholesky(a), b);
    Vec ax = matvec(a, x);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-9));
  }
}

TEST_CASE("triangular solves invert L and L^T") {
  Matrix a(3, 3, {4.0, 2.0, 1.0, 2.0, 5.0, 2.0, 1.0, 2.0, 6.0});
  Matrix l = cholesky(a);
  Vec b = {1.0, -2.0, 3.0};
  Vec y = solve_lower(l, b);
  Vec ly = matvec(l, y);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ly[i] == doctest::Approx(b[i]));
  Vec x = solve_lower_transposed(l, b);
  Vec ltx = matvec(transpose(l), x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ltx[i] == doctest::Approx(b[i]));
}

TEST_CASE("chol_inverse gives A^{-1}") {
  RandomStream rng(13, 0);
  Matrix a = random_spd(5, rng);
  Matrix inv = chol_inverse(cholesky(a));
  Matrix prod = matmul(a, inv);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
}

TEST_CASE("mvn_sample matches its mean and covariance in Monte Carlo") {
  Matrix cov(2, 2, {2.0, 1.0, 1.0, 2.0});
  Matrix l = cholesky(cov);
  Vec mean = {1.0, -1.0};
  RandomStream rng(14, 0);
  const int n = 40000;
  double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < n; ++i) {
    Vec x = mvn_sample(mean, l, rng);
    s0 += x[0];
    s1 += x[1];
    double d0 = x[0] - mean[0], d1 = x[1] - mean[1];
    s00 += d0 * d0;
    s11 += d1 * d1;
    s01 += d0 * d1;
  }
  CHECK(std::abs(s0 / n - 1.0) < 0.05);
  CHECK(std::abs(s1 / n + 1.0) < 0.05);
  CHECK(std::abs(s00 / n - 2.0) < 0.1);
  CHECK(std::abs(s11 / n - 2.0) < 0.1);
  CHECK(std::abs(s01 / n - 1.0) < 0.1);
}
