#pragma once

#include <span>
#include <stdexcept>

#include "psdrl/matrix.hpp"
#include "psdrl/rng.hpp"

namespace psdrl {

/// Raised when a matrix handed to cholesky() is not symmetric positive
/// definite. No automatic jitter is applied anywhere; callers that rely on an
/// SPD guarantee (the posterior precision has a positive prior term) treat
/// this as a genuine failure.
struct NonSpdError : std::runtime_error {
  explicit NonSpdError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Lower-triangular L with L L^T = A. Symmetry is checked to 1e-10 relative
/// tolerance; a non-positive pivot raises NonSpdError.
Matrix cholesky(const Matrix& a);

/// Solve L y = b (forward substitution), L lower triangular.
Vec solve_lower(const Matrix& l, std::span<const double> b);

/// Solve L^T x = b (back substitution).
Vec solve_lower_transposed(const Matrix& l, std::span<const double> b);

/// Solve (L L^T) x = b given the factor from cholesky().
Vec solve_chol(const Matrix& l, std::span<const double> b);

/// (L L^T)^{-1}, built column-wise from triangular solves against I.
Matrix chol_inverse(const Matrix& l);

/// mean + L eps with eps a vector of independent standard normals from rng.
Vec mvn_sample(std::span<const double> mean, const Matrix& cov_chol, RandomStream& rng);

}  // namespace psdrl
