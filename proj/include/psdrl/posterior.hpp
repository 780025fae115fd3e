#pragma once

#include <cstdint>
#include <istream>
#include <ostream>

#include "psdrl/latent_model.hpp"
#include "psdrl/linalg.hpp"
#include "psdrl/replay.hpp"

namespace psdrl {

/// Per-output-row Gaussian posterior over the forward model's output layer.
/// All latent rows share one covariance (they share the prior variance), the
/// reward row has its own; mu holds one row mean per output row.
struct PosteriorState {
  Matrix sigma_s_chol;  // k x k factor for latent-output rows
  Matrix sigma_r_chol;  // k x k factor for the reward row
  Matrix mu;            // (d_z + 1) x k row means
  std::size_t n = 0;    // transitions used

  double trace_sigma_s() const;

  void save(std::ostream& os) const;
  static PosteriorState load(std::istream& is);
};

/// Prior state: mu = 0, Sigma_S = sigma_s2 I, Sigma_R = sigma_r2 I.
PosteriorState prior_posterior(std::size_t latent_dim, std::size_t feature_dim,
                               double sigma_s2, double sigma_r2);

/// Replays every stored episode through the current encoder and trunk from
/// h = 0, in episode insertion order then time. Row i of Phi is phi(x_i)
/// (with the constant-1 feature); row i of T is (z'_i, r_i) with z' the
/// current encoding of the true next state.
void build_design(const ReplayBuffer& buffer, const Autoencoder& ae,
                  const ForwardModel& fm, Matrix& phi, Matrix& targets);

/// Bayesian linear regression per output row: precision
/// P = I/sigma_j2 + Phi^T Phi / noise2, Sigma = P^{-1} via triangular solves,
/// mu_j = solve(P, Phi^T t_j) / noise2.
PosteriorState posterior_update(const Matrix& phi, const Matrix& targets,
                                double sigma_s2, double sigma_r2, double noise2);

/// Row j of the result ~ N(mu_j, Sigma_j); consecutive draws from rng.
Matrix sample_weight_matrix(const PosteriorState& ps, RandomStream& rng);

}  // namespace psdrl
