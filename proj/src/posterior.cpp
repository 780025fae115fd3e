#include "psdrl/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace psdrl {

double PosteriorState::trace_sigma_s() const {
  // trace(L L^T) = squared Frobenius norm of L.
  double t = frobenius(sigma_s_chol);
  return t * t;
}

namespace {
void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}
std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("PosteriorState: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}
void write_matrix(std::ostream& os, const Matrix& m) {
  write_u64(os, m.rows());
  write_u64(os, m.cols());
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
}
Matrix read_matrix(std::istream& is) {
  std::size_t rows = read_u64(is), cols = read_u64(is);
  Matrix m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  return m;
}
}  // namespace

void PosteriorState::save(std::ostream& os) const {
  write_matrix(os, sigma_s_chol);
  write_matrix(os, sigma_r_chol);
  write_matrix(os, mu);
  write_u64(os, n);
}

PosteriorState PosteriorState::load(std::istream& is) {
  PosteriorState ps;
  ps.sigma_s_chol = read_matrix(is);
  ps.sigma_r_chol = read_matrix(is);
  ps.mu = read_matrix(is);
  ps.n = read_u64(is);
  return ps;
}

PosteriorState prior_posterior(std::size_t latent_dim, std::size_t feature_dim,
                               double sigma_s2, double sigma_r2) {
  PosteriorState ps;
  ps.sigma_s_chol = Matrix(feature_dim, feature_dim);
  ps.sigma_r_chol = Matrix(feature_dim, feature_dim);
  for (std::size_t i = 0; i < feature_dim; ++i) {
    ps.sigma_s_chol(i, i) = std::sqrt(sigma_s2);
    ps.sigma_r_chol(i, i) = std::sqrt(sigma_r2);
  }
  ps.mu = Matrix(latent_dim + 1, feature_dim);
  ps.n = 0;
  return ps;
}

void build_design(const ReplayBuffer& buffer, const Autoencoder& ae,
                  const ForwardModel& fm, Matrix& phi, Matrix& targets) {
  std::size_t n = buffer.total_transitions();
  if (n == 0) throw std::runtime_error("build_design: empty buffer");
  std::size_t k = fm.feature_dim();
  std::size_t dz = fm.latent_dim();
  phi = Matrix(n, k);
  targets = Matrix(n, dz + 1);
  std::size_t row = 0;
  for (std::size_t e = 0; e < buffer.episode_count(); ++e) {
    const Episode& ep = buffer.episode(e);
    Vec h(fm.hidden_dim(), 0.0);
    for (const Transition& tr : ep) {
      Vec z = ae.encode(tr.s);
      Vec f, h_next;
      fm.features(z, tr.a, h, f, h_next);
      Vec z_next = ae.encode(tr.s_next);
      for (std::size_t j = 0; j < k; ++j) phi(row, j) = f[j];
      for (std::size_t j = 0; j < dz; ++j) targets(row, j) = z_next[j];
      targets(row, dz) = tr.r;
      h = std::move(h_next);
      ++row;
    }
  }
}

PosteriorState posterior_update(const Matrix& phi, const Matrix& targets,
                                double sigma_s2, double sigma_r2, double noise2) {
  if (!(sigma_s2 > 0.0 && sigma_r2 > 0.0 && noise2 > 0.0))
    throw std::invalid_argument("posterior_update: variances must be positive");
  std::size_t k = phi.cols();
  std::size_t out = targets.cols();
  if (phi.rows() != targets.rows())
    throw std::invalid_argument("posterior_update: row count mismatch");
  std::size_t dz = out - 1;

  Matrix g = gram(phi);  // Phi^T Phi
  auto precision = [&](double prior_var) {
    Matrix p = g;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) p(i, j) /= noise2;
    for (std::size_t i = 0; i < k; ++i) p(i, i) += 1.0 / prior_var;
    return p;
  };

  Matrix prec_s = precision(sigma_s2);
  Matrix prec_r = precision(sigma_r2);
  Matrix lp_s = cholesky(prec_s);
  Matrix lp_r = cholesky(prec_r);

  PosteriorState ps;
  ps.sigma_s_chol = cholesky(chol_inverse(lp_s));
  ps.sigma_r_chol = cholesky(chol_inverse(lp_r));
  ps.mu = Matrix(out, k);
  for (std::size_t j = 0; j < out; ++j) {
    Vec pt(k, 0.0);  // Phi^T t_j
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      double tij = targets(i, j);
      const double* r = phi.data() + i * k;
      for (std::size_t c = 0; c < k; ++c) pt[c] += r[c] * tij;
    }
    Vec mu_j = solve_chol(j < dz ? lp_s : lp_r, pt);
    for (std::size_t c = 0; c < k; ++c) ps.mu(j, c) = mu_j[c] / noise2;
  }
  ps.n = phi.rows();
  return ps;
}

Matrix sample_weight_matrix(const PosteriorState& ps, RandomStream& rng) {
  std::size_t out = ps.mu.rows();
  std::size_t k = ps.mu.cols();
  Matrix w(out, k);
  for (std::size_t j = 0; j < out; ++j) {
    const Matrix& factor = j + 1 < out ? ps.sigma_s_chol : ps.sigma_r_chol;
    Vec row = mvn_sample(ps.mu.row(j), factor, rng);
    for (std::size_t c = 0; c < k; ++c) w(j, c) = row[c];
  }
  return w;
}

}  // namespace psdrl
