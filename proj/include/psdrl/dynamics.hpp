#pragma once

#include <span>

#include "psdrl/matrix.hpp"

namespace psdrl {

/// One-step latent dynamics: (z, a, h) -> (z', r, h'). Implemented by the
/// trained forward model, by sampled models, and by exact test embeddings.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t hidden_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual void step(std::span<const double> z, int a, std::span<const double> h,
                    Vec& z_next, double& r, Vec& h_next) const = 0;
};

/// Probability that a latent state is absorbing.
class TerminationFn {
 public:
  virtual ~TerminationFn() = default;
  virtual double prob(std::span<const double> z) const = 0;
};

}  // namespace psdrl
