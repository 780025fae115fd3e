#pragma once

#include <span>
#include <vector>

#include "psdrl/dynamics.hpp"
#include "psdrl/mlp.hpp"
#include "psdrl/rng.hpp"

namespace psdrl {

/// Value network over (z, h) with a target-parameter snapshot refreshed every
/// `target_update_freq` gradient updates. Parameters persist across sampled
/// models unless reinit() is called (fresh-value ablation).
class ValueNet {
 public:
  ValueNet(std::size_t latent_dim, std::size_t hidden_state_dim,
           const std::vector<std::size_t>& hidden, std::size_t target_update_freq);
  void init(RandomStream& rng);

  double value(std::span<const double> z, std::span<const double> h,
               bool use_target) const;

  /// One Adam update on (inputs, targets); refreshes the target copy on
  /// schedule. Returns the batch loss.
  double update(const std::vector<Vec>& inputs, const Vec& targets, double lr);

  /// Reinitializes parameters, target copy, and optimizer state.
  void reinit(RandomStream& rng);

  std::size_t input_dim() const { return net_.input_dim(); }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  ParamStore& target_params() { return target_params_; }
  const ParamStore& target_params() const { return target_params_; }
  std::size_t updates_done() const { return updates_done_; }
  void restore_counters(std::size_t updates_done) { updates_done_ = updates_done; }

 private:
  Mlp net_;
  ParamStore params_, target_params_;
  std::size_t target_update_freq_;
  std::size_t updates_done_ = 0;
};

struct ActionOutcome {
  Vec z_next;
  double reward = 0.0;
  Vec h_next;
  double next_value = 0.0;  // zero when the termination model fires
  bool terminal = false;
  double score = 0.0;  // reward + gamma * next_value
};

struct BellmanResult {
  double best_value = 0.0;
  int best_action = 0;  // ties broken by lowest action id
  std::vector<ActionOutcome> outcomes;
};

/// One-step lookahead over every action: next value is zero when
/// omega(z') >= 0.5, else V(z', h'); best_value = max_a [r + gamma v'].
/// `use_target` selects the target copy (training) or the live parameters
/// (acting).
BellmanResult bellman_target(const Dynamics& model, const TerminationFn& term,
                             const ValueNet& vn, std::span<const double> z,
                             std::span<const double> h, double gamma, bool use_target);

/// Epsilon-greedy over the one-step return with live value parameters.
/// Returns the chosen action and fills h_next with that action's hidden state.
int greedy_action(const Dynamics& model, const TerminationFn& term, const ValueNet& vn,
                  std::span<const double> z, std::span<const double> h, double gamma,
                  double eps, RandomStream& rng, Vec& h_next);

/// One batch of latent sequences for value training.
struct ValueBatch {
  std::size_t b = 0, l = 0;
  std::vector<std::vector<Vec>> z;             // [b][l]
  std::vector<std::vector<int>> a;             // [b][l]
  std::vector<std::vector<std::uint8_t>> valid;
};

/// L single-step updates over the batch: hidden states are rolled forward with
/// the sampled model along the stored actions from h = 0; update t regresses
/// V(z_t, h_t) onto the Bellman target (a constant) across sequences.
/// Returns the mean update loss.
double train_value(ValueNet& vn, const ValueBatch& batch, const Dynamics& model,
                   const TerminationFn& term, double gamma, double lr);

}  // namespace psdrl
