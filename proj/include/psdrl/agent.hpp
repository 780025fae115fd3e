#pragma once

#include <functional>
#include <optional>

#include "psdrl/config.hpp"
#include "psdrl/envs.hpp"
#include "psdrl/latent_model.hpp"
#include "psdrl/planner.hpp"
#include "psdrl/posterior.hpp"
#include "psdrl/replay.hpp"

namespace psdrl {

/// One metrics event. Fields are filled per event kind: update cycles report
/// losses, posterior trace, and the new sampled-model id; episode ends report
/// the training return; evaluations report the mean evaluation return.
struct MetricsRecord {
  std::size_t step = 0;
  std::optional<double> train_return;
  std::optional<double> eval_return;
  std::optional<double> loss_ae, loss_fw, loss_term, loss_value;
  std::optional<double> trace_sigma_s;
  std::optional<std::uint64_t> model_id;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;
class Agent;
using EvalFn = std::function<double(const Agent&)>;
using CheckpointFn = std::function<void(const Agent&, std::size_t step)>;

/// The sequential agent loop: act with the epsilon-hat-greedy one-step-return
/// policy under the current sampled model, store transitions, and every m
/// steps retrain the transition model, refresh the posterior, draw a new
/// sampled model, and continue training the value network against it.
class Agent {
 public:
  Agent(const RunConfig& cfg, std::uint64_t seed);

  /// Runs from the current step up to cfg.total_steps. `eval_fn` (optional)
  /// is invoked at the evaluation cadence; `checkpoint_fn` (optional) at the
  /// checkpoint cadence. The env must match the config (and, on resume, the
  /// state saved alongside the agent).
  void run(Env& env, const MetricsSink& sink, const EvalFn& eval_fn = {},
           const CheckpointFn& checkpoint_fn = {});

  /// Greedy action (no exploration noise, live value parameters); fills the
  /// chosen action's hidden state. Pure: no stream is advanced.
  int act_greedy(std::span<const double> z, std::span<const double> h, Vec& h_next) const;

  const RunConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t step() const { return step_; }
  const Autoencoder& autoencoder() const { return ae_; }
  const ForwardModel& forward_model() const { return fm_; }
  const TerminationModel& termination() const { return term_; }
  const ValueNet& value_net() const { return vn_; }
  const SampledModel& sampled() const { return sampled_; }
  const PosteriorState& posterior() const { return post_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  double gamma() const { return cfg_.gamma; }

  /// Exploration rate in effect at environment step t (annealed in the
  /// epsilon-greedy ablation modes, constant epsilon-hat otherwise).
  double exploration_eps(std::size_t t) const;

  void save(std::ostream& os) const;
  static Agent load(std::istream& is, const RunConfig& cfg);

 private:
  void update_cycle(const MetricsSink& sink);
  ValueBatch make_value_batch(const Batch& batch) const;
  bool uses_posterior_sampling() const {
    return cfg_.mode == Mode::psdrl || cfg_.mode == Mode::fresh_value;
  }

  RunConfig cfg_;
  std::uint64_t seed_;

  Autoencoder ae_;
  ForwardModel fm_;
  TerminationModel term_;
  ValueNet vn_;
  PosteriorState post_;
  SampledModel sampled_;
  std::uint64_t model_counter_ = 0;
  ReplayBuffer buffer_;

  RandomStream rng_init_, rng_batch_, rng_sample_, rng_policy_, rng_value_init_;

  std::size_t step_ = 0;
  Vec s_, h_;
  double episode_return_ = 0.0;
  bool need_env_reset_ = true;  // true until the first run() call touches env
};

}  // namespace psdrl
