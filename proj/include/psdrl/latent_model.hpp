#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "psdrl/dynamics.hpp"
#include "psdrl/mlp.hpp"
#include "psdrl/replay.hpp"

namespace psdrl {

/// Fully-connected autoencoder over flat observations.
class Autoencoder {
 public:
  Autoencoder(std::size_t obs_dim, std::size_t latent_dim,
              const std::vector<std::size_t>& hidden);
  void init(RandomStream& rng) { enc_.init(params_, rng); dec_.init(params_, rng); }

  Vec encode(std::span<const double> s) const { return enc_.forward(params_, s); }
  Vec decode(std::span<const double> z) const { return dec_.forward(params_, z); }

  /// B Adam updates, each on the inner batch of one sequence's L observations.
  /// Returns the mean reconstruction loss across updates.
  double train(const Batch& batch, double lr);

  std::size_t obs_dim() const { return enc_.input_dim(); }
  std::size_t latent_dim() const { return enc_.output_dim(); }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  Mlp enc_, dec_;
  ParamStore params_;
};

/// Recurrent forward model f(z, a, h) = W phi(z, a, h). The GRU consumes
/// (z, one-hot a) and the trunk consumes (h', z, one-hot a); the feature
/// vector phi is the trunk output with a constant 1 appended, so the output
/// layer W (shape (d_z + 1) x k) absorbs the bias. Row d_z predicts reward.
class ForwardModel : public Dynamics {
 public:
  ForwardModel() = default;
  ForwardModel(std::size_t latent_dim, std::size_t action_count, std::size_t hidden_dim,
               const std::vector<std::size_t>& trunk_hidden, std::size_t feature_dim);
  void init(RandomStream& rng);

  /// phi (length k, last entry 1) and the post-step hidden state.
  void features(std::span<const double> z, int a, std::span<const double> h,
                Vec& phi, Vec& h_next) const;

  std::size_t latent_dim() const override { return latent_dim_; }
  std::size_t hidden_dim() const override { return gru_.hidden_dim(); }
  std::size_t action_count() const override { return action_count_; }
  std::size_t feature_dim() const { return feature_dim_; }

  void step(std::span<const double> z, int a, std::span<const double> h,
            Vec& z_next, double& r, Vec& h_next) const override;

  Matrix output_weights() const;
  void set_output_weights(const Matrix& w);

  /// L/l truncated-BPTT updates of batch size B; hidden state carried
  /// (detached) across windows, zero at sequence start. Latents are
  /// recomputed with the given (frozen) encoder. Returns mean loss.
  double train(const Batch& batch, const Autoencoder& ae, double lr,
               std::size_t bptt_horizon);

  /// Loss of the first window only, from a zero hidden state, optionally
  /// accumulating parameter gradients (no optimizer step). The same forward
  /// and backward path train() uses; exposed so gradients can be verified
  /// against finite differences.
  double window_loss(const Batch& batch, const Autoencoder& ae,
                     std::size_t bptt_horizon, bool with_grads);

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  struct StepCache;

  void compute_latents(const Batch& batch, const Autoencoder& ae,
                       std::vector<std::vector<Vec>>& zs,
                       std::vector<std::vector<Vec>>& zs_next) const;
  /// One truncated window [t0, t1) over the whole batch; updates the carried
  /// hidden states and returns the mean loss over valid steps (any_valid
  /// reports whether the window held any).
  double run_window(const Batch& batch, const std::vector<std::vector<Vec>>& zs,
                    const std::vector<std::vector<Vec>>& zs_next, std::size_t t0,
                    std::size_t t1, std::vector<Vec>& carried, bool with_grads,
                    bool& any_valid);

  std::size_t latent_dim_ = 0, action_count_ = 0, feature_dim_ = 0;
  GruCell gru_;
  Mlp trunk_;
  ParamStore params_;
};

/// Feedforward regressor of the absorbing-state indicator, sigmoid head.
class TerminationModel : public TerminationFn {
 public:
  TerminationModel(std::size_t latent_dim, const std::vector<std::size_t>& hidden);
  void init(RandomStream& rng) { net_.init(params_, rng); }

  double prob(std::span<const double> z) const override {
    return net_.forward(params_, z)[0];
  }

  /// Same L/l windowed update count as the forward model, regressing
  /// omega(z_{t+1}) onto delta_t in {0,1}.
  double train(const Batch& batch, const Autoencoder& ae, double lr,
               std::size_t bptt_horizon);

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  Mlp net_;
  ParamStore params_;
};

/// A drawn output-layer matrix bound to a snapshot of the feature-map
/// parameters it was drawn against. Never trained; replaced wholesale.
struct SampledModel {
  ForwardModel model;
  std::uint64_t id = 0;
};

/// Fresh sampled model: copy of the forward model with w_tilde installed.
SampledModel make_sampled(const ForwardModel& fm, const Matrix& w_tilde, std::uint64_t id);

}  // namespace psdrl
