#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace psdrl {

enum class Mode { psdrl, eps_exploit, eps_explore, fresh_value };

Mode mode_from_string(const std::string& s);
const char* mode_name(Mode m);

/// Full experiment configuration. Defaults follow the published
/// hyperparameters; architecture sizes default to desk scale.
struct RunConfig {
  // Environment
  std::string env_name = "deep_sea";
  std::size_t env_size = 8;  // deep_sea grid size; ignored elsewhere

  // Run
  std::size_t total_steps = 50000;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  Mode mode = Mode::psdrl;
  std::string out_dir = "out";
  std::size_t eval_interval = 0;  // 0: total_steps / 100
  std::size_t eval_episodes = 3;
  std::size_t checkpoint_interval = 0;  // 0: no checkpoints

  // Architecture
  std::size_t latent_dim = 8;
  std::size_t hidden_dim = 24;             // GRU hidden units
  std::size_t feature_dim = 32;            // k, constant-1 feature included
  std::vector<std::size_t> ae_hidden = {64};
  std::vector<std::size_t> trunk_hidden = {48};
  std::vector<std::size_t> term_hidden = {32};
  std::vector<std::size_t> value_hidden = {64, 64};

  // Training
  double lr = 1e-4;
  std::size_t batch_size = 125;       // B
  std::size_t seq_len = 250;          // L
  std::size_t training_iterations = 3;  // kappa
  std::size_t bptt_horizon = 4;       // l for forward/termination models
  std::size_t target_update_freq = 4;
  double gamma = 0.99;
  double eps_hat = 0.001;

  // Posterior
  double sigma_s2 = 1e3;
  double sigma_r2 = 1e3;
  double noise2 = 1.0;

  // Buffer
  std::size_t buffer_capacity = 100000;

  // Update schedule
  std::size_t m_early = 250;
  std::size_t m_late = 1000;
  std::size_t early_cutoff = 0;  // 0: total_steps / 10

  // Ablation schedules
  double eps_final = 0.01;  // epsilon-greedy anneal endpoint
  double exploit_frac = 0.05;
  std::size_t fresh_value_multiplier = 4;

  std::size_t effective_eval_interval() const {
    return eval_interval ? eval_interval : std::max<std::size_t>(1, total_steps / 100);
  }
  std::size_t effective_early_cutoff() const {
    return early_cutoff ? early_cutoff : total_steps / 10;
  }
  std::size_t update_period(std::size_t step) const {
    return step < effective_early_cutoff() ? m_early : m_late;
  }

  void validate() const;  // throws std::invalid_argument with field diagnostics

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
};

/// Parses a flat key=value file with dotted section prefixes. Unknown keys and
/// malformed lines are errors (with line diagnostics); missing keys keep their
/// defaults. The result is validated.
RunConfig load_config(const std::string& path);

void save_config(const RunConfig& cfg, const std::string& path);

}  // namespace psdrl
