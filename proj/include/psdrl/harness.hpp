#pragma once

#include <memory>
#include <string>
#include <vector>

#include "psdrl/agent.hpp"

namespace psdrl {

/// Mean undiscounted return over `episodes` greedy episodes (no exploration
/// noise) on a fresh env instance. Touches neither the buffer nor any
/// parameter or training stream.
double evaluate(const Agent& agent, const Env& env_proto, std::size_t episodes);

/// Formats one CSV row under the stable schema
///   step,train_return,eval_return,loss_ae,loss_fw,loss_term,loss_value,
///   trace_sigma_s,model_id
/// with empty cells for fields absent from the record.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& rec);

/// Full agent + env + config snapshot, sufficient for bit-exact resume.
void save_checkpoint(const std::string& path, const Agent& agent, const Env& env);

struct Checkpoint {
  RunConfig cfg;
  std::unique_ptr<Env> env;
  std::unique_ptr<Agent> agent;
};
Checkpoint load_checkpoint(const std::string& path);

struct SeedResult {
  std::uint64_t seed = 0;
  double final_eval_return = 0.0;
  std::string csv_path;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  double median_final_eval = 0.0;
  double mean_final_eval = 0.0;
};

/// Runs every configured seed sequentially, writing one metrics CSV per seed
/// (metrics_seed<seed>.csv) plus summary.csv and a run manifest. The output
/// directory may be overridden with the PSDRL_OUT_DIR environment variable.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Resumes a single seed from a checkpoint, writing the remaining metrics
/// rows to `csv_path`.
SeedResult resume_run(const std::string& checkpoint_path, const std::string& csv_path);

/// From the env's initial state, rolls the sampled model open-loop alongside
/// the true environment under the greedy policy and writes per step three
/// portable graymaps (true observation, decoded prediction, absolute error)
/// plus mse.csv with the per-step reconstruction error. Values are clipped to
/// [0,1] before quantization. Stops early if the episode terminates.
void dump_rollout(const Agent& agent, Env& env, std::size_t horizon,
                  const std::string& out_dir);

}  // namespace psdrl
