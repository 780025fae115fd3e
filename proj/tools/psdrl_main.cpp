#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "psdrl/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Posterior-sampling RL agent on toy pixel environments"};
  app.require_subcommand(1);

  // run
  std::string run_config_path, run_mode, run_out, run_resume, run_resume_csv;
  std::int64_t run_seed = -1;
  auto* run = app.add_subcommand("run", "Train on the configured environment");
  run->add_option("--config", run_config_path, "key=value config file")->required();
  run->add_option("--mode", run_mode,
                  "override agent mode (psdrl|eps-exploit|eps-explore|fresh-value)");
  run->add_option("--seed", run_seed, "run a single seed instead of the configured list");
  run->add_option("--out", run_out, "override output directory");
  run->add_option("--resume", run_resume, "resume from a checkpoint file");
  run->add_option("--resume-csv", run_resume_csv,
                  "metrics CSV path for a resumed run (default <out>/resumed.csv)");

  // eval
  std::string eval_ckpt;
  std::size_t eval_episodes = 3;
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpointed agent greedily");
  ev->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  ev->add_option("--episodes", eval_episodes, "number of evaluation episodes");

  // dump-rollout
  std::string dump_ckpt, dump_out = "rollout";
  std::size_t dump_horizon = 10;
  auto* dump = app.add_subcommand(
      "dump-rollout", "Export true/predicted/error observation images");
  dump->add_option("--checkpoint", dump_ckpt, "checkpoint file")->required();
  dump->add_option("--horizon", dump_horizon, "rollout length");
  dump->add_option("--out", dump_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!run_resume.empty()) {
        std::string out = run_out.empty() ? "out" : run_out;
        std::string csv = run_resume_csv.empty() ? out + "/resumed.csv" : run_resume_csv;
        psdrl::SeedResult res = psdrl::resume_run(run_resume, csv);
        std::printf("seed %llu final_eval_return %.17g\n",
                    static_cast<unsigned long long>(res.seed), res.final_eval_return);
        return 0;
      }
      psdrl::RunConfig cfg = psdrl::load_config(run_config_path);
      if (!run_mode.empty()) cfg.mode = psdrl::mode_from_string(run_mode);
      if (run_seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(run_seed)};
      if (!run_out.empty()) cfg.out_dir = run_out;
      psdrl::ExperimentResult res = psdrl::run_experiment(cfg);
      for (const psdrl::SeedResult& s : res.seeds)
        std::printf("seed %llu final_eval_return %.17g\n",
                    static_cast<unsigned long long>(s.seed), s.final_eval_return);
      std::printf("median %.17g mean %.17g\n", res.median_final_eval,
                  res.mean_final_eval);
    } else if (ev->parsed()) {
      psdrl::Checkpoint ck = psdrl::load_checkpoint(eval_ckpt);
      double ret = psdrl::evaluate(*ck.agent, *ck.env, eval_episodes);
      std::printf("eval_return %.17g over %zu episodes\n", ret, eval_episodes);
    } else if (dump->parsed()) {
      psdrl::Checkpoint ck = psdrl::load_checkpoint(dump_ckpt);
      auto env = ck.env->clone_fresh();
      psdrl::dump_rollout(*ck.agent, *env, dump_horizon, dump_out);
      std::printf("wrote rollout of horizon %zu to %s\n", dump_horizon,
                  dump_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
