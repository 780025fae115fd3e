#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "psdrl/harness.hpp"

using namespace psdrl;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_cfg(const std::string& out_dir) {
  RunConfig cfg;
  cfg.env_name = "deep_sea";
  cfg.env_size = 4;
  cfg.total_steps = 400;
  cfg.seeds = {0, 1};
  cfg.eval_interval = 100;
  cfg.eval_episodes = 2;
  cfg.out_dir = out_dir;
  cfg.latent_dim = 4;
  cfg.hidden_dim = 6;
  cfg.feature_dim = 8;
  cfg.ae_hidden = {16};
  cfg.trunk_hidden = {12};
  cfg.term_hidden = {8};
  cfg.value_hidden = {16};
  cfg.batch_size = 4;
  cfg.seq_len = 8;
  cfg.buffer_capacity = 2000;
  cfg.m_early = 100;
  cfg.m_late = 200;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("csv rows leave absent fields blank") {
  MetricsRecord rec;
  rec.step = 42;
  CHECK(metrics_csv_row(rec) == "42,,,,,,,,");
  rec.train_return = 1.5;
  rec.model_id = 7;
  CHECK(metrics_csv_row(rec) == "42,1.5,,,,,,,7");
  MetricsRecord ev;
  ev.step = 100;
  ev.eval_return = -0.25;
  CHECK(metrics_csv_row(ev) == "100,,-0.25,,,,,,");
  CHECK(metrics_csv_header() ==
        "step,train_return,eval_return,loss_ae,loss_fw,loss_term,loss_value,"
        "trace_sigma_s,model_id");
}

TEST_CASE("evaluation is deterministic and leaves the agent untouched") {
  RunConfig cfg = tiny_cfg("unused");
  Agent agent(cfg, 0);
  auto env = make_env(cfg.env_name, cfg.env_size);
  std::size_t buffered = agent.buffer().total_transitions();
  double e1 = evaluate(agent, *env, 3);
  double e2 = evaluate(agent, *env, 3);
  CHECK(e1 == e2);
  CHECK(agent.buffer().total_transitions() == buffered);
  CHECK(agent.step() == 0);
}

TEST_CASE("run_experiment writes per-seed CSVs and a consistent summary") {
  TempDir dir("psdrl_harness_exp");
  RunConfig cfg = tiny_cfg(dir.str());
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.seeds.size() == 2);
  CHECK(fs::exists(dir.path / "metrics_seed0.csv"));
  CHECK(fs::exists(dir.path / "metrics_seed1.csv"));
  CHECK(fs::exists(dir.path / "run_manifest.txt"));

  std::string summary = slurp((dir.path / "summary.csv").string());
  std::istringstream is(summary);
  std::string line;
  std::getline(is, line);
  CHECK(line == "seed,final_eval_return");
  double finals[2], med = 0.0, mean = 0.0;
  for (int i = 0; i < 2; ++i) {
    std::getline(is, line);
    finals[i] = std::stod(line.substr(line.find(',') + 1));
  }
  std::getline(is, line);
  REQUIRE(line.rfind("median,", 0) == 0);
  med = std::stod(line.substr(7));
  std::getline(is, line);
  REQUIRE(line.rfind("mean,", 0) == 0);
  mean = std::stod(line.substr(5));
  CHECK(med == doctest::Approx(0.5 * (finals[0] + finals[1])));
  CHECK(mean == doctest::Approx(0.5 * (finals[0] + finals[1])));
  CHECK(res.median_final_eval == doctest::Approx(med));

  // Each metrics CSV carries the header plus at least one eval row.
  std::string csv = slurp((dir.path / "metrics_seed0.csv").string());
  CHECK(csv.rfind(metrics_csv_header() + "\n", 0) == 0);
  CHECK(csv.find("400,") != std::string::npos);
}

TEST_CASE("two experiment runs are byte-identical") {
  TempDir d1("psdrl_harness_det1"), d2("psdrl_harness_det2");
  RunConfig cfg1 = tiny_cfg(d1.str());
  run_experiment(cfg1);
  RunConfig cfg2 = tiny_cfg(d2.str());
  run_experiment(cfg2);
  CHECK(slurp((d1.path / "metrics_seed0.csv").string()) ==
        slurp((d2.path / "metrics_seed0.csv").string()));
  CHECK(slurp((d1.path / "metrics_seed1.csv").string()) ==
        slurp((d2.path / "metrics_seed1.csv").string()));
  CHECK(slurp((d1.path / "summary.csv").string()) ==
        slurp((d2.path / "summary.csv").string()));
}

TEST_CASE("the output directory environment override wins") {
  TempDir cfg_dir("psdrl_harness_cfgdir"), env_dir("psdrl_harness_envdir");
  RunConfig cfg = tiny_cfg(cfg_dir.str());
  cfg.seeds = {0};
  cfg.total_steps = 150;
  setenv("PSDRL_OUT_DIR", env_dir.str().c_str(), 1);
  run_experiment(cfg);
  unsetenv("PSDRL_OUT_DIR");
  CHECK(fs::exists(env_dir.path / "metrics_seed0.csv"));
  CHECK(!fs::exists(cfg_dir.path / "metrics_seed0.csv"));
}

TEST_CASE("checkpoint files resume to the uninterrupted tail") {
  TempDir dir("psdrl_harness_ckpt");
  RunConfig cfg = tiny_cfg(dir.str());
  cfg.seeds = {0};
  cfg.checkpoint_interval = 300;
  run_experiment(cfg);
  std::string ckpt = (dir.path / "ckpt_seed0_step300.bin").string();
  REQUIRE(fs::exists(ckpt));

  Checkpoint ck = load_checkpoint(ckpt);
  CHECK(ck.agent->step() == 300);
  CHECK(ck.cfg.total_steps == 400);
  CHECK(ck.cfg.env_size == 4);

  std::string resumed_csv = (dir.path / "resumed.csv").string();
  SeedResult res = resume_run(ckpt, resumed_csv);
  CHECK(res.seed == 0);

  // Rows in the resumed CSV = rows of the direct run with step > 300.
  std::istringstream direct(slurp((dir.path / "metrics_seed0.csv").string()));
  std::ostringstream expected;
  std::string line;
  std::getline(direct, line);  // header
  expected << line << "\n";
  while (std::getline(direct, line)) {
    if (std::stoull(line.substr(0, line.find(','))) > 300) expected << line << "\n";
  }
  CHECK(slurp(resumed_csv) == expected.str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  TempDir dir("psdrl_harness_bad");
  fs::create_directories(dir.path);
  std::string path = (dir.path / "bad.bin").string();
  std::ofstream(path, std::ios::binary) << "NOTACKPT";
  CHECK_THROWS(load_checkpoint(path));
  CHECK_THROWS(load_checkpoint((dir.path / "missing.bin").string()));
}

TEST_CASE("rollout dump writes image triples and an error table") {
  TempDir dir("psdrl_harness_roll");
  RunConfig cfg = tiny_cfg("unused");
  Agent agent(cfg, 0);
  auto env = make_env(cfg.env_name, cfg.env_size);
  dump_rollout(agent, *env, 3, dir.str());
  for (int i = 1; i <= 3; ++i) {
    for (const char* kind : {"true", "pred", "err"}) {
      std::string path =
          (dir.path / ("step" + std::to_string(i) + "_" + kind + ".pgm")).string();
      REQUIRE(fs::exists(path));
      std::string pgm = slurp(path);
      CHECK(pgm.rfind("P5\n4 4\n255\n", 0) == 0);
      CHECK(pgm.size() == 11 + 16);  // header + one byte per pixel
    }
  }
  std::string mse = slurp((dir.path / "mse.csv").string());
  CHECK(mse.rfind("step,mse\n", 0) == 0);
  CHECK(mse.find("\n1,") != std::string::npos);
  CHECK_THROWS_AS(dump_rollout(agent, *env, 0, dir.str()), std::invalid_argument);
}
