#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "psdrl/agent.hpp"
#include "psdrl/harness.hpp"

using namespace psdrl;

namespace {

RunConfig tiny_cfg() {
  RunConfig cfg;
  cfg.env_name = "deep_sea";
  cfg.env_size = 4;
  cfg.total_steps = 600;
  cfg.seeds = {0};
  cfg.eval_interval = 200;
  cfg.eval_episodes = 2;
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

std::string run_to_string(const RunConfig& cfg, std::uint64_t seed) {
  Agent agent(cfg, seed);
  auto env = make_env(cfg.env_name, cfg.env_size);
  std::ostringstream os;
  MetricsSink sink = [&](const MetricsRecord& r) { os << metrics_csv_row(r) << "\n"; };
  EvalFn eval_fn = [&](const Agent& a) { return evaluate(a, *env, cfg.eval_episodes); };
  agent.run(*env, sink, eval_fn);
  return os.str();
}

}  // namespace

TEST_CASE("identical seeds yield identical metric streams") {
  RunConfig cfg = tiny_cfg();
  CHECK(run_to_string(cfg, 0) == run_to_string(cfg, 0));
}

TEST_CASE("different seeds diverge") {
  RunConfig cfg = tiny_cfg();
  CHECK(run_to_string(cfg, 0) != run_to_string(cfg, 1));
}

TEST_CASE("exploration rate schedules per mode") {
  RunConfig cfg = tiny_cfg();
  cfg.total_steps = 10000;

  Agent base(cfg, 0);
  CHECK(base.exploration_eps(0) == cfg.eps_hat);
  CHECK(base.exploration_eps(9999) == cfg.eps_hat);

  cfg.mode = Mode::eps_exploit;  // anneal over 5% of the run
  Agent exploit(cfg, 0);
  CHECK(exploit.exploration_eps(0) == doctest::Approx(1.0));
  CHECK(exploit.exploration_eps(250) == doctest::Approx(0.505));
  CHECK(exploit.exploration_eps(500) == doctest::Approx(0.01));
  CHECK(exploit.exploration_eps(9999) == doctest::Approx(0.01));

  cfg.mode = Mode::eps_explore;  // anneal over the whole run
  Agent explore(cfg, 0);
  CHECK(explore.exploration_eps(0) == doctest::Approx(1.0));
  CHECK(explore.exploration_eps(5000) == doctest::Approx(0.505));
  CHECK(explore.exploration_eps(9999) > 0.01);

  cfg.mode = Mode::fresh_value;
  Agent fresh(cfg, 0);
  CHECK(fresh.exploration_eps(7777) == cfg.eps_hat);
}

TEST_CASE("sampling modes report the posterior trace, mean modes do not") {
  for (Mode m : {Mode::psdrl, Mode::eps_exploit, Mode::eps_explore, Mode::fresh_value}) {
    RunConfig cfg = tiny_cfg();
    cfg.mode = m;
    cfg.total_steps = 250;
    Agent agent(cfg, 3);
    auto env = make_env(cfg.env_name, cfg.env_size);
    bool saw_update = false, saw_trace = false;
    MetricsSink sink = [&](const MetricsRecord& r) {
      if (r.loss_ae) {
        saw_update = true;
        saw_trace = saw_trace || r.trace_sigma_s.has_value();
      }
    };
    agent.run(*env, sink);
    CHECK(saw_update);
    bool sampling = m == Mode::psdrl || m == Mode::fresh_value;
    CHECK(saw_trace == sampling);
  }
}

TEST_CASE("greedy action is pure and repeatable") {
  RunConfig cfg = tiny_cfg();
  Agent agent(cfg, 1);
  Vec z = agent.autoencoder().encode(Vec(16, 0.0));
  Vec h(cfg.hidden_dim, 0.0);
  Vec h1, h2;
  int a1 = agent.act_greedy(z, h, h1);
  int a2 = agent.act_greedy(z, h, h2);
  CHECK(a1 == a2);
  CHECK(h1 == h2);
}

TEST_CASE("sampled model ids increase by one per update cycle") {
  RunConfig cfg = tiny_cfg();
  cfg.total_steps = 450;
  Agent agent(cfg, 5);
  auto env = make_env(cfg.env_name, cfg.env_size);
  std::vector<std::uint64_t> ids;
  MetricsSink sink = [&](const MetricsRecord& r) {
    if (r.model_id) ids.push_back(*r.model_id);
  };
  agent.run(*env, sink);
  REQUIRE(ids.size() >= 2);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(ids[i] == i + 1);
}

TEST_CASE("serialization resumes bit-exactly mid-run") {
  RunConfig cfg = tiny_cfg();
  cfg.checkpoint_interval = 300;

  // Uninterrupted reference run.
  std::vector<std::string> ref_rows;
  {
    Agent agent(cfg, 0);
    auto env = make_env(cfg.env_name, cfg.env_size);
    MetricsSink sink = [&](const MetricsRecord& r) {
      ref_rows.push_back(metrics_csv_row(r));
    };
    EvalFn ev = [&](const Agent& a) { return evaluate(a, *env, cfg.eval_episodes); };
    agent.run(*env, sink, ev);
  }

  // Interrupted run captured at step 300 through the checkpoint hook.
  std::stringstream blob;
  {
    Agent agent(cfg, 0);
    auto env = make_env(cfg.env_name, cfg.env_size);
    MetricsSink sink = [](const MetricsRecord&) {};
    EvalFn ev = [&](const Agent& a) { return evaluate(a, *env, cfg.eval_episodes); };
    CheckpointFn ck = [&](const Agent& a, std::size_t step) {
      REQUIRE(step == 300);
      a.save(blob);
      env->save_state(blob);
    };
    agent.run(*env, sink, ev, ck);
  }

  Agent resumed = Agent::load(blob, cfg);
  CHECK(resumed.step() == 300);
  auto env2 = make_env(cfg.env_name, cfg.env_size);
  env2->load_state(blob);
  std::vector<std::string> tail_rows;
  MetricsSink sink = [&](const MetricsRecord& r) {
    tail_rows.push_back(metrics_csv_row(r));
  };
  EvalFn ev = [&](const Agent& a) { return evaluate(a, *env2, cfg.eval_episodes); };
  resumed.run(*env2, sink, ev);

  // The resumed rows must equal the reference rows from step 300 onward.
  std::vector<std::string> ref_tail;
  for (const std::string& row : ref_rows) {
    std::size_t step = std::stoull(row.substr(0, row.find(',')));
    if (step > 300) ref_tail.push_back(row);
  }
  REQUIRE(tail_rows.size() == ref_tail.size());
  for (std::size_t i = 0; i < tail_rows.size(); ++i) CHECK(tail_rows[i] == ref_tail[i]);
}

TEST_CASE("evaluation does not perturb the training trajectory") {
  RunConfig cfg = tiny_cfg();
  std::string with_eval = run_to_string(cfg, 2);

  Agent agent(cfg, 2);
  auto env = make_env(cfg.env_name, cfg.env_size);
  std::ostringstream os;
  MetricsSink sink = [&](const MetricsRecord& r) {
    if (!r.eval_return) os << metrics_csv_row(r) << "\n";
  };
  EvalFn stub = [](const Agent&) { return 0.0; };
  agent.run(*env, sink, stub);

  // Strip eval rows from the reference; the rest must match exactly.
  std::istringstream ref(with_eval);
  std::ostringstream ref_filtered;
  std::string line;
  while (std::getline(ref, line)) {
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    std::size_t c3 = line.find(',', c2 + 1);
    bool is_eval = c3 > c2 + 1;  // third field (eval_return) non-empty
    if (!is_eval) ref_filtered << line << "\n";
  }
  CHECK(os.str() == ref_filtered.str());
}
