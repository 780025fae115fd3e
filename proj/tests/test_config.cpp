#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "psdrl/config.hpp"

using namespace psdrl;

TEST_CASE("empty text keeps every default") {
  RunConfig cfg = RunConfig::from_text("");
  RunConfig def;
  CHECK(cfg.to_text() == def.to_text());
  CHECK(cfg.env_name == "deep_sea");
  CHECK(cfg.total_steps == 50000);
  CHECK(cfg.batch_size == 125);
  CHECK(cfg.seq_len == 250);
  CHECK(cfg.lr == 1e-4);
  CHECK(cfg.gamma == 0.99);
  CHECK(cfg.sigma_s2 == 1e3);
  CHECK(cfg.m_late == 1000);
  CHECK(cfg.mode == Mode::psdrl);
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  RunConfig cfg = RunConfig::from_text(
      "# a comment\n"
      "\n"
      "  env.name = grid_maze  \n"
      "train.gamma=0.95\n"
      "run.seeds = 3, 5, 8\n"
      "model.value_hidden = 32,32\n");
  CHECK(cfg.env_name == "grid_maze");
  CHECK(cfg.gamma == 0.95);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 5, 8});
  CHECK(cfg.value_hidden == std::vector<std::size_t>{32, 32});
}

TEST_CASE("unknown keys and malformed lines fail with line numbers") {
  CHECK_THROWS_WITH_AS(RunConfig::from_text("env.name=deep_sea\nbogus.key=1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(RunConfig::from_text("just some words\n"),
                       doctest::Contains("line 1"), std::invalid_argument);
}

TEST_CASE("validation rejects out-of-range fields") {
  CHECK_THROWS_AS(RunConfig::from_text("train.gamma=1.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_text("train.gamma=1.0\n"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_text("env.name=pong\n"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_text("train.lr=0\n"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_text("run.seeds=\n"), std::invalid_argument);
  CHECK_THROWS_AS(
      RunConfig::from_text("schedule.m_early=2000\nschedule.m_late=100\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_text("run.mode=bogus\n"), std::invalid_argument);
}

TEST_CASE("to_text and from_text round-trip a modified config") {
  RunConfig cfg;
  cfg.env_name = "two_rooms";
  cfg.mode = Mode::fresh_value;
  cfg.total_steps = 123;
  cfg.seeds = {7};
  cfg.lr = 3.14159e-3;
  cfg.gamma = 0.875;
  cfg.ae_hidden = {10, 20};
  cfg.checkpoint_interval = 50;
  RunConfig back = RunConfig::from_text(cfg.to_text());
  CHECK(back.to_text() == cfg.to_text());
  CHECK(back.mode == Mode::fresh_value);
  CHECK(back.lr == cfg.lr);  // bit-exact through the 17-digit format
}

TEST_CASE("mode names round-trip") {
  for (Mode m : {Mode::psdrl, Mode::eps_exploit, Mode::eps_explore, Mode::fresh_value})
    CHECK(mode_from_string(mode_name(m)) == m);
}

TEST_CASE("derived schedule quantities") {
  RunConfig cfg;
  cfg.total_steps = 10000;
  CHECK(cfg.effective_eval_interval() == 100);
  CHECK(cfg.effective_early_cutoff() == 1000);
  CHECK(cfg.update_period(0) == 250);
  CHECK(cfg.update_period(999) == 250);
  CHECK(cfg.update_period(1000) == 1000);
  cfg.eval_interval = 42;
  cfg.early_cutoff = 7;
  CHECK(cfg.effective_eval_interval() == 42);
  CHECK(cfg.effective_early_cutoff() == 7);
}
