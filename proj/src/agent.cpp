#include "psdrl/agent.hpp"

#include <stdexcept>

namespace psdrl {

namespace {
void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}
std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("Agent: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}
void write_vec(std::ostream& os, const Vec& v) {
  write_u64(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}
Vec read_vec(std::istream& is) {
  Vec v(read_u64(is));
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  return v;
}

std::size_t obs_dim_for(const RunConfig& cfg) {
  return make_env(cfg.env_name, cfg.env_size)->spec().obs_dim;
}
std::size_t action_count_for(const RunConfig& cfg) {
  return make_env(cfg.env_name, cfg.env_size)->spec().action_count;
}
}  // namespace

Agent::Agent(const RunConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      ae_(obs_dim_for(cfg), cfg.latent_dim, cfg.ae_hidden),
      fm_(cfg.latent_dim, action_count_for(cfg), cfg.hidden_dim, cfg.trunk_hidden,
          cfg.feature_dim),
      term_(cfg.latent_dim, cfg.term_hidden),
      vn_(cfg.latent_dim, cfg.hidden_dim, cfg.value_hidden, cfg.target_update_freq),
      buffer_(cfg.buffer_capacity),
      rng_init_(seed, 1),
      rng_batch_(seed, 2),
      rng_sample_(seed, 3),
      rng_policy_(seed, 4),
      rng_value_init_(seed, 5) {
  cfg_.validate();
  ae_.init(rng_init_);
  fm_.init(rng_init_);
  term_.init(rng_init_);
  vn_.init(rng_init_);
  post_ = prior_posterior(cfg_.latent_dim, cfg_.feature_dim, cfg_.sigma_s2, cfg_.sigma_r2);
  // First sampled model: drawn from the prior (mean modes start from W).
  Matrix w = uses_posterior_sampling() ? sample_weight_matrix(post_, rng_sample_)
                                       : fm_.output_weights();
  sampled_ = make_sampled(fm_, w, model_counter_);
  h_.assign(cfg_.hidden_dim, 0.0);
}

double Agent::exploration_eps(std::size_t t) const {
  if (cfg_.mode == Mode::eps_exploit || cfg_.mode == Mode::eps_explore) {
    double frac = cfg_.mode == Mode::eps_exploit ? cfg_.exploit_frac : 1.0;
    double anneal_steps = frac * static_cast<double>(cfg_.total_steps);
    double td = static_cast<double>(t);
    if (td >= anneal_steps) return cfg_.eps_final;
    return 1.0 + (cfg_.eps_final - 1.0) * td / anneal_steps;
  }
  return cfg_.eps_hat;
}

int Agent::act_greedy(std::span<const double> z, std::span<const double> h,
                      Vec& h_next) const {
  BellmanResult res = bellman_target(sampled_.model, term_, vn_, z, h, cfg_.gamma,
                                     /*use_target=*/false);
  h_next = res.outcomes[static_cast<std::size_t>(res.best_action)].h_next;
  return res.best_action;
}

ValueBatch Agent::make_value_batch(const Batch& batch) const {
  ValueBatch vb;
  vb.b = batch.b;
  vb.l = batch.l;
  vb.z.resize(batch.b);
  vb.a.resize(batch.b);
  vb.valid = batch.valid;
  for (std::size_t i = 0; i < batch.b; ++i) {
    vb.z[i].resize(batch.l);
    vb.a[i].resize(batch.l);
    for (std::size_t t = 0; t < batch.l; ++t) {
      vb.z[i][t] = ae_.encode(batch.seq[i][t]->s);
      vb.a[i][t] = batch.seq[i][t]->a;
    }
  }
  return vb;
}

void Agent::update_cycle(const MetricsSink& sink) {
  std::size_t kappa = cfg_.training_iterations;
  double la = 0.0, lf = 0.0, lt = 0.0, lv = 0.0;
  for (std::size_t i = 0; i < kappa; ++i)
    la += ae_.train(buffer_.sample(cfg_.batch_size, cfg_.seq_len, rng_batch_), cfg_.lr);
  for (std::size_t i = 0; i < kappa; ++i)
    lf += fm_.train(buffer_.sample(cfg_.batch_size, cfg_.seq_len, rng_batch_), ae_,
                    cfg_.lr, cfg_.bptt_horizon);
  for (std::size_t i = 0; i < kappa; ++i)
    lt += term_.train(buffer_.sample(cfg_.batch_size, cfg_.seq_len, rng_batch_), ae_,
                      cfg_.lr, cfg_.bptt_horizon);

  Matrix w_next;
  if (uses_posterior_sampling()) {
    Matrix phi, targets;
    build_design(buffer_, ae_, fm_, phi, targets);
    post_ = posterior_update(phi, targets, cfg_.sigma_s2, cfg_.sigma_r2, cfg_.noise2);
    w_next = sample_weight_matrix(post_, rng_sample_);
  } else {
    w_next = fm_.output_weights();
  }
  sampled_ = make_sampled(fm_, w_next, ++model_counter_);

  std::size_t value_iters = kappa;
  if (cfg_.mode == Mode::fresh_value) {
    vn_.reinit(rng_value_init_);
    value_iters *= cfg_.fresh_value_multiplier;
  }
  for (std::size_t i = 0; i < value_iters; ++i) {
    Batch batch = buffer_.sample(cfg_.batch_size, cfg_.seq_len, rng_batch_);
    lv += train_value(vn_, make_value_batch(batch), sampled_.model, term_, cfg_.gamma,
                      cfg_.lr);
  }

  if (sink) {
    MetricsRecord rec;
    rec.step = step_;
    rec.loss_ae = la / static_cast<double>(kappa);
    rec.loss_fw = lf / static_cast<double>(kappa);
    rec.loss_term = lt / static_cast<double>(kappa);
    rec.loss_value = lv / static_cast<double>(value_iters);
    if (uses_posterior_sampling()) rec.trace_sigma_s = post_.trace_sigma_s();
    rec.model_id = sampled_.id;
    sink(rec);
  }
}

void Agent::run(Env& env, const MetricsSink& sink, const EvalFn& eval_fn,
                const CheckpointFn& checkpoint_fn) {
  if (need_env_reset_) {
    s_ = env.reset();
    h_.assign(cfg_.hidden_dim, 0.0);
    episode_return_ = 0.0;
    need_env_reset_ = false;
  }
  std::size_t eval_interval = cfg_.effective_eval_interval();
  while (step_ < cfg_.total_steps) {
    std::size_t t = step_;
    if (t % cfg_.update_period(t) == 0 && buffer_.has_closed_episode())
      update_cycle(sink);

    Vec z = ae_.encode(s_);
    Vec h_next;
    int a = greedy_action(sampled_.model, term_, vn_, z, h_, cfg_.gamma,
                          exploration_eps(t), rng_policy_, h_next);
    double r;
    Vec s_next;
    bool terminal;
    env.step(a, r, s_next, terminal);
    episode_return_ += r;
    buffer_.push(Transition{s_, a, r, s_next, terminal});
    step_ = t + 1;
    if (terminal) {
      if (sink) {
        MetricsRecord rec;
        rec.step = step_;
        rec.train_return = episode_return_;
        sink(rec);
      }
      episode_return_ = 0.0;
      s_ = env.reset();
      h_.assign(cfg_.hidden_dim, 0.0);
    } else {
      s_ = std::move(s_next);
      h_ = std::move(h_next);
    }
    if (eval_fn && step_ % eval_interval == 0) {
      MetricsRecord rec;
      rec.step = step_;
      rec.eval_return = eval_fn(*this);
      if (sink) sink(rec);
    }
    if (checkpoint_fn && cfg_.checkpoint_interval &&
        step_ % cfg_.checkpoint_interval == 0 && step_ < cfg_.total_steps)
      checkpoint_fn(*this, step_);
  }
}

void Agent::save(std::ostream& os) const {
  write_u64(os, seed_);
  write_u64(os, step_);
  write_u64(os, model_counter_);
  write_u64(os, need_env_reset_ ? 1 : 0);
  write_vec(os, s_);
  write_vec(os, h_);
  os.write(reinterpret_cast<const char*>(&episode_return_), sizeof(double));
  rng_init_.save(os);
  rng_batch_.save(os);
  rng_sample_.save(os);
  rng_policy_.save(os);
  rng_value_init_.save(os);
  ae_.params().save(os);
  fm_.params().save(os);
  term_.params().save(os);
  vn_.params().save(os);
  vn_.target_params().save(os);
  write_u64(os, vn_.updates_done());
  post_.save(os);
  sampled_.model.params().save(os);
  write_u64(os, sampled_.id);
  buffer_.save(os);
}

Agent Agent::load(std::istream& is, const RunConfig& cfg) {
  std::uint64_t seed = read_u64(is);
  Agent agent(cfg, seed);
  agent.step_ = read_u64(is);
  agent.model_counter_ = read_u64(is);
  agent.need_env_reset_ = read_u64(is) != 0;
  agent.s_ = read_vec(is);
  agent.h_ = read_vec(is);
  is.read(reinterpret_cast<char*>(&agent.episode_return_), sizeof(double));
  agent.rng_init_ = RandomStream::load(is);
  agent.rng_batch_ = RandomStream::load(is);
  agent.rng_sample_ = RandomStream::load(is);
  agent.rng_policy_ = RandomStream::load(is);
  agent.rng_value_init_ = RandomStream::load(is);
  agent.ae_.params() = ParamStore::load(is);
  agent.fm_.params() = ParamStore::load(is);
  agent.term_.params() = ParamStore::load(is);
  agent.vn_.params() = ParamStore::load(is);
  agent.vn_.target_params() = ParamStore::load(is);
  agent.vn_.restore_counters(read_u64(is));
  agent.post_ = PosteriorState::load(is);
  agent.sampled_.model.params() = ParamStore::load(is);
  agent.sampled_.id = read_u64(is);
  agent.buffer_ = ReplayBuffer::load(is);
  return agent;
}

}  // namespace psdrl
