#include "psdrl/planner.hpp"

#include <stdexcept>

namespace psdrl {

namespace {
std::vector<std::size_t> stack_sizes(std::size_t in, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}
std::vector<Act> stack_acts(std::size_t hidden_count) {
  std::vector<Act> acts(hidden_count, Act::tanh);
  acts.push_back(Act::linear);
  return acts;
}
}  // namespace

ValueNet::ValueNet(std::size_t latent_dim, std::size_t hidden_state_dim,
                   const std::vector<std::size_t>& hidden, std::size_t target_update_freq)
    : net_("value", stack_sizes(latent_dim + hidden_state_dim, hidden),
           stack_acts(hidden.size())),
      target_update_freq_(target_update_freq) {}

void ValueNet::init(RandomStream& rng) {
  params_ = ParamStore();
  net_.init(params_, rng);
  target_params_ = params_;
  updates_done_ = 0;
}

void ValueNet::reinit(RandomStream& rng) { init(rng); }

double ValueNet::value(std::span<const double> z, std::span<const double> h,
                       bool use_target) const {
  Vec in(z.begin(), z.end());
  in.insert(in.end(), h.begin(), h.end());
  return net_.forward(use_target ? target_params_ : params_, in)[0];
}

double ValueNet::update(const std::vector<Vec>& inputs, const Vec& targets, double lr) {
  if (inputs.size() != targets.size())
    throw std::invalid_argument("ValueNet::update: batch mismatch");
  params_.zero_grads();
  double inv = 1.0 / static_cast<double>(inputs.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Mlp::Cache cache;
    Vec out = net_.forward(params_, inputs[i], &cache);
    double d = out[0] - targets[i];
    loss += d * d * inv;
    Vec dy{2.0 * d * inv};
    net_.backward(params_, cache, dy);
  }
  params_.adam_update(lr);
  ++updates_done_;
  if (updates_done_ % target_update_freq_ == 0) target_params_ = params_;
  return loss;
}

BellmanResult bellman_target(const Dynamics& model, const TerminationFn& term,
                             const ValueNet& vn, std::span<const double> z,
                             std::span<const double> h, double gamma, bool use_target) {
  BellmanResult res;
  std::size_t n_act = model.action_count();
  res.outcomes.resize(n_act);
  for (std::size_t a = 0; a < n_act; ++a) {
    ActionOutcome& o = res.outcomes[a];
    model.step(z, static_cast<int>(a), h, o.z_next, o.reward, o.h_next);
    o.terminal = term.prob(o.z_next) >= 0.5;
    o.next_value = o.terminal ? 0.0 : vn.value(o.z_next, o.h_next, use_target);
    o.score = o.reward + gamma * o.next_value;
    if (a == 0 || o.score > res.best_value) {
      res.best_value = o.score;
      res.best_action = static_cast<int>(a);
    }
  }
  return res;
}

int greedy_action(const Dynamics& model, const TerminationFn& term, const ValueNet& vn,
                  std::span<const double> z, std::span<const double> h, double gamma,
                  double eps, RandomStream& rng, Vec& h_next) {
  if (eps > 0.0 && rng.uniform() < eps) {
    int a = static_cast<int>(rng.below(model.action_count()));
    Vec z_next;
    double r;
    model.step(z, a, h, z_next, r, h_next);
    return a;
  }
  BellmanResult res = bellman_target(model, term, vn, z, h, gamma, /*use_target=*/false);
  h_next = res.outcomes[static_cast<std::size_t>(res.best_action)].h_next;
  return res.best_action;
}

double train_value(ValueNet& vn, const ValueBatch& batch, const Dynamics& model,
                   const TerminationFn& term, double gamma, double lr) {
  std::size_t b = batch.b, l = batch.l;
  std::size_t hd = model.hidden_dim();

  // Hidden states rolled with the sampled model along stored actions.
  std::vector<std::vector<Vec>> hs(b);
  for (std::size_t i = 0; i < b; ++i) {
    hs[i].resize(l + 1);
    hs[i][0].assign(hd, 0.0);
    for (std::size_t t = 0; t < l; ++t) {
      if (!batch.valid[i][t]) {
        hs[i][t + 1] = hs[i][t];
        continue;
      }
      Vec z_next, h_next;
      double r;
      model.step(batch.z[i][t], batch.a[i][t], hs[i][t], z_next, r, h_next);
      hs[i][t + 1] = std::move(h_next);
    }
  }

  double total = 0.0;
  std::size_t n_updates = 0;
  for (std::size_t t = 0; t < l; ++t) {
    std::vector<Vec> inputs;
    Vec targets;
    for (std::size_t i = 0; i < b; ++i) {
      if (!batch.valid[i][t]) continue;
      BellmanResult res = bellman_target(model, term, vn, batch.z[i][t], hs[i][t],
                                         gamma, /*use_target=*/true);
      Vec in(batch.z[i][t]);
      in.insert(in.end(), hs[i][t].begin(), hs[i][t].end());
      inputs.push_back(std::move(in));
      targets.push_back(res.best_value);
    }
    if (inputs.empty()) continue;
    total += vn.update(inputs, targets, lr);
    ++n_updates;
  }
  return n_updates ? total / static_cast<double>(n_updates) : 0.0;
}

}  // namespace psdrl
