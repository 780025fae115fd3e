#include "psdrl/latent_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace psdrl {

namespace {

std::vector<std::size_t> stack_sizes(std::size_t in, const std::vector<std::size_t>& hidden,
                                     std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

std::vector<Act> stack_acts(std::size_t hidden_count, Act hidden_act, Act out_act) {
  std::vector<Act> acts(hidden_count, hidden_act);
  acts.push_back(out_act);
  return acts;
}

}  // namespace

Autoencoder::Autoencoder(std::size_t obs_dim, std::size_t latent_dim,
                         const std::vector<std::size_t>& hidden)
    : enc_("enc", stack_sizes(obs_dim, hidden, latent_dim),
           stack_acts(hidden.size(), Act::relu, Act::linear)),
      dec_("dec",
           stack_sizes(latent_dim, {hidden.rbegin(), hidden.rend()}, obs_dim),
           stack_acts(hidden.size(), Act::relu, Act::linear)) {}

double Autoencoder::train(const Batch& batch, double lr) {
  double total = 0.0;
  std::size_t updates = 0;
  for (std::size_t i = 0; i < batch.b; ++i) {
    params_.zero_grads();
    double loss = 0.0;
    std::size_t n_valid = 0;
    for (std::size_t t = 0; t < batch.l; ++t)
      if (batch.valid[i][t]) ++n_valid;
    if (n_valid == 0) continue;
    for (std::size_t t = 0; t < batch.l; ++t) {
      if (!batch.valid[i][t]) continue;
      const Vec& s = batch.seq[i][t]->s;
      Mlp::Cache ec, dc;
      Vec z = enc_.forward(params_, s, &ec);
      Vec sh = dec_.forward(params_, z, &dc);
      Vec dy(sh.size());
      for (std::size_t j = 0; j < sh.size(); ++j) {
        double d = sh[j] - s[j];
        loss += d * d;
        dy[j] = 2.0 * d / static_cast<double>(n_valid);
      }
      Vec dz = dec_.backward(params_, dc, dy);
      enc_.backward(params_, ec, dz);
    }
    params_.adam_update(lr);
    total += loss / static_cast<double>(n_valid);
    ++updates;
  }
  return updates ? total / static_cast<double>(updates) : 0.0;
}

ForwardModel::ForwardModel(std::size_t latent_dim, std::size_t action_count,
                           std::size_t hidden_dim,
                           const std::vector<std::size_t>& trunk_hidden,
                           std::size_t feature_dim)
    : latent_dim_(latent_dim),
      action_count_(action_count),
      feature_dim_(feature_dim),
      gru_("gru", latent_dim + action_count, hidden_dim),
      trunk_("trunk",
             stack_sizes(hidden_dim + latent_dim + action_count, trunk_hidden,
                         feature_dim - 1),
             stack_acts(trunk_hidden.size(), Act::tanh, Act::tanh)) {
  if (feature_dim < 2) throw std::invalid_argument("ForwardModel: feature_dim too small");
}

void ForwardModel::init(RandomStream& rng) {
  gru_.init(params_, rng);
  trunk_.init(params_, rng);
  ParamEntry& w = params_.add("W", latent_dim_ + 1, feature_dim_);
  glorot_init(w, rng);
}

struct ForwardModel::StepCache {
  GruCell::Cache gru;
  Mlp::Cache trunk;
  Vec phi;
  Vec h_next;
};

namespace {
Vec concat_za(std::span<const double> z, int a, std::size_t action_count) {
  Vec x(z.begin(), z.end());
  x.resize(z.size() + action_count, 0.0);
  x[z.size() + static_cast<std::size_t>(a)] = 1.0;
  return x;
}
}  // namespace

void ForwardModel::features(std::span<const double> z, int a, std::span<const double> h,
                            Vec& phi, Vec& h_next) const {
  if (a < 0 || static_cast<std::size_t>(a) >= action_count_)
    throw std::invalid_argument("ForwardModel: invalid action id");
  Vec x = concat_za(z, a, action_count_);
  h_next = gru_.step(params_, x, h);
  Vec trunk_in(h_next);
  trunk_in.insert(trunk_in.end(), x.begin(), x.end());
  phi = trunk_.forward(params_, trunk_in);
  phi.push_back(1.0);
}

void ForwardModel::step(std::span<const double> z, int a, std::span<const double> h,
                        Vec& z_next, double& r, Vec& h_next) const {
  Vec phi;
  features(z, a, h, phi, h_next);
  const ParamEntry& w = params_.at("W");
  z_next.assign(latent_dim_, 0.0);
  for (std::size_t i = 0; i < latent_dim_; ++i) {
    const double* row = w.value.data() + i * feature_dim_;
    double s = 0.0;
    for (std::size_t j = 0; j < feature_dim_; ++j) s += row[j] * phi[j];
    z_next[i] = s;
  }
  const double* rrow = w.value.data() + latent_dim_ * feature_dim_;
  double s = 0.0;
  for (std::size_t j = 0; j < feature_dim_; ++j) s += rrow[j] * phi[j];
  r = s;
}

Matrix ForwardModel::output_weights() const {
  const ParamEntry& w = params_.at("W");
  return Matrix(w.rows, w.cols, w.value);
}

void ForwardModel::set_output_weights(const Matrix& w) {
  ParamEntry& e = params_.at("W");
  if (w.rows() != e.rows || w.cols() != e.cols)
    throw std::invalid_argument("set_output_weights: shape mismatch");
  std::copy(w.data(), w.data() + w.size(), e.value.begin());
}

void ForwardModel::compute_latents(const Batch& batch, const Autoencoder& ae,
                                   std::vector<std::vector<Vec>>& zs,
                                   std::vector<std::vector<Vec>>& zs_next) const {
  std::size_t l = batch.l, b = batch.b;
  // Latents under the current (frozen) encoder. Within a sequence the stored
  // transitions are contiguous, so s_{t+1} == s'_t; encode s_0 plus all s'.
  zs.assign(b, {});
  zs_next.assign(b, {});
  for (std::size_t i = 0; i < b; ++i) {
    zs[i].resize(l);
    zs_next[i].resize(l);
    zs[i][0] = ae.encode(batch.seq[i][0]->s);
    for (std::size_t t = 0; t < l; ++t) {
      zs_next[i][t] = ae.encode(batch.seq[i][t]->s_next);
      if (t + 1 < l) zs[i][t + 1] = batch.valid[i][t + 1] ? zs_next[i][t] : zs[i][t];
    }
  }
}

double ForwardModel::run_window(const Batch& batch,
                                const std::vector<std::vector<Vec>>& zs,
                                const std::vector<std::vector<Vec>>& zs_next,
                                std::size_t t0, std::size_t t1,
                                std::vector<Vec>& carried, bool with_grads,
                                bool& any_valid) {
  std::size_t b = batch.b;
  std::size_t hd = gru_.hidden_dim();
  std::size_t n_valid = 0;
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t t = t0; t < t1; ++t)
      if (batch.valid[i][t]) ++n_valid;
  any_valid = n_valid != 0;
  if (!any_valid) return 0.0;
  double inv = 1.0 / static_cast<double>(n_valid);

  ParamEntry& w = params_.at("W");
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<StepCache> caches;
    std::vector<Vec> dys;  // d loss / d (z_next, r) per step
    Vec h = carried[i];
    for (std::size_t t = t0; t < t1 && batch.valid[i][t]; ++t) {
      StepCache c;
      Vec x = concat_za(zs[i][t], batch.seq[i][t]->a, action_count_);
      c.h_next = gru_.step(params_, x, h, &c.gru);
      Vec trunk_in(c.h_next);
      trunk_in.insert(trunk_in.end(), x.begin(), x.end());
      c.phi = trunk_.forward(params_, trunk_in, &c.trunk);
      c.phi.push_back(1.0);
      h = c.h_next;

      Vec dy(latent_dim_ + 1);
      for (std::size_t j = 0; j <= latent_dim_; ++j) {
        const double* row = w.value.data() + j * feature_dim_;
        double s = 0.0;
        for (std::size_t k = 0; k < feature_dim_; ++k) s += row[k] * c.phi[k];
        double target = j < latent_dim_ ? zs_next[i][t][j] : batch.seq[i][t]->r;
        double d = s - target;
        loss += d * d * inv;
        dy[j] = 2.0 * d * inv;
      }
      caches.push_back(std::move(c));
      dys.push_back(std::move(dy));
    }
    carried[i] = h;  // detached across windows
    if (!with_grads) continue;

    // Backward through the window, latest step first.
    Vec dh_carry(hd, 0.0);
    for (std::size_t sdx = caches.size(); sdx-- > 0;) {
      const StepCache& c = caches[sdx];
      const Vec& dy = dys[sdx];
      Vec dphi(feature_dim_, 0.0);
      for (std::size_t j = 0; j <= latent_dim_; ++j) {
        double* wg = w.grad.data() + j * feature_dim_;
        const double* wv = w.value.data() + j * feature_dim_;
        for (std::size_t k = 0; k < feature_dim_; ++k) {
          wg[k] += dy[j] * c.phi[k];
          dphi[k] += dy[j] * wv[k];
        }
      }
      // Constant feature carries no gradient into the trunk.
      Vec dtrunk_out(dphi.begin(), dphi.end() - 1);
      Vec dtrunk_in = trunk_.backward(params_, c.trunk, dtrunk_out);
      Vec dh_next(dtrunk_in.begin(), dtrunk_in.begin() + static_cast<std::ptrdiff_t>(hd));
      for (std::size_t j = 0; j < hd; ++j) dh_next[j] += dh_carry[j];
      Vec dx(gru_.input_dim(), 0.0), dh(hd, 0.0);
      gru_.backward(params_, c.gru, dh_next, dx, dh);
      dh_carry = std::move(dh);
    }
  }
  return loss;
}

double ForwardModel::train(const Batch& batch, const Autoencoder& ae, double lr,
                           std::size_t bptt_horizon) {
  std::size_t l = batch.l;
  std::size_t n_windows = (l + bptt_horizon - 1) / bptt_horizon;

  std::vector<std::vector<Vec>> zs, zs_next;
  compute_latents(batch, ae, zs, zs_next);

  std::vector<Vec> carried(batch.b, Vec(gru_.hidden_dim(), 0.0));
  double total = 0.0;
  std::size_t n_updates = 0;
  for (std::size_t wdx = 0; wdx < n_windows; ++wdx) {
    std::size_t t0 = wdx * bptt_horizon;
    std::size_t t1 = std::min(l, t0 + bptt_horizon);
    params_.zero_grads();
    bool any_valid = false;
    double loss = run_window(batch, zs, zs_next, t0, t1, carried,
                             /*with_grads=*/true, any_valid);
    if (!any_valid) continue;
    params_.adam_update(lr);
    total += loss;
    ++n_updates;
  }
  return n_updates ? total / static_cast<double>(n_updates) : 0.0;
}

double ForwardModel::window_loss(const Batch& batch, const Autoencoder& ae,
                                 std::size_t bptt_horizon, bool with_grads) {
  std::vector<std::vector<Vec>> zs, zs_next;
  compute_latents(batch, ae, zs, zs_next);
  std::vector<Vec> carried(batch.b, Vec(gru_.hidden_dim(), 0.0));
  bool any_valid = false;
  return run_window(batch, zs, zs_next, 0, std::min(batch.l, bptt_horizon), carried,
                    with_grads, any_valid);
}

TerminationModel::TerminationModel(std::size_t latent_dim,
                                   const std::vector<std::size_t>& hidden)
    : net_("term", stack_sizes(latent_dim, hidden, 1),
           stack_acts(hidden.size(), Act::tanh, Act::sigmoid)) {}

double TerminationModel::train(const Batch& batch, const Autoencoder& ae, double lr,
                               std::size_t bptt_horizon) {
  std::size_t l = batch.l, b = batch.b;
  std::size_t n_windows = (l + bptt_horizon - 1) / bptt_horizon;
  double total = 0.0;
  std::size_t n_updates = 0;
  for (std::size_t wdx = 0; wdx < n_windows; ++wdx) {
    std::size_t t0 = wdx * bptt_horizon;
    std::size_t t1 = std::min(l, t0 + bptt_horizon);
    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t t = t0; t < t1; ++t)
        if (batch.valid[i][t]) ++n_valid;
    if (n_valid == 0) continue;
    double inv = 1.0 / static_cast<double>(n_valid);

    params_.zero_grads();
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t t = t0; t < t1; ++t) {
        if (!batch.valid[i][t]) continue;
        Vec z_next = ae.encode(batch.seq[i][t]->s_next);
        Mlp::Cache cache;
        Vec out = net_.forward(params_, z_next, &cache);
        double target = batch.seq[i][t]->terminal ? 1.0 : 0.0;
        double d = out[0] - target;
        loss += d * d * inv;
        Vec dy{2.0 * d * inv};
        net_.backward(params_, cache, dy);
      }
    }
    params_.adam_update(lr);
    total += loss;
    ++n_updates;
  }
  return n_updates ? total / static_cast<double>(n_updates) : 0.0;
}

SampledModel make_sampled(const ForwardModel& fm, const Matrix& w_tilde, std::uint64_t id) {
  SampledModel sm{fm, id};
  sm.model.set_output_weights(w_tilde);
  return sm;
}

}  // namespace psdrl
