#include "psdrl/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace psdrl {

Act act_from_string(const std::string& s) {
  if (s == "linear") return Act::linear;
  if (s == "relu") return Act::relu;
  if (s == "tanh") return Act::tanh;
  if (s == "sigmoid") return Act::sigmoid;
  throw std::invalid_argument("unknown activation: " + s);
}

const char* act_name(Act a) {
  switch (a) {
    case Act::linear: return "linear";
    case Act::relu: return "relu";
    case Act::tanh: return "tanh";
    case Act::sigmoid: return "sigmoid";
  }
  return "?";
}

double act_apply(Act a, double x) {
  switch (a) {
    case Act::linear: return x;
    case Act::relu: return x > 0.0 ? x : 0.0;
    case Act::tanh: return std::tanh(x);
    case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double act_deriv(Act a, double x, double y) {
  switch (a) {
    case Act::linear: return 1.0;
    case Act::relu: return x > 0.0 ? 1.0 : 0.0;
    case Act::tanh: return 1.0 - y * y;
    case Act::sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

void glorot_init(ParamEntry& w, RandomStream& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (double& v : w.value) v = (2.0 * rng.uniform() - 1.0) * bound;
}

void dense_forward(const ParamEntry& w, const ParamEntry& b, std::span<const double> x,
                   Act act, Vec& y, Vec& pre) {
  if (w.cols != x.size() || b.size() != w.rows)
    throw std::invalid_argument("dense_forward: shape mismatch");
  std::size_t out = w.rows, in = w.cols;
  pre.assign(out, 0.0);
  y.assign(out, 0.0);
  for (std::size_t i = 0; i < out; ++i) {
    double s = b.value[i];
    const double* row = w.value.data() + i * in;
    for (std::size_t j = 0; j < in; ++j) s += row[j] * x[j];
    pre[i] = s;
    y[i] = act_apply(act, s);
  }
}

Vec dense_backward(ParamEntry& w, ParamEntry& b, std::span<const double> x,
                   const Vec& pre, const Vec& y, Act act, std::span<const double> dy) {
  std::size_t out = w.rows, in = w.cols;
  if (dy.size() != out) throw std::invalid_argument("dense_backward: shape mismatch");
  Vec dx(in, 0.0);
  for (std::size_t i = 0; i < out; ++i) {
    double da = dy[i] * act_deriv(act, pre[i], y[i]);
    b.grad[i] += da;
    double* wg = w.grad.data() + i * in;
    const double* wv = w.value.data() + i * in;
    for (std::size_t j = 0; j < in; ++j) {
      wg[j] += da * x[j];
      dx[j] += da * wv[j];
    }
  }
  return dx;
}

void GruCell::init(ParamStore& ps, RandomStream& rng) const {
  for (const char* gate : {"z", "r", "h"}) {
    ParamEntry& w = ps.add(prefix_ + ".W" + gate, hidden_dim_, input_dim_);
    glorot_init(w, rng);
    ParamEntry& u = ps.add(prefix_ + ".U" + gate, hidden_dim_, hidden_dim_);
    glorot_init(u, rng);
    ps.add(prefix_ + ".b" + gate, hidden_dim_, 1);
  }
}

namespace {
inline void gemv_acc(const Vec& w, std::size_t rows, std::size_t cols,
                     std::span<const double> x, Vec& out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w.data() + i * cols;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
    out[i] += s;
  }
}
inline void gemv_t_acc(const Vec& w, std::size_t rows, std::size_t cols,
                       std::span<const double> d, Vec& out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += row[j] * d[i];
  }
}
inline void outer_acc(Vec& grad, std::size_t rows, std::size_t cols,
                      std::span<const double> d, std::span<const double> x) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = grad.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += d[i] * x[j];
  }
}
}  // namespace

Vec GruCell::step(const ParamStore& ps, std::span<const double> x,
                  std::span<const double> h, Cache* cache) const {
  if (x.size() != input_dim_ || h.size() != hidden_dim_)
    throw std::invalid_argument("GruCell::step: shape mismatch");
  const ParamEntry& wz = ps.at(prefix_ + ".Wz");
  const ParamEntry& uz = ps.at(prefix_ + ".Uz");
  const ParamEntry& bz = ps.at(prefix_ + ".bz");
  const ParamEntry& wr = ps.at(prefix_ + ".Wr");
  const ParamEntry& ur = ps.at(prefix_ + ".Ur");
  const ParamEntry& br = ps.at(prefix_ + ".br");
  const ParamEntry& wh = ps.at(prefix_ + ".Wh");
  const ParamEntry& uh = ps.at(prefix_ + ".Uh");
  const ParamEntry& bh = ps.at(prefix_ + ".bh");

  std::size_t n = hidden_dim_;
  Vec z(bz.value), r(br.value), c(bh.value);
  gemv_acc(wz.value, n, input_dim_, x, z);
  gemv_acc(uz.value, n, n, h, z);
  gemv_acc(wr.value, n, input_dim_, x, r);
  gemv_acc(ur.value, n, n, h, r);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = act_apply(Act::sigmoid, z[i]);
    r[i] = act_apply(Act::sigmoid, r[i]);
  }
  Vec rh(n);
  for (std::size_t i = 0; i < n; ++i) rh[i] = r[i] * h[i];
  gemv_acc(wh.value, n, input_dim_, x, c);
  gemv_acc(uh.value, n, n, rh, c);
  Vec hn(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::tanh(c[i]);
    hn[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h.assign(h.begin(), h.end());
    cache->z = z;
    cache->r = r;
    cache->c = c;
    cache->rh = rh;
  }
  return hn;
}

void GruCell::backward(ParamStore& ps, const Cache& cache,
                       std::span<const double> dh_next, Vec& dx, Vec& dh) const {
  std::size_t n = hidden_dim_;
  ParamEntry& wz = ps.at(prefix_ + ".Wz");
  ParamEntry& uz = ps.at(prefix_ + ".Uz");
  ParamEntry& bz = ps.at(prefix_ + ".bz");
  ParamEntry& wr = ps.at(prefix_ + ".Wr");
  ParamEntry& ur = ps.at(prefix_ + ".Ur");
  ParamEntry& br = ps.at(prefix_ + ".br");
  ParamEntry& wh = ps.at(prefix_ + ".Wh");
  ParamEntry& uh = ps.at(prefix_ + ".Uh");
  ParamEntry& bh = ps.at(prefix_ + ".bh");

  Vec dc(n), dz(n);
  for (std::size_t i = 0; i < n; ++i) {
    double g = dh_next[i];
    dc[i] = g * cache.z[i];
    dz[i] = g * (cache.c[i] - cache.h[i]);
    dh[i] += g * (1.0 - cache.z[i]);
  }
  // Candidate pre-activation.
  Vec dac(n);
  for (std::size_t i = 0; i < n; ++i) dac[i] = dc[i] * (1.0 - cache.c[i] * cache.c[i]);
  outer_acc(wh.grad, n, input_dim_, dac, cache.x);
  outer_acc(uh.grad, n, n, dac, cache.rh);
  for (std::size_t i = 0; i < n; ++i) bh.grad[i] += dac[i];
  Vec drh(n, 0.0);
  gemv_t_acc(uh.value, n, n, dac, drh);
  gemv_t_acc(wh.value, n, input_dim_, dac, dx);
  Vec dr(n);
  for (std::size_t i = 0; i < n; ++i) {
    dr[i] = drh[i] * cache.h[i];
    dh[i] += drh[i] * cache.r[i];
  }
  // Gate pre-activations.
  Vec daz(n), dar(n);
  for (std::size_t i = 0; i < n; ++i) {
    daz[i] = dz[i] * cache.z[i] * (1.0 - cache.z[i]);
    dar[i] = dr[i] * cache.r[i] * (1.0 - cache.r[i]);
  }
  outer_acc(wz.grad, n, input_dim_, daz, cache.x);
  outer_acc(uz.grad, n, n, daz, cache.h);
  for (std::size_t i = 0; i < n; ++i) bz.grad[i] += daz[i];
  outer_acc(wr.grad, n, input_dim_, dar, cache.x);
  outer_acc(ur.grad, n, n, dar, cache.h);
  for (std::size_t i = 0; i < n; ++i) br.grad[i] += dar[i];
  gemv_t_acc(wz.value, n, input_dim_, daz, dx);
  gemv_t_acc(uz.value, n, n, daz, dh);
  gemv_t_acc(wr.value, n, input_dim_, dar, dx);
  gemv_t_acc(ur.value, n, n, dar, dh);
}

double mse_loss(std::span<const double> pred, std::span<const double> target,
                Vec& grad_out) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse_loss: shape mismatch");
  std::size_t n = pred.size();
  grad_out.assign(n, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = pred[i] - target[i];
    loss += d * d;
    grad_out[i] = 2.0 * d / static_cast<double>(n);
  }
  return loss / static_cast<double>(n);
}

}  // namespace psdrl
