#pragma once

#include <span>
#include <string>

#include "psdrl/param_store.hpp"
#include "psdrl/rng.hpp"

namespace psdrl {

enum class Act { linear, relu, tanh, sigmoid };

Act act_from_string(const std::string& s);
const char* act_name(Act a);

double act_apply(Act a, double x);
/// Derivative of the activation at pre-activation x with output y.
double act_deriv(Act a, double x, double y);

/// Uniform +-sqrt(6/(fan_in+fan_out)) initialization, biases left at zero.
void glorot_init(ParamEntry& w, RandomStream& rng);

/// y = act(W x + b). `pre` receives the pre-activations for backward.
void dense_forward(const ParamEntry& w, const ParamEntry& b, std::span<const double> x,
                   Act act, Vec& y, Vec& pre);

/// Accumulates dW, db into the entries' grad buffers and returns dL/dx.
Vec dense_backward(ParamEntry& w, ParamEntry& b, std::span<const double> x,
                   const Vec& pre, const Vec& y, Act act, std::span<const double> dy);

/// Gated recurrent unit cell:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   c = tanh(Wh x + Uh (r.h) + bh)
///   h' = (1-z).h + z.c
/// Parameters live under "<prefix>.Wz" etc. in a ParamStore.
class GruCell {
 public:
  GruCell() = default;
  GruCell(std::string prefix, std::size_t input_dim, std::size_t hidden_dim)
      : prefix_(std::move(prefix)), input_dim_(input_dim), hidden_dim_(hidden_dim) {}

  void init(ParamStore& ps, RandomStream& rng) const;

  struct Cache {
    Vec x, h, z, r, c, rh;
  };

  Vec step(const ParamStore& ps, std::span<const double> x, std::span<const double> h,
           Cache* cache = nullptr) const;

  /// Given dL/dh' and the forward cache, accumulates parameter grads and adds
  /// dL/dx, dL/dh into dx and dh (which must be pre-sized).
  void backward(ParamStore& ps, const Cache& cache, std::span<const double> dh_next,
                Vec& dx, Vec& dh) const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

 private:
  std::string prefix_;
  std::size_t input_dim_ = 0, hidden_dim_ = 0;
};

/// Mean over all elements of squared differences; grads 2(pred-target)/count.
double mse_loss(std::span<const double> pred, std::span<const double> target,
                Vec& grad_out);

}  // namespace psdrl
