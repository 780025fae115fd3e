#pragma once

#include <span>
#include <string>
#include <vector>

#include "psdrl/layers.hpp"

namespace psdrl {

/// Feedforward stack of dense layers over a ParamStore. Layer i maps
/// sizes[i] -> sizes[i+1] with activation acts[i]; parameters live under
/// "<prefix>.<i>.W" / "<prefix>.<i>.b".
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string prefix, std::vector<std::size_t> sizes, std::vector<Act> acts);

  void init(ParamStore& ps, RandomStream& rng) const;

  struct Cache {
    std::vector<Vec> outs;  // outs[0] = input copy, outs[i] = layer i output
    std::vector<Vec> pres;
  };

  Vec forward(const ParamStore& ps, std::span<const double> x, Cache* cache = nullptr) const;

  /// Accumulates grads for every layer; returns dL/dinput.
  Vec backward(ParamStore& ps, const Cache& cache, std::span<const double> dy) const;

  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t layer_count() const { return acts_.size(); }

 private:
  std::string layer_name(std::size_t i, const char* kind) const;

  std::string prefix_;
  std::vector<std::size_t> sizes_;
  std::vector<Act> acts_;
};

}  // namespace psdrl
