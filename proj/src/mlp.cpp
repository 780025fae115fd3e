#include "psdrl/mlp.hpp"

#include <stdexcept>

namespace psdrl {

Mlp::Mlp(std::string prefix, std::vector<std::size_t> sizes, std::vector<Act> acts)
    : prefix_(std::move(prefix)), sizes_(std::move(sizes)), acts_(std::move(acts)) {
  if (sizes_.size() < 2 || acts_.size() != sizes_.size() - 1)
    throw std::invalid_argument("Mlp: sizes/acts mismatch");
}

std::string Mlp::layer_name(std::size_t i, const char* kind) const {
  return prefix_ + "." + std::to_string(i) + "." + kind;
}

void Mlp::init(ParamStore& ps, RandomStream& rng) const {
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    ParamEntry& w = ps.add(layer_name(i, "W"), sizes_[i + 1], sizes_[i]);
    glorot_init(w, rng);
    ps.add(layer_name(i, "b"), sizes_[i + 1], 1);
  }
}

Vec Mlp::forward(const ParamStore& ps, std::span<const double> x, Cache* cache) const {
  if (x.size() != sizes_.front()) throw std::invalid_argument("Mlp::forward: shape mismatch");
  Vec cur(x.begin(), x.end());
  if (cache) {
    cache->outs.assign(1, cur);
    cache->pres.clear();
  }
  for (std::size_t i = 0; i < acts_.size(); ++i) {
    Vec y, pre;
    dense_forward(ps.at(layer_name(i, "W")), ps.at(layer_name(i, "b")), cur, acts_[i], y, pre);
    cur = std::move(y);
    if (cache) {
      cache->outs.push_back(cur);
      cache->pres.push_back(std::move(pre));
    }
  }
  return cur;
}

Vec Mlp::backward(ParamStore& ps, const Cache& cache, std::span<const double> dy) const {
  Vec d(dy.begin(), dy.end());
  for (std::size_t ii = acts_.size(); ii-- > 0;) {
    d = dense_backward(ps.at(layer_name(ii, "W")), ps.at(layer_name(ii, "b")),
                       cache.outs[ii], cache.pres[ii], cache.outs[ii + 1], acts_[ii], d);
  }
  return d;
}

}  // namespace psdrl
