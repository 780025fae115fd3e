#pragma once

// Shared finite-difference gradient oracle for the tests: perturb every scalar
// parameter with a central difference and compare against the analytic grads
// already accumulated in the store.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "psdrl/param_store.hpp"

namespace psdrl_test {

struct FdReport {
  double max_rel = 0.0;
  std::string worst;
};

// `loss` must recompute the scalar loss from the store's current values
// without touching grads. `analytic` maps entry name -> grad buffer captured
// after one analytic backward pass.
inline FdReport fd_compare(psdrl::ParamStore& ps,
                           const std::map<std::string, psdrl::Vec>& analytic,
                           const std::function<double()>& loss, double h = 1e-5) {
  FdReport rep;
  for (auto& [name, entry] : ps) {
    const psdrl::Vec& g = analytic.at(name);
    for (std::size_t i = 0; i < entry.value.size(); ++i) {
      double orig = entry.value[i];
      entry.value[i] = orig + h;
      double lp = loss();
      entry.value[i] = orig - h;
      double lm = loss();
      entry.value[i] = orig;
      double fd = (lp - lm) / (2.0 * h);
      double denom = std::max({1e-6, std::abs(fd), std::abs(g[i])});
      double rel = std::abs(fd - g[i]) / denom;
      if (rel > rep.max_rel) {
        rep.max_rel = rel;
        rep.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return rep;
}

inline std::map<std::string, psdrl::Vec> capture_grads(const psdrl::ParamStore& ps) {
  std::map<std::string, psdrl::Vec> out;
  for (const auto& [name, entry] : ps) out[name] = entry.grad;
  return out;
}

}  // namespace psdrl_test
