#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "psdrl/matrix.hpp"

namespace psdrl {

/// One named parameter block: values plus gradient and Adam moment buffers,
/// all shape-identical.
struct ParamEntry {
  std::size_t rows = 0, cols = 0;
  Vec value, grad, adam_m, adam_v;

  std::size_t size() const { return rows * cols; }
  double& v(std::size_t i, std::size_t j) { return value[i * cols + j]; }
  double v(std::size_t i, std::size_t j) const { return value[i * cols + j]; }
  double& g(std::size_t i, std::size_t j) { return grad[i * cols + j]; }
};

/// Flat container for all trainable parameters of one network, with a shared
/// Adam step counter. Copying a ParamStore snapshots it.
class ParamStore {
 public:
  ParamEntry& add(const std::string& name, std::size_t rows, std::size_t cols);
  ParamEntry& at(const std::string& name);
  const ParamEntry& at(const std::string& name) const;
  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  void zero_grads();

  /// Standard bias-corrected Adam step over every entry; grads zeroed after.
  void adam_update(double lr, double beta1 = 0.9, double beta2 = 0.999,
                   double eps = 1e-8);

  std::int64_t adam_step() const { return adam_step_; }
  std::size_t param_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Versioned binary container: magic, format version, Adam step, then per
  /// entry (name length, name bytes, shape, little-endian 64-bit reals for
  /// values and both Adam moments).
  void save(std::ostream& os) const;
  static ParamStore load(std::istream& is);

 private:
  std::map<std::string, ParamEntry> entries_;  // ordered: deterministic walks
  std::int64_t adam_step_ = 0;
};

}  // namespace psdrl
