#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <vector>

#include "psdrl/matrix.hpp"
#include "psdrl/rng.hpp"

namespace psdrl {

/// One environment step: (s, a, r, s', terminal).
struct Transition {
  Vec s;
  int a = 0;
  double r = 0.0;
  Vec s_next;
  bool terminal = false;
};

using Episode = std::vector<Transition>;

/// B sequences of length L sampled from the buffer. Sequences shorter than L
/// are padded with repeats of their last transition; `valid` masks padding out
/// of every loss.
struct Batch {
  std::size_t b = 0, l = 0;
  std::vector<std::vector<const Transition*>> seq;  // [b][l]
  std::vector<std::vector<std::uint8_t>> valid;     // [b][l]
};

/// Episode-structured FIFO buffer with a capacity in transitions. When the
/// total exceeds capacity, oldest whole closed episodes are evicted until it
/// fits; the episode currently being collected is never evicted.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(Transition t);

  std::size_t total_transitions() const { return total_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t episode_count() const;  // includes the open episode if non-empty
  bool has_closed_episode() const { return !episodes_.empty(); }
  bool empty() const { return episode_count() == 0; }

  const Episode& episode(std::size_t i) const;

  /// B episodes uniformly with replacement; per episode a uniform start index
  /// (forced to 0 when the episode is shorter than L, otherwise chosen so the
  /// window of L transitions fits).
  Batch sample(std::size_t b, std::size_t l, RandomStream& rng) const;

  void save(std::ostream& os) const;
  static ReplayBuffer load(std::istream& is);

 private:
  void evict();

  std::size_t capacity_;
  std::size_t total_ = 0;
  std::deque<Episode> episodes_;  // closed episodes, insertion order
  Episode open_;                  // episode in progress
};

}  // namespace psdrl
