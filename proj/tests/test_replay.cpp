#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "psdrl/replay.hpp"

using namespace psdrl;

namespace {

Transition make_t(double tag, bool terminal = false) {
  return Transition{Vec{tag}, 0, tag, Vec{tag + 0.5}, terminal};
}

void push_episode(ReplayBuffer& buf, double base, std::size_t len) {
  for (std::size_t t = 0; t < len; ++t)
    buf.push(make_t(base + static_cast<double>(t), t + 1 == len));
}

}  // namespace

TEST_CASE("whole closed episodes are evicted oldest-first") {
  ReplayBuffer buf(5);
  push_episode(buf, 0.0, 3);
  CHECK(buf.total_transitions() == 3);
  CHECK(buf.episode_count() == 1);
  push_episode(buf, 10.0, 3);
  // 6 > 5: the first episode goes as a whole.
  CHECK(buf.total_transitions() == 3);
  CHECK(buf.episode_count() == 1);
  CHECK(buf.episode(0)[0].r == 10.0);
}

TEST_CASE("the open episode is never evicted") {
  ReplayBuffer buf(4);
  push_episode(buf, 0.0, 2);
  for (int t = 0; t < 6; ++t) buf.push(make_t(100.0 + t, false));  // open, over capacity
  CHECK(buf.episode_count() == 1);       // closed one evicted, open remains
  CHECK(buf.total_transitions() == 6);   // open episode may exceed capacity
  CHECK(buf.episode(0)[0].r == 100.0);
}

TEST_CASE("episode boundaries are preserved exactly") {
  ReplayBuffer buf(100);
  push_episode(buf, 0.0, 4);
  push_episode(buf, 10.0, 2);
  buf.push(make_t(20.0, false));  // open episode of 1
  REQUIRE(buf.episode_count() == 3);
  CHECK(buf.episode(0).size() == 4);
  CHECK(buf.episode(1).size() == 2);
  CHECK(buf.episode(2).size() == 1);
  CHECK(buf.episode(0).back().terminal);
  CHECK(buf.episode(1).back().terminal);
  CHECK(!buf.episode(2).back().terminal);
  // Stored transitions keep their own payloads untouched.
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(buf.episode(0)[t].s == Vec{static_cast<double>(t)});
    CHECK(buf.episode(0)[t].s_next == Vec{static_cast<double>(t) + 0.5});
  }
}

TEST_CASE("short episodes are padded with their last transition and masked") {
  ReplayBuffer buf(100);
  push_episode(buf, 0.0, 3);  // single episode shorter than L = 5
  RandomStream rng(1, 0);
  Batch b = buf.sample(2, 5, rng);
  REQUIRE(b.b == 2);
  REQUIRE(b.l == 5);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(b.valid[i][t] == 1);
      CHECK(b.seq[i][t]->r == static_cast<double>(t));
    }
    for (std::size_t t = 3; t < 5; ++t) {
      CHECK(b.valid[i][t] == 0);
      CHECK(b.seq[i][t]->r == 2.0);  // repeat of the last real transition
    }
  }
}

TEST_CASE("hand-checked masked arithmetic over a 3-step episode at L = 5") {
  // Mean of r over valid entries must use n_valid = 3, not L = 5.
  ReplayBuffer buf(100);
  push_episode(buf, 1.0, 3);  // rewards 1, 2, 3
  RandomStream rng(2, 0);
  Batch b = buf.sample(1, 5, rng);
  double sum = 0.0;
  std::size_t n_valid = 0;
  for (std::size_t t = 0; t < 5; ++t)
    if (b.valid[0][t]) {
      sum += b.seq[0][t]->r;
      ++n_valid;
    }
  CHECK(n_valid == 3);
  CHECK(sum / static_cast<double>(n_valid) == doctest::Approx(2.0));
}

TEST_CASE("long episodes always yield a full window inside bounds") {
  ReplayBuffer buf(1000);
  push_episode(buf, 0.0, 20);
  RandomStream rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Batch b = buf.sample(1, 5, rng);
    double first = b.seq[0][0]->r;
    CHECK(first >= 0.0);
    CHECK(first <= 15.0);  // start index in [0, len - L]
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(b.valid[0][t] == 1);
      CHECK(b.seq[0][t]->r == first + static_cast<double>(t));
    }
  }
}

TEST_CASE("sampling draws uniformly over episodes") {
  ReplayBuffer buf(1000);
  push_episode(buf, 0.0, 2);
  push_episode(buf, 100.0, 2);
  push_episode(buf, 200.0, 2);
  RandomStream rng(4, 0);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 3000; ++i) {
    Batch b = buf.sample(1, 2, rng);
    counts[static_cast<int>(b.seq[0][0]->r / 100.0)]++;
  }
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("save/load round-trips closed and open episodes") {
  ReplayBuffer buf(50);
  push_episode(buf, 0.0, 3);
  buf.push(make_t(9.0, false));
  std::stringstream ss;
  buf.save(ss);
  ReplayBuffer buf2 = ReplayBuffer::load(ss);
  CHECK(buf2.capacity() == 50);
  CHECK(buf2.total_transitions() == 4);
  REQUIRE(buf2.episode_count() == 2);
  CHECK(buf2.episode(0)[2].terminal);
  CHECK(buf2.episode(1)[0].r == 9.0);
  CHECK(buf2.episode(1)[0].s == Vec{9.0});
  // The restored open episode still closes correctly.
  buf2.push(make_t(9.5, true));
  CHECK(buf2.has_closed_episode());
  CHECK(buf2.episode_count() == 2);
}
