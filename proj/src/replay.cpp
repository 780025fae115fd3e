#include "psdrl/replay.hpp"

#include <stdexcept>

namespace psdrl {

namespace {

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("ReplayBuffer: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_vec(std::ostream& os, const Vec& v) {
  write_u64(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Vec read_vec(std::istream& is) {
  Vec v(read_u64(is));
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  return v;
}

void write_episode(std::ostream& os, const Episode& ep) {
  write_u64(os, ep.size());
  for (const Transition& t : ep) {
    write_vec(os, t.s);
    write_u64(os, static_cast<std::uint64_t>(t.a));
    os.write(reinterpret_cast<const char*>(&t.r), sizeof(double));
    write_vec(os, t.s_next);
    write_u64(os, t.terminal ? 1 : 0);
  }
}

Episode read_episode(std::istream& is) {
  Episode ep(read_u64(is));
  for (Transition& t : ep) {
    t.s = read_vec(is);
    t.a = static_cast<int>(read_u64(is));
    is.read(reinterpret_cast<char*>(&t.r), sizeof(double));
    t.s_next = read_vec(is);
    t.terminal = read_u64(is) != 0;
  }
  return ep;
}

}  // namespace

void ReplayBuffer::push(Transition t) {
  bool terminal = t.terminal;
  open_.push_back(std::move(t));
  ++total_;
  if (terminal) {
    episodes_.push_back(std::move(open_));
    open_.clear();
  }
  evict();
}

void ReplayBuffer::evict() {
  while (total_ > capacity_ && !episodes_.empty()) {
    total_ -= episodes_.front().size();
    episodes_.pop_front();
  }
}

std::size_t ReplayBuffer::episode_count() const {
  return episodes_.size() + (open_.empty() ? 0 : 1);
}

const Episode& ReplayBuffer::episode(std::size_t i) const {
  if (i < episodes_.size()) return episodes_[i];
  if (i == episodes_.size() && !open_.empty()) return open_;
  throw std::out_of_range("ReplayBuffer::episode");
}

Batch ReplayBuffer::sample(std::size_t b, std::size_t l, RandomStream& rng) const {
  std::size_t n_ep = episode_count();
  if (n_ep == 0) throw std::runtime_error("ReplayBuffer::sample: empty buffer");
  Batch batch;
  batch.b = b;
  batch.l = l;
  batch.seq.assign(b, {});
  batch.valid.assign(b, {});
  for (std::size_t i = 0; i < b; ++i) {
    const Episode& ep = episode(rng.below(n_ep));
    std::size_t len = ep.size();
    std::size_t start = len <= l ? 0 : rng.below(len - l + 1);
    batch.seq[i].resize(l);
    batch.valid[i].resize(l);
    for (std::size_t t = 0; t < l; ++t) {
      bool ok = start + t < len;
      batch.seq[i][t] = ok ? &ep[start + t] : &ep[len - 1];
      batch.valid[i][t] = ok ? 1 : 0;
    }
  }
  return batch;
}

void ReplayBuffer::save(std::ostream& os) const {
  write_u64(os, capacity_);
  write_u64(os, episodes_.size());
  for (const Episode& ep : episodes_) write_episode(os, ep);
  write_episode(os, open_);
}

ReplayBuffer ReplayBuffer::load(std::istream& is) {
  ReplayBuffer buf(read_u64(is));
  std::uint64_t n = read_u64(is);
  for (std::uint64_t i = 0; i < n; ++i) {
    Episode ep = read_episode(is);
    buf.total_ += ep.size();
    buf.episodes_.push_back(std::move(ep));
  }
  buf.open_ = read_episode(is);
  buf.total_ += buf.open_.size();
  return buf;
}

}  // namespace psdrl
