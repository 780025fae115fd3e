#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>

namespace psdrl {

/// Counter-based deterministic random stream. A (seed, stream-id) pair fixes
/// the whole sequence; the generator is a splitmix-style 64-bit mix over an
/// incrementing counter, so state is just three integers. Normal variates come
/// from Box-Muller over the uniform output (second variate cached).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n), modulo bias rejected.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t lim = ~0ULL - ~0ULL % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= lim);
    return x % n;
  }

  /// Child stream with a fresh stream-id drawn from this stream. Parent and
  /// child sequences are independent; splitting advances the parent.
  RandomStream split() { return RandomStream(seed_, next_u64()); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  void save(std::ostream& os) const {
    write_u64(os, seed_);
    write_u64(os, stream_);
    write_u64(os, counter_);
    write_u64(os, has_cached_ ? 1 : 0);
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(cached_));
    __builtin_memcpy(&bits, &cached_, sizeof(bits));
    write_u64(os, bits);
  }
  static RandomStream load(std::istream& is) {
    std::uint64_t seed = read_u64(is), stream = read_u64(is);
    RandomStream r(seed, stream);
    r.counter_ = read_u64(is);
    r.has_cached_ = read_u64(is) != 0;
    std::uint64_t bits = read_u64(is);
    __builtin_memcpy(&r.cached_, &bits, sizeof(bits));
    return r;
  }

 private:
  static std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  }
  static void write_u64(std::ostream& os, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, 8);
  }
  static std::uint64_t read_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }

  std::uint64_t seed_, stream_, key_;
  std::uint64_t counter_ = 0;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace psdrl
