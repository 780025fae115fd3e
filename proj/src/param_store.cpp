#include "psdrl/param_store.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace psdrl {

namespace {

constexpr char kMagic[8] = {'P', 'S', 'D', 'R', 'L', 'P', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("ParamStore: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& os, const Vec& v) {
  // Little-endian platform assumed (checked at startup is overkill; x86 only).
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& is, Vec& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("ParamStore: truncated stream");
}

}  // namespace

ParamEntry& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  if (entries_.count(name)) throw std::invalid_argument("ParamStore: duplicate entry " + name);
  ParamEntry e;
  e.rows = rows;
  e.cols = cols;
  e.value.assign(rows * cols, 0.0);
  e.grad.assign(rows * cols, 0.0);
  e.adam_m.assign(rows * cols, 0.0);
  e.adam_v.assign(rows * cols, 0.0);
  return entries_.emplace(name, std::move(e)).first->second;
}

ParamEntry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("ParamStore: no entry " + name);
  return it->second;
}

const ParamEntry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("ParamStore: no entry " + name);
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, e] : entries_) std::fill(e.grad.begin(), e.grad.end(), 0.0);
}

void ParamStore::adam_update(double lr, double beta1, double beta2, double eps) {
  ++adam_step_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_step_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_step_));
  for (auto& [name, e] : entries_) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      double g = e.grad[i];
      e.adam_m[i] = beta1 * e.adam_m[i] + (1.0 - beta1) * g;
      e.adam_v[i] = beta2 * e.adam_v[i] + (1.0 - beta2) * g * g;
      double mhat = e.adam_m[i] / bc1;
      double vhat = e.adam_v[i] / bc2;
      e.value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    std::fill(e.grad.begin(), e.grad.end(), 0.0);
  }
}

std::size_t ParamStore::param_count() const {
  std::size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

void ParamStore::save(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  write_u64(os, kVersion);
  write_u64(os, static_cast<std::uint64_t>(adam_step_));
  write_u64(os, entries_.size());
  for (const auto& [name, e] : entries_) {
    write_u64(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(os, e.rows);
    write_u64(os, e.cols);
    write_doubles(os, e.value);
    write_doubles(os, e.adam_m);
    write_doubles(os, e.adam_v);
  }
}

ParamStore ParamStore::load(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("ParamStore: bad magic header");
  std::uint64_t version = read_u64(is);
  if (version != kVersion) throw std::runtime_error("ParamStore: unsupported format version");
  ParamStore ps;
  ps.adam_step_ = static_cast<std::int64_t>(read_u64(is));
  std::uint64_t count = read_u64(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t len = read_u64(is);
    std::string name(len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(len));
    std::uint64_t rows = read_u64(is), cols = read_u64(is);
    ParamEntry& e = ps.add(name, rows, cols);
    read_doubles(is, e.value);
    read_doubles(is, e.adam_m);
    read_doubles(is, e.adam_v);
  }
  return ps;
}

}  // namespace psdrl
