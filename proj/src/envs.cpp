#include "psdrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psdrl {

ValueIterationResult exact_value_iteration(const TabularMdp& mdp, double gamma,
                                           double tol, std::size_t max_iter) {
  if (mdp.n_states > 10000)
    throw std::invalid_argument("exact_value_iteration: state space too large");
  ValueIterationResult res;
  res.v.assign(mdp.n_states, 0.0);
  Vec next_v(mdp.n_states, 0.0);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    double delta = 0.0;
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
      double best = -1e300;
      for (std::size_t a = 0; a < mdp.n_actions; ++a) {
        std::size_t i = mdp.idx(s, a);
        double q = mdp.reward[i] +
                   (mdp.terminal[i] ? 0.0 : gamma * res.v[mdp.next[i]]);
        best = std::max(best, q);
      }
      next_v[s] = best;
      delta = std::max(delta, std::abs(best - res.v[s]));
    }
    res.v.swap(next_v);
    res.residual = delta;
    if (delta < tol) break;
  }
  res.pi.assign(mdp.n_states, 0);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double best = -1e300;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      std::size_t i = mdp.idx(s, a);
      double q = mdp.reward[i] + (mdp.terminal[i] ? 0.0 : gamma * res.v[mdp.next[i]]);
      if (q > best) {
        best = q;
        res.pi[s] = static_cast<int>(a);
      }
    }
  }
  return res;
}

namespace {

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}
std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("Env: truncated state stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

class DeepSeaChain final : public Env {
 public:
  explicit DeepSeaChain(std::size_t n) : n_(n) {
    spec_.name = "deep_sea";
    spec_.obs_dim = n * n;
    spec_.action_count = 2;  // 0 = left, 1 = right
    spec_.max_episode_len = n;
    spec_.enumerable = true;
    spec_.obs_rows = n;
    spec_.obs_cols = n;
  }

  const EnvSpec& spec() const override { return spec_; }

  Vec reset() override {
    row_ = 0;
    col_ = 0;
    done_ = false;
    return obs();
  }

  void step(int a, double& r, Vec& s_next, bool& terminal) override {
    if (done_) throw std::logic_error("DeepSeaChain: step after termination");
    if (a < 0 || a > 1) throw std::invalid_argument("DeepSeaChain: bad action");
    r = 0.0;
    if (a == 1) {
      r -= 0.01 / static_cast<double>(n_);
      if (row_ == n_ - 1 && col_ == n_ - 1) r += 1.0;
      ++col_;
    } else {
      col_ = col_ > 0 ? col_ - 1 : 0;
    }
    ++row_;
    done_ = row_ == n_;
    terminal = done_;
    s_next = obs();
  }

  TabularMdp tabular() const override {
    // States: (row, col) with col <= row; absorbing states folded into
    // terminal transition flags.
    TabularMdp m;
    m.n_actions = 2;
    m.n_states = n_ * (n_ + 1) / 2;
    m.initial = 0;
    m.next.assign(m.n_states * 2, 0);
    m.reward.assign(m.n_states * 2, 0.0);
    m.terminal.assign(m.n_states * 2, 0);
    auto sidx = [&](std::size_t row, std::size_t col) { return row * (row + 1) / 2 + col; };
    for (std::size_t row = 0; row < n_; ++row) {
      for (std::size_t col = 0; col <= row; ++col) {
        std::size_t s = sidx(row, col);
        bool last = row == n_ - 1;
        // left
        std::size_t cl = col > 0 ? col - 1 : 0;
        m.next[m.idx(s, 0)] = last ? 0 : sidx(row + 1, cl);
        m.terminal[m.idx(s, 0)] = last;
        // right
        double r = -0.01 / static_cast<double>(n_);
        if (last && col == n_ - 1) r += 1.0;
        m.next[m.idx(s, 1)] = last ? 0 : sidx(row + 1, col + 1);
        m.reward[m.idx(s, 1)] = r;
        m.terminal[m.idx(s, 1)] = last;
      }
    }
    return m;
  }

  void save_state(std::ostream& os) const override {
    write_u64(os, row_);
    write_u64(os, col_);
    write_u64(os, done_ ? 1 : 0);
  }
  void load_state(std::istream& is) override {
    row_ = read_u64(is);
    col_ = read_u64(is);
    done_ = read_u64(is) != 0;
  }
  std::unique_ptr<Env> clone_fresh() const override {
    return std::make_unique<DeepSeaChain>(n_);
  }

 private:
  Vec obs() const {
    Vec s(n_ * n_, 0.0);
    if (!done_) s[row_ * n_ + col_] = 1.0;
    return s;
  }

  std::size_t n_;
  EnvSpec spec_;
  std::size_t row_ = 0, col_ = 0;
  bool done_ = true;
};

/// Shared machinery for the wall-grid environments.
class GridEnv : public Env {
 public:
  const EnvSpec& spec() const override { return spec_; }

  Vec reset() override {
    r_ = start_r_;
    c_ = start_c_;
    steps_ = 0;
    done_ = false;
    return obs();
  }

  void step(int a, double& r, Vec& s_next, bool& terminal) override {
    if (done_) throw std::logic_error(spec_.name + ": step after termination");
    if (a < 0 || a >= 4) throw std::invalid_argument(spec_.name + ": bad action");
    static const int dr[4] = {-1, 1, 0, 0};
    static const int dc[4] = {0, 0, -1, 1};
    int nr = static_cast<int>(r_) + dr[a];
    int nc = static_cast<int>(c_) + dc[a];
    if (!wall(nr, nc)) {
      r_ = static_cast<std::size_t>(nr);
      c_ = static_cast<std::size_t>(nc);
    }
    ++steps_;
    r = cell_reward(r_, c_);
    bool goal = r != 0.0;
    done_ = goal || steps_ >= spec_.max_episode_len;
    terminal = done_;
    s_next = obs();
  }

  TabularMdp tabular() const override {
    // Positions only; the episode-length cutoff is not part of the dynamics.
    std::vector<std::size_t> cell_to_state(rows_ * cols_, SIZE_MAX);
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (!wall(static_cast<int>(r), static_cast<int>(c))) {
          cell_to_state[r * cols_ + c] = cells.size();
          cells.emplace_back(r, c);
        }
    TabularMdp m;
    m.n_actions = 4;
    m.n_states = cells.size();
    m.initial = cell_to_state[start_r_ * cols_ + start_c_];
    m.next.assign(m.n_states * 4, 0);
    m.reward.assign(m.n_states * 4, 0.0);
    m.terminal.assign(m.n_states * 4, 0);
    static const int dr[4] = {-1, 1, 0, 0};
    static const int dc[4] = {0, 0, -1, 1};
    for (std::size_t s = 0; s < m.n_states; ++s) {
      auto [r, c] = cells[s];
      for (std::size_t a = 0; a < 4; ++a) {
        int nr = static_cast<int>(r) + dr[a];
        int nc = static_cast<int>(c) + dc[a];
        std::size_t tr = r, tc = c;
        if (!wall(nr, nc)) {
          tr = static_cast<std::size_t>(nr);
          tc = static_cast<std::size_t>(nc);
        }
        std::size_t i = m.idx(s, a);
        m.next[i] = cell_to_state[tr * cols_ + tc];
        m.reward[i] = cell_reward(tr, tc);
        m.terminal[i] = m.reward[i] != 0.0;
      }
    }
    return m;
  }

  void save_state(std::ostream& os) const override {
    write_u64(os, r_);
    write_u64(os, c_);
    write_u64(os, steps_);
    write_u64(os, done_ ? 1 : 0);
  }
  void load_state(std::istream& is) override {
    r_ = read_u64(is);
    c_ = read_u64(is);
    steps_ = read_u64(is);
    done_ = read_u64(is) != 0;
  }

 protected:
  virtual bool wall(int r, int c) const = 0;
  virtual double cell_reward(std::size_t r, std::size_t c) const = 0;
  /// Grayscale values of static marker cells (goals); agent pixel overrides.
  virtual double cell_marker(std::size_t r, std::size_t c) const = 0;

  Vec obs() const {
    Vec s(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) s[r * cols_ + c] = cell_marker(r, c);
    s[r_ * cols_ + c_] = 1.0;
    return s;
  }

  EnvSpec spec_;
  std::size_t rows_ = 0, cols_ = 0;
  std::size_t start_r_ = 1, start_c_ = 1;
  std::size_t r_ = 1, c_ = 1, steps_ = 0;
  bool done_ = true;
};

class GridMaze final : public GridEnv {
 public:
  GridMaze() {
    rows_ = 12;
    cols_ = 12;
    spec_.name = "grid_maze";
    spec_.obs_dim = rows_ * cols_;
    spec_.action_count = 4;
    spec_.max_episode_len = 100;
    spec_.enumerable = true;
    spec_.obs_rows = rows_;
    spec_.obs_cols = cols_;
  }

  std::unique_ptr<Env> clone_fresh() const override { return std::make_unique<GridMaze>(); }

 protected:
  bool wall(int r, int c) const override {
    if (r <= 0 || c <= 0 || r >= 11 || c >= 11) return true;
    // One interior wall splits the room; the gap is at the bottom.
    if (c == 6 && r >= 1 && r <= 8) return true;
    return false;
  }
  double cell_reward(std::size_t r, std::size_t c) const override {
    return (r == 6 && c == 4) ? 1.0 : 0.0;
  }
  double cell_marker(std::size_t r, std::size_t c) const override {
    return (r == 6 && c == 4) ? 0.5 : 0.0;
  }
};

class TwoRooms final : public GridEnv {
 public:
  TwoRooms() {
    rows_ = 7;
    cols_ = 13;
    spec_.name = "two_rooms";
    spec_.obs_dim = rows_ * cols_;
    spec_.action_count = 4;
    spec_.max_episode_len = 60;
    spec_.enumerable = true;
    spec_.obs_rows = rows_;
    spec_.obs_cols = cols_;
  }

  std::unique_ptr<Env> clone_fresh() const override { return std::make_unique<TwoRooms>(); }

 protected:
  bool wall(int r, int c) const override {
    if (r <= 0 || c <= 0 || r >= 6 || c >= 12) return true;
    if (c == 6 && r != 3) return true;  // door at row 3
    return false;
  }
  double cell_reward(std::size_t r, std::size_t c) const override {
    if (r == 5 && c == 1) return 0.3;    // distractor near the start
    if (r == 5 && c == 11) return 1.0;   // far room
    return 0.0;
  }
  double cell_marker(std::size_t r, std::size_t c) const override {
    if (r == 5 && c == 1) return 0.3;
    if (r == 5 && c == 11) return 0.6;
    return 0.0;
  }
};

}  // namespace

std::unique_ptr<Env> make_deep_sea_chain(std::size_t n) {
  if (n < 2) throw std::invalid_argument("deep_sea: size must be >= 2");
  return std::make_unique<DeepSeaChain>(n);
}

std::unique_ptr<Env> make_grid_maze() { return std::make_unique<GridMaze>(); }

std::unique_ptr<Env> make_two_rooms() { return std::make_unique<TwoRooms>(); }

std::unique_ptr<Env> make_env(const std::string& name, std::size_t size) {
  if (name == "deep_sea") return make_deep_sea_chain(size);
  if (name == "grid_maze") return make_grid_maze();
  if (name == "two_rooms") return make_two_rooms();
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace psdrl
