#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "psdrl/matrix.hpp"

namespace psdrl {

struct EnvSpec {
  std::string name;
  std::size_t obs_dim = 0;
  std::size_t action_count = 0;
  std::size_t max_episode_len = 0;
  bool enumerable = false;
  std::size_t obs_rows = 0, obs_cols = 0;  // layout for image export
};

/// Enumerable deterministic MDP: next state, reward, and an episode-ending
/// flag per (state, action).
struct TabularMdp {
  std::size_t n_states = 0, n_actions = 0, initial = 0;
  std::vector<std::size_t> next;        // [s * n_actions + a]
  Vec reward;                           // [s * n_actions + a]
  std::vector<std::uint8_t> terminal;   // [s * n_actions + a]

  std::size_t idx(std::size_t s, std::size_t a) const { return s * n_actions + a; }
};

struct ValueIterationResult {
  Vec v;
  std::vector<int> pi;  // ties broken by lowest action id
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Value iteration to sup-norm residual below tol.
ValueIterationResult exact_value_iteration(const TabularMdp& mdp, double gamma,
                                           double tol = 1e-10,
                                           std::size_t max_iter = 1000000);

/// Deterministic episodic environment. Instances are single-owner.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset() = 0;
  /// Throws std::logic_error when stepped after termination.
  virtual void step(int a, double& r, Vec& s_next, bool& terminal) = 0;
  virtual TabularMdp tabular() const = 0;  // throws when not enumerable
  virtual void save_state(std::ostream& os) const = 0;
  virtual void load_state(std::istream& is) = 0;
  virtual std::unique_ptr<Env> clone_fresh() const = 0;
};

/// Hard-exploration chain: an N x N grid descended one row per step; only the
/// all-"right" action sequence reaches the bottom-right goal (+1); each
/// "right" costs 0.01/N, "left" is free but forfeits the goal.
/// Optimal return: 1 - 0.01.
std::unique_ptr<Env> make_deep_sea_chain(std::size_t n);

/// 12 x 12 grayscale gridworld with border and interior walls, sparse +1 goal
/// reward, 4 actions, 100-step cutoff.
std::unique_ptr<Env> make_grid_maze();

/// Two rooms joined by a door: a nearby small-reward cell (+0.3) in the start
/// room and a distant large-reward cell (+1.0) in the far room.
std::unique_ptr<Env> make_two_rooms();

/// Factory by config name; `size` applies to deep_sea only.
std::unique_ptr<Env> make_env(const std::string& name, std::size_t size);

}  // namespace psdrl
