#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace suft {

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int n_actions = 0;
  int max_episode_steps = 0;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
};

// Deterministic, seedable episodic environment with discrete actions.
// (seed, action sequence) fully determines the trajectory.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(uint64_t seed) = 0;
  // Throws std::domain_error on an out-of-range action and std::logic_error
  // when called after the episode has ended.
  virtual StepResult step(int action) = 0;
};

// 5x5 grid, start (0,0), goal (4,4). Actions 0=up, 1=right, 2=down, 3=left;
// moving off the grid stays in place. Observation is a one-hot 25-vector
// (index row*5 + col). Reward -0.01 per step, 1.0 on reaching the goal.
// Episodes truncate after 100 steps.
class GridWorld final : public Env {
 public:
  const EnvSpec& spec() const override;
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(int action) override;

 private:
  int row_ = 0;
  int col_ = 0;
  int steps_ = 0;
  bool active_ = false;
};

// Cart-pole balance task: state (x, x_dot, theta, theta_dot), actions push
// left/right with force 10 N, Euler integration with tau = 0.02, cart mass
// 1.0, pole mass 0.1, pole half-length 0.5, gravity 9.8. Reward +1 per step;
// the episode terminates when |x| > 2.4 or |theta| > 12 degrees and
// truncates after 500 steps. Reset draws the state uniformly from
// [-0.05, 0.05]^4.
class CartPole final : public Env {
 public:
  const EnvSpec& spec() const override;
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(int action) override;

 private:
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  int steps_ = 0;
  bool active_ = false;
};

// Factory by config name: "gridworld" or "cartpole".
std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace suft
