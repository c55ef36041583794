#include "suft/env.hpp"

#include <cmath>
#include <stdexcept>

#include "suft/rng.hpp"

namespace suft {

namespace {

const EnvSpec kGridSpec{"gridworld", 25, 4, 100};
const EnvSpec kCartSpec{"cartpole", 4, 2, 500};

void require_action(const EnvSpec& spec, int action, bool active) {
  if (!active) throw std::logic_error("step() after episode end; call reset()");
  if (action < 0 || action >= spec.n_actions) {
    throw std::domain_error("action out of range");
  }
}

}  // namespace

const EnvSpec& GridWorld::spec() const { return kGridSpec; }

std::vector<double> GridWorld::reset(uint64_t /*seed*/) {
  row_ = 0;
  col_ = 0;
  steps_ = 0;
  active_ = true;
  std::vector<double> obs(25, 0.0);
  obs[0] = 1.0;
  return obs;
}

StepResult GridWorld::step(int action) {
  require_action(kGridSpec, action, active_);
  switch (action) {
    case 0: row_ = std::max(row_ - 1, 0); break;
    case 1: col_ = std::min(col_ + 1, 4); break;
    case 2: row_ = std::min(row_ + 1, 4); break;
    case 3: col_ = std::max(col_ - 1, 0); break;
  }
  ++steps_;

  StepResult r;
  r.obs.assign(25, 0.0);
  r.obs[row_ * 5 + col_] = 1.0;
  r.terminated = row_ == 4 && col_ == 4;
  r.reward = r.terminated ? 1.0 : -0.01;
  r.truncated = !r.terminated && steps_ >= kGridSpec.max_episode_steps;
  active_ = !r.terminated && !r.truncated;
  return r;
}

const EnvSpec& CartPole::spec() const { return kCartSpec; }

std::vector<double> CartPole::reset(uint64_t seed) {
  Rng rng(seed);
  x_ = rng.uniform(-0.05, 0.05);
  x_dot_ = rng.uniform(-0.05, 0.05);
  theta_ = rng.uniform(-0.05, 0.05);
  theta_dot_ = rng.uniform(-0.05, 0.05);
  steps_ = 0;
  active_ = true;
  return {x_, x_dot_, theta_, theta_dot_};
}

StepResult CartPole::step(int action) {
  require_action(kCartSpec, action, active_);

  constexpr double kGravity = 9.8;
  constexpr double kMassCart = 1.0;
  constexpr double kMassPole = 0.1;
  constexpr double kTotalMass = kMassCart + kMassPole;
  constexpr double kHalfLength = 0.5;
  constexpr double kPoleMassLength = kMassPole * kHalfLength;
  constexpr double kForceMag = 10.0;
  constexpr double kTau = 0.02;
  constexpr double kThetaLimit = 12.0 * 2.0 * 3.141592653589793 / 360.0;
  constexpr double kXLimit = 2.4;

  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(theta_);
  const double sin_t = std::sin(theta_);
  const double temp =
      (force + kPoleMassLength * theta_dot_ * theta_dot_ * sin_t) / kTotalMass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

  x_ += kTau * x_dot_;
  x_dot_ += kTau * x_acc;
  theta_ += kTau * theta_dot_;
  theta_dot_ += kTau * theta_acc;
  ++steps_;

  StepResult r;
  r.obs = {x_, x_dot_, theta_, theta_dot_};
  r.reward = 1.0;
  r.terminated = std::fabs(x_) > kXLimit || std::fabs(theta_) > kThetaLimit;
  r.truncated = !r.terminated && steps_ >= kCartSpec.max_episode_steps;
  active_ = !r.terminated && !r.truncated;
  return r;
}

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "gridworld") return std::make_unique<GridWorld>();
  if (name == "cartpole") return std::make_unique<CartPole>();
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace suft
