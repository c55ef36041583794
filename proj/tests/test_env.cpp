#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "suft/env.hpp"
#include "suft/rng.hpp"

using namespace suft;

TEST_CASE("gridworld follows the documented dynamics") {
  GridWorld env;
  auto obs = env.reset(0);
  CHECK(obs[0] == 1.0);

  // Right x4 then down x4 reaches the goal; -0.01 on the way, 1.0 at the end.
  const std::vector<int> path{1, 1, 1, 1, 2, 2, 2, 2};
  for (size_t i = 0; i < path.size(); ++i) {
    StepResult r = env.step(path[i]);
    if (i + 1 < path.size()) {
      CHECK(r.reward == -0.01);
      CHECK_FALSE(r.terminated);
    } else {
      CHECK(r.reward == 1.0);
      CHECK(r.terminated);
      CHECK_FALSE(r.truncated);
      CHECK(r.obs[24] == 1.0);
    }
  }
  CHECK_THROWS_AS(env.step(0), std::logic_error);

  // Walls: walking left from the start stays in place.
  env.reset(0);
  StepResult r = env.step(3);
  CHECK(r.obs[0] == 1.0);

  // Truncation at the step limit.
  env.reset(0);
  for (int i = 0; i < 99; ++i) {
    StepResult s = env.step(0);  // bumping the top wall forever
    CHECK_FALSE(s.truncated);
  }
  StepResult last = env.step(0);
  CHECK(last.truncated);
  CHECK_FALSE(last.terminated);

  CHECK_THROWS_AS((env.reset(0), env.step(4)), std::domain_error);

  // Reset mid-episode discards prior state.
  env.reset(0);
  env.step(1);
  auto fresh = env.reset(0);
  CHECK(fresh[0] == 1.0);
}

TEST_CASE("gridworld determinism") {
  GridWorld a, b;
  CHECK(a.reset(7) == b.reset(7));
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const int action = static_cast<int>(rng.uniform_int(4));
    StepResult ra = a.step(action);
    StepResult rb = b.step(action);
    CHECK(ra.obs == rb.obs);
    CHECK(ra.reward == rb.reward);
    if (!ra.terminated && !ra.truncated) continue;
    a.reset(i);
    b.reset(i);
  }
}

namespace {

// Literal transcription of the documented cart-pole update, kept independent
// of the implementation under test.
struct CartOracle {
  double x, x_dot, theta, theta_dot;

  void step(int action) {
    const double force = action == 1 ? 10.0 : -10.0;
    const double total_mass = 1.1;
    const double pml = 0.1 * 0.5;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double temp = (force + pml * theta_dot * theta_dot * sin_t) / total_mass;
    const double theta_acc = (9.8 * sin_t - cos_t * temp) /
                             (0.5 * (4.0 / 3.0 - 0.1 * cos_t * cos_t / total_mass));
    const double x_acc = temp - pml * theta_acc * cos_t / total_mass;
    x += 0.02 * x_dot;
    x_dot += 0.02 * x_acc;
    theta += 0.02 * theta_dot;
    theta_dot += 0.02 * theta_acc;
  }
};

}  // namespace

TEST_CASE("cartpole matches a direct transcription of its physics") {
  CartPole env;
  auto obs = env.reset(11);
  CartOracle oracle{obs[0], obs[1], obs[2], obs[3]};

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const int action = static_cast<int>(rng.uniform_int(2));
    StepResult r = env.step(action);
    oracle.step(action);
    CHECK(r.obs[0] == oracle.x);
    CHECK(r.obs[1] == oracle.x_dot);
    CHECK(r.obs[2] == oracle.theta);
    CHECK(r.obs[3] == oracle.theta_dot);
    CHECK(r.reward == 1.0);
    const bool should_end = std::fabs(oracle.x) > 2.4 ||
                            std::fabs(oracle.theta) > 12.0 * M_PI / 180.0;
    CHECK(r.terminated == should_end);
    if (r.terminated || r.truncated) {
      obs = env.reset(1000 + i);
      oracle = CartOracle{obs[0], obs[1], obs[2], obs[3]};
    }
  }
}

TEST_CASE("cartpole falls past twelve degrees under a constant push") {
  CartPole env;
  env.reset(0);
  bool terminated = false;
  int steps = 0;
  while (!terminated && steps < 500) {
    StepResult r = env.step(1);
    terminated = r.terminated;
    ++steps;
    if (terminated) {
      CHECK(std::fabs(r.obs[2]) > 12.0 * M_PI / 180.0);
    }
  }
  CHECK(terminated);
}

TEST_CASE("cartpole reset distribution") {
  CartPole env;
  // Same seed, same state; different seeds spread uniformly over the box.
  CHECK(env.reset(42) == env.reset(42));

  const int n = 10000;
  std::vector<double> sums(4, 0.0), sq(4, 0.0);
  int low_half[4] = {0, 0, 0, 0};
  for (int s = 0; s < n; ++s) {
    auto obs = env.reset(static_cast<uint64_t>(s));
    for (int k = 0; k < 4; ++k) {
      CHECK(obs[k] >= -0.05);
      CHECK(obs[k] < 0.05);
      sums[k] += obs[k];
      sq[k] += obs[k] * obs[k];
      if (obs[k] < 0.0) ++low_half[k];
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double mean = sums[k] / n;
    const double sd = std::sqrt(sq[k] / n - mean * mean);
    // Uniform(-0.05, 0.05): mean 0 (se ~ 2.9e-4), sd ~ 0.02887.
    CHECK(std::fabs(mean) < 4.0 * 0.05 / std::sqrt(3.0 * n));
    CHECK(sd == doctest::Approx(0.05 / std::sqrt(3.0)).epsilon(0.05));
    // Each half of the box gets close to half the mass.
    CHECK(std::fabs(low_half[k] - n / 2.0) < 4.0 * std::sqrt(n * 0.25));
  }
}

TEST_CASE("cartpole episode cannot exceed the step limit") {
  CartPole env;
  int longest = 0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    env.reset(seed);
    int len = 0;
    // Alternating pushes keep the pole up for a while but not forever.
    while (true) {
      StepResult r = env.step(len % 2);
      ++len;
      if (r.terminated || r.truncated) break;
    }
    longest = std::max(longest, len);
    CHECK(len <= 500);
  }
  CHECK(longest > 10);
}

TEST_CASE("env factory") {
  CHECK(make_env("gridworld")->spec().obs_dim == 25);
  CHECK(make_env("cartpole")->spec().n_actions == 2);
  CHECK_THROWS_AS(make_env("atari"), std::invalid_argument);
}
