#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "suft/config.hpp"
#include "suft/harness.hpp"
#include "suft/stats.hpp"

using namespace suft;

namespace {

RunConfig small_config(double lambda, int64_t steps = 1500) {
  RunConfig c;
  c.env = "gridworld";
  c.agent.variant = AgentVariant::Dqn;
  c.agent.gamma = 0.99;
  c.agent.lambda_tf = lambda;
  c.agent.loss_kind = Loss::L2;
  c.agent.lr = 1e-3;
  c.agent.batch_size = 16;
  c.agent.buffer_capacity = 200;
  c.agent.target_sync_interval = 50;
  c.agent.epsilon = {1.0, 0.05, std::max<int64_t>(1, steps / 5)};
  c.steps = steps;
  c.seeds = {0, 1};
  c.output_dir = "unused";
  return c;
}

}  // namespace

TEST_CASE("smooth") {
  CHECK(smooth({}, 3).empty());
  CHECK(smooth({1.0, 2.0, 3.0}, 1) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(smooth({5.0, 5.0, 5.0}, 4) == std::vector<double>{5.0, 5.0, 5.0});
  CHECK(smooth({0.0, 10.0}, 2) == std::vector<double>{0.0, 5.0});

  // Matches a direct windowed mean.
  std::vector<double> series;
  for (int i = 0; i < 100; ++i) series.push_back(std::sin(0.3 * i) * i);
  const auto fast = smooth(series, 7);
  for (size_t i = 0; i < series.size(); ++i) {
    double acc = 0.0;
    int n = 0;
    for (size_t j = i >= 6 ? i - 6 : 0; j <= i; ++j, ++n) acc += series[j];
    CHECK(fast[i] == doctest::Approx(acc / n).epsilon(1e-12));
  }
}

TEST_CASE("upper median") {
  CHECK(upper_median({1.0, 2.0, 3.0, 4.0}) == 3.0);
  CHECK(upper_median({5.0}) == 5.0);
  CHECK(upper_median({3.0, 1.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(upper_median({}), std::domain_error);

  // Upper median never falls below the lower median.
  std::vector<double> v{9.0, -4.0, 2.5, 2.5, 7.0, -1.0};
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(upper_median(v) >= sorted[(sorted.size() - 1) / 2]);
}

TEST_CASE("improvement percentage formulas") {
  // Atari reward-table arithmetic, frozen independently: the Pong row of the
  // small-buffer DQN comparison.
  CHECK(improvement_pct(-17.9, -20.2, -20.7) == doctest::Approx(460.0));
  CHECK(improvement_pct(5.0, 5.0, 1.0) == 0.0);
  CHECK(log_improvement_pct(improvement_pct(-17.9, -20.2, -20.7)) ==
        doctest::Approx(2.663700925389648));

  CHECK_FALSE(improvement_valid(5.0, 0.5, 1.0));
  CHECK_THROWS_AS(improvement_pct(5.0, 0.5, 1.0), undefined_result);
  CHECK_THROWS_AS(log_improvement_pct(-2.0), undefined_result);
}

TEST_CASE("mean reward ratio") {
  CHECK(mean_reward_ratio_pct({{5.0, 5.0, 1.0}}) == doctest::Approx(100.0));
  CHECK(mean_reward_ratio_pct({{-17.9, -20.2, -20.7}}) == doctest::Approx(560.0));
  // Mean of a 100% and a 300% environment.
  CHECK(mean_reward_ratio_pct({{2.0, 2.0, 1.0}, {4.0, 2.0, 1.0}}) ==
        doctest::Approx(200.0));
  // Invalid rows are excluded; all-invalid is an error.
  CHECK(mean_reward_ratio_pct({{2.0, 2.0, 1.0}, {5.0, 0.5, 1.0}}) ==
        doctest::Approx(100.0));
  CHECK_THROWS_AS(mean_reward_ratio_pct({{5.0, 0.5, 1.0}}), undefined_result);
}

TEST_CASE("train_run is deterministic and respects the step budget") {
  RunConfig cfg = small_config(1.0, 800);
  RunRecord a = train_run(cfg, 3);
  RunRecord b = train_run(cfg, 3);
  CHECK(a.episode_rewards == b.episode_rewards);
  REQUIRE(a.updates.size() == b.updates.size());
  for (size_t i = 0; i < a.updates.size(); ++i) {
    CHECK(a.updates[i].total_loss == b.updates[i].total_loss);
  }
  CHECK(run_jsonl(a) == run_jsonl(b));
  CHECK(a.config_hash == config_hash(cfg));

  RunRecord c = train_run(cfg, 4);
  CHECK(a.episode_rewards != c.episode_rewards);

  // Zero steps: empty series.
  RunConfig zero = small_config(1.0, 0);
  RunRecord z = train_run(zero, 0);
  CHECK(z.episode_rewards.empty());
  CHECK(z.updates.empty());
}

TEST_CASE("suft term logging tracks lambda") {
  RunConfig off = small_config(0.0);
  RunConfig on = small_config(1.0);
  RunRecord r_off = train_run(off, 1);
  RunRecord r_on = train_run(on, 1);

  double max_off = 0.0, max_on = 0.0;
  for (const auto& m : r_off.updates) max_off = std::max(max_off, m.suft_term);
  for (const auto& m : r_on.updates) max_on = std::max(max_on, m.suft_term);
  CHECK(max_off == 0.0);
  CHECK(max_on > 0.0);
}

TEST_CASE("compare enforces the single-difference protocol") {
  RunConfig base = small_config(0.0, 600);
  RunConfig drifted = small_config(1.0, 600);
  drifted.agent.gamma = 0.95;
  CHECK_THROWS_AS(compare(base, drifted), protocol_error);

  RunConfig suft = small_config(1.0, 600);
  ComparisonReport rep = compare(base, suft);
  CHECK(rep.n_seeds == 2);
  CHECK(rep.p_value >= 0.0);
  CHECK(rep.p_value <= 1.0);
  CHECK(rep.per_seed_baseline.size() == 2);
  CHECK(std::isfinite(rep.baseline_median));
  CHECK(std::isfinite(rep.suft_median));
  CHECK(std::isfinite(rep.random_reward));

  //

  // Equal lambda in both arms: identical runs, zero improvement signal.
  ComparisonReport same = compare(base, base);
  CHECK(same.baseline_median == same.suft_median);
  CHECK(same.p_value == doctest::Approx(1.0));
}

TEST_CASE("random reward estimate is deterministic and plausible") {
  const double g1 = estimate_random_reward("gridworld", 50);
  const double g2 = estimate_random_reward("gridworld", 50);
  CHECK(g1 == g2);
  // A random walk rarely reaches the goal within 100 steps: mostly -0.01
  // per step.
  CHECK(g1 < 0.5);
  CHECK(g1 > -1.01);

  const double c = estimate_random_reward("cartpole", 50);
  CHECK(c > 1.0);
  CHECK(c < 500.0);
}
