#include "suft/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "json.hpp"

#include "suft/env.hpp"
#include "suft/stats.hpp"

namespace suft {

namespace {

uint64_t mix_seed(int64_t seed, uint64_t stream) {
  // Distinct streams (env resets, agent init, action/update draws) from one
  // run seed.
  uint64_t z = static_cast<uint64_t>(seed) + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void run_parallel(std::vector<std::function<void()>> tasks) {
  const int workers =
      std::max(1, std::min<int>(worker_cap(), static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        tasks[i]();
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

int worker_cap() {
  if (const char* env = std::getenv("SUFT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

RunRecord train_run(const RunConfig& config, int64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();

  std::unique_ptr<Env> env = make_env(config.env);
  const EnvSpec& spec = env->spec();

  Agent agent(config.agent, spec.obs_dim, spec.n_actions, mix_seed(seed, 0));
  ReplayBuffer buffer(config.agent.buffer_capacity);
  Rng reset_rng(mix_seed(seed, 1));
  Rng rng(mix_seed(seed, 2));

  RunRecord record;
  record.config_hash = config_hash(config);
  record.seed = seed;

  std::vector<double> obs = env->reset(reset_rng.next_u64());
  double episode_return = 0.0;
  int64_t episode_index = 0;
  double ep_td = 0.0, ep_suft = 0.0, ep_total = 0.0;
  int64_t ep_updates = 0;

  for (int64_t step = 1; step <= config.steps; ++step) {
    const auto [action, v_behavior] = agent.act(obs, rng);
    StepResult result = env->step(action);

    Transition t;
    t.obs = std::move(obs);
    t.action = action;
    t.reward = result.reward;
    t.next_obs = result.obs;
    t.terminated = result.terminated;
    t.v_behavior = v_behavior;
    t.policy_id = agent.policy_id();
    buffer.push(std::move(t));

    episode_return += result.reward;

    if (buffer.size() >= static_cast<size_t>(config.agent.batch_size) &&
        step % kTrainEvery == 0) {
      const UpdateMetrics m = agent.update(buffer, rng);
      record.updates.push_back(m);
      ep_td += m.td_loss;
      ep_suft += m.suft_term;
      ep_total += m.total_loss;
      ++ep_updates;
    }

    if (result.terminated || result.truncated) {
      EpisodeLog log;
      log.step = step;
      log.episode = episode_index++;
      log.reward = episode_return;
      if (ep_updates > 0) {
        log.td_loss = ep_td / ep_updates;
        log.suft_term = ep_suft / ep_updates;
        log.total_loss = ep_total / ep_updates;
      }
      record.episodes.push_back(log);
      record.episode_rewards.push_back(episode_return);
      episode_return = 0.0;
      ep_td = ep_suft = ep_total = 0.0;
      ep_updates = 0;
      obs = env->reset(reset_rng.next_u64());
    } else {
      obs = std::move(result.obs);
    }
  }

  record.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return record;
}

std::vector<double> smooth(const std::vector<double>& series, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<size_t>(window)) acc -= series[i - window];
    const size_t n = std::min<size_t>(i + 1, window);
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

double upper_median(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("median of an empty list");
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

bool improvement_valid(double higher, double lower, double random_reward) {
  return higher - random_reward > 0.0 && lower - random_reward > 0.0;
}

double improvement_pct(double higher, double lower, double random_reward) {
  if (!improvement_valid(higher, lower, random_reward)) {
    throw undefined_result(
        "improvement percentage requires both rewards above the random baseline");
  }
  const double h = higher - random_reward;
  const double l = lower - random_reward;
  return (h - l) / l * 100.0;
}

double log_improvement_pct(double improvement) {
  if (!(improvement + 1.0 > 0.0)) {
    throw undefined_result("log improvement undefined at or below -1");
  }
  return std::log10(improvement + 1.0);
}

double mean_reward_ratio_pct(const std::vector<EnvRewardTriple>& per_env) {
  double acc = 0.0;
  int valid = 0;
  for (const EnvRewardTriple& e : per_env) {
    if (!improvement_valid(e.method, e.baseline, e.random)) continue;
    acc += (e.method - e.random) / (e.baseline - e.random) * 100.0;
    ++valid;
  }
  if (valid == 0) {
    throw undefined_result("no environment passed the validity filter");
  }
  return acc / valid;
}

double run_score(const RunRecord& record) {
  if (record.episode_rewards.empty()) {
    throw undefined_result("run finished without a completed episode");
  }
  return smooth(record.episode_rewards, kSmoothWindow).back();
}

double estimate_random_reward(const std::string& env_name, int episodes) {
  std::unique_ptr<Env> env = make_env(env_name);
  const int n_actions = env->spec().n_actions;
  Rng rng(0x5eedf00dULL);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env->reset(rng.next_u64());
    double ep = 0.0;
    while (true) {
      StepResult r = env->step(static_cast<int>(rng.uniform_int(n_actions)));
      ep += r.reward;
      if (r.terminated || r.truncated) break;
    }
    total += ep;
  }
  return total / episodes;
}

namespace {

nlohmann::json config_without_lambda(const RunConfig& c) {
  nlohmann::json doc = nlohmann::json::parse(canonical_config_json(c));
  doc["agent"].erase("lambda_tf");
  return doc;
}

}  // namespace

ComparisonReport compare(const RunConfig& baseline, const RunConfig& suft,
                         std::vector<RunRecord>* baseline_records,
                         std::vector<RunRecord>* suft_records) {
  if (config_without_lambda(baseline) != config_without_lambda(suft)) {
    throw protocol_error(
        "comparison arms must differ only in agent.lambda_tf");
  }

  const std::vector<int64_t>& seeds = baseline.seeds;
  std::vector<RunRecord> base_runs(seeds.size());
  std::vector<RunRecord> suft_runs(seeds.size());

  std::vector<std::function<void()>> tasks;
  tasks.reserve(2 * seeds.size());
  for (size_t i = 0; i < seeds.size(); ++i) {
    tasks.push_back([&, i] { base_runs[i] = train_run(baseline, seeds[i]); });
    tasks.push_back([&, i] { suft_runs[i] = train_run(suft, seeds[i]); });
  }
  run_parallel(std::move(tasks));

  ComparisonReport report;
  report.env = baseline.env;
  report.n_seeds = static_cast<int>(seeds.size());
  for (const RunRecord& r : base_runs) {
    report.per_seed_baseline.push_back(run_score(r));
  }
  for (const RunRecord& r : suft_runs) {
    report.per_seed_suft.push_back(run_score(r));
  }
  report.baseline_median = upper_median(report.per_seed_baseline);
  report.suft_median = upper_median(report.per_seed_suft);
  report.random_reward = estimate_random_reward(baseline.env);

  report.valid = improvement_valid(report.suft_median, report.baseline_median,
                                   report.random_reward);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (report.valid) {
    const double s = report.suft_median - report.random_reward;
    const double b = report.baseline_median - report.random_reward;
    report.reward_ratio_pct = s / b * 100.0;
    report.improvement_pct = (s - b) / b * 100.0;
    report.log_improvement = report.improvement_pct + 1.0 > 0.0
                                 ? std::log10(report.improvement_pct + 1.0)
                                 : nan;
  } else {
    report.improvement_pct = nan;
    report.log_improvement = nan;
    report.reward_ratio_pct = nan;
  }

  try {
    report.p_value = welch_t_test(report.per_seed_baseline, report.per_seed_suft);
  } catch (const undefined_result&) {
    report.p_value = 1.0;  // identical degenerate arms carry no evidence
  }

  if (baseline_records) *baseline_records = std::move(base_runs);
  if (suft_records) *suft_records = std::move(suft_runs);
  return report;
}

std::string run_jsonl(const RunRecord& record) {
  std::string out;
  for (const EpisodeLog& e : record.episodes) {
    nlohmann::json line{
        {"step", e.step},          {"episode", e.episode},
        {"reward", e.reward},      {"td_loss", e.td_loss},
        {"suft_term", e.suft_term}, {"total_loss", e.total_loss},
    };
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace suft
