#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "suft/agent.hpp"
#include "suft/config.hpp"

namespace suft {

// Two compared configs differ somewhere other than agent.lambda_tf.
struct protocol_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One JSONL log line: emitted per completed episode, carrying the episode
// return and the mean update metrics observed during that episode.
struct EpisodeLog {
  int64_t step = 0;     // env step at which the episode ended
  int64_t episode = 0;  // episode index, 0-based
  double reward = 0.0;  // episode return
  double td_loss = 0.0;
  double suft_term = 0.0;
  double total_loss = 0.0;
};

// Full per-seed training trajectory.
struct RunRecord {
  std::string config_hash;
  int64_t seed = 0;
  std::vector<double> episode_rewards;
  std::vector<EpisodeLog> episodes;
  std::vector<UpdateMetrics> updates;
  double wall_time_sec = 0.0;
};

// Environment steps between optimization steps.
inline constexpr int kTrainEvery = 4;
// Trailing-average window for episode-reward smoothing.
inline constexpr int kSmoothWindow = 50;

// Full interaction loop: act, step, push (with the recycled value output),
// periodic update. Deterministic given (config, seed).
RunRecord train_run(const RunConfig& config, int64_t seed);

// Trailing moving average; partial windows at the start average what exists.
std::vector<double> smooth(const std::vector<double>& series, int window);

// Upper median: the sorted element at 0-based index n/2 (for even n this is
// the larger of the two central order statistics).
double upper_median(std::vector<double> values);

// ((higher - random) - (lower - random)) / (lower - random) * 100.
// Both differences must be positive; otherwise the comparison is invalid.
double improvement_pct(double higher, double lower, double random_reward);
bool improvement_valid(double higher, double lower, double random_reward);

// log10(improvement + 1), the display transform for improvement percentages.
double log_improvement_pct(double improvement);

// Mean over valid environments of (method - random) / (baseline - random)
// * 100. Throws undefined_result when no environment passes the validity
// filter.
struct EnvRewardTriple {
  double method = 0.0;
  double baseline = 0.0;
  double random = 0.0;
};
double mean_reward_ratio_pct(const std::vector<EnvRewardTriple>& per_env);

// Outcome of a two-arm comparison on one environment.
struct ComparisonReport {
  std::string env;
  int n_seeds = 0;
  double baseline_median = 0.0;
  double suft_median = 0.0;
  double random_reward = 0.0;
  bool valid = false;  // both arms beat the random baseline
  double improvement_pct = 0.0;   // suft vs baseline; NaN when invalid
  double log_improvement = 0.0;   // NaN when undefined
  double reward_ratio_pct = 0.0;  // NaN when invalid
  double p_value = 1.0;
  std::vector<double> per_seed_baseline;
  std::vector<double> per_seed_suft;
};

// Per-seed score: final value of the smoothed episode-reward series.
double run_score(const RunRecord& record);

// Mean episode return of a uniformly random policy, the desk-scale stand-in
// for a random-reward table. Deterministic for a given environment.
double estimate_random_reward(const std::string& env_name, int episodes = 200);

// Runs both arms over the configs' seed list and assembles the report.
// Refuses configs that differ anywhere but agent.lambda_tf. Out parameters
// receive the per-seed records (baseline first) for logging.
ComparisonReport compare(const RunConfig& baseline, const RunConfig& suft,
                         std::vector<RunRecord>* baseline_records = nullptr,
                         std::vector<RunRecord>* suft_records = nullptr);

// JSONL rendering of a run's episode log, one object per line.
std::string run_jsonl(const RunRecord& record);

// Worker cap for seed sweeps: SUFT_THREADS, else hardware concurrency.
int worker_cap();

}  // namespace suft
