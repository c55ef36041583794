#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "suft/loss.hpp"
#include "suft/mlp.hpp"
#include "suft/replay.hpp"
#include "suft/rng.hpp"

namespace suft {

enum class AgentVariant { VanillaDqn, Dqn, DoubleDqn, ActorCritic };

AgentVariant variant_from_string(const std::string& s);
const char* variant_to_string(AgentVariant v);

// Linear decay from start to end over the first decay_steps act() calls.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  int64_t decay_steps = 1;

  double at(int64_t step) const {
    if (step >= decay_steps) return end;
    const double frac = static_cast<double>(step) / decay_steps;
    return start + (end - start) * frac;
  }
};

struct AgentConfig {
  AgentVariant variant = AgentVariant::Dqn;
  double gamma = 0.99;
  double lambda_tf = 1.0;
  Loss loss_kind = Loss::L2;
  double lr = 1e-3;
  int batch_size = 32;
  int buffer_capacity = 500;
  int target_sync_interval = 100;
  EpsilonSchedule epsilon;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Per-update breakdown; total_loss == td_loss + lambda_tf * suft_term holds
// exactly by construction.
struct UpdateMetrics {
  double td_loss = 0.0;
  double suft_term = 0.0;
  double total_loss = 0.0;
  double grad_norm = 0.0;
};

// Training objective over Q rows (batch x n_actions outputs): the mean TD
// loss against constant targets at the taken actions, plus lambda_tf times
// the mean loss between the stored behavior values and the current outputs
// at the same actions. Gradients flow only through the current outputs; when
// lambda_tf == 0 the recycling term is skipped entirely, so the callback is
// operation-for-operation the plain TD objective. td_out/suft_out, when
// given, receive the two components.
BatchLossFn make_q_objective(Loss kind, std::vector<int> actions,
                             std::vector<double> td_targets,
                             std::vector<double> v_behavior, double lambda_tf,
                             double* td_out = nullptr,
                             double* suft_out = nullptr);

// DQN-family / actor-critic learner. One optimization path: sample a batch,
// form constant bootstrap targets, take one Adam step on the value loss plus
// the recycled-value term, and sync the target network on schedule. The
// constant term of the underlying bound is independent of the network and
// never appears here: training touches no outcome-vs-outcome distances, and
// this module does not depend on the bound-verification library.
class Agent {
 public:
  Agent(const AgentConfig& config, int obs_dim, int n_actions,
        uint64_t init_seed);

  // Epsilon-greedy action (softmax draw for the actor-critic) plus the value
  // the current network assigns it: Q(obs, action) for Q-agents, V(obs) for
  // the actor-critic. The value is captured for the action actually taken,
  // exploratory or not.
  std::pair<int, double> act(const std::vector<double>& obs, Rng& rng);

  // Bootstrap targets per variant, treated as constants by update().
  std::vector<double> td_targets(const std::vector<Transition>& batch) const;

  // Mean loss between stored behavior values and the current network's
  // outputs on the batch; zero while the network still equals the snapshot
  // that produced the batch.
  double suft_term(const std::vector<Transition>& batch) const;

  // One optimization step from a uniformly sampled batch. Throws not_ready
  // until the buffer holds at least batch_size transitions.
  UpdateMetrics update(const ReplayBuffer& buffer, Rng& rng);

  uint64_t policy_id() const { return policy_id_; }
  int64_t updates_done() const { return update_count_; }
  const AgentConfig& config() const { return cfg_; }

  // Value network (Q for Q-agents, critic for actor-critic). The mutable
  // overloads support checkpoint restore and hand-built test fixtures.
  const Mlp& value_net() const { return value_net_; }
  Mlp& value_net() { return value_net_; }
  const Mlp& target_net() const { return value_target_; }
  Mlp& target_net() { return value_target_; }
  const Mlp& actor_net() const;

 private:
  bool is_q_agent() const { return cfg_.variant != AgentVariant::ActorCritic; }
  UpdateMetrics update_q(const std::vector<Transition>& batch);
  UpdateMetrics update_actor_critic(const std::vector<Transition>& batch);

  AgentConfig cfg_;
  int obs_dim_;
  int n_actions_;
  Mlp value_net_;
  Mlp value_target_;
  Mlp actor_;
  AdamState value_opt_;
  AdamState actor_opt_;
  int64_t act_count_ = 0;
  int64_t update_count_ = 0;
  uint64_t policy_id_ = 0;
};

}  // namespace suft
