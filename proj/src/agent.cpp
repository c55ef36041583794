#include "suft/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suft {

namespace {

constexpr int kHidden = 64;

int argmax(const double* row, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

std::vector<double> flatten_obs(const std::vector<Transition>& batch,
                                bool next) {
  std::vector<double> out;
  out.reserve(batch.size() * batch.front().obs.size());
  for (const Transition& t : batch) {
    const auto& o = next ? t.next_obs : t.obs;
    out.insert(out.end(), o.begin(), o.end());
  }
  return out;
}

}  // namespace

AgentVariant variant_from_string(const std::string& s) {
  if (s == "vanilla_dqn") return AgentVariant::VanillaDqn;
  if (s == "dqn") return AgentVariant::Dqn;
  if (s == "double_dqn") return AgentVariant::DoubleDqn;
  if (s == "actor_critic") return AgentVariant::ActorCritic;
  throw std::invalid_argument("unknown agent variant: " + s);
}

const char* variant_to_string(AgentVariant v) {
  switch (v) {
    case AgentVariant::VanillaDqn: return "vanilla_dqn";
    case AgentVariant::Dqn: return "dqn";
    case AgentVariant::DoubleDqn: return "double_dqn";
    case AgentVariant::ActorCritic: return "actor_critic";
  }
  return "?";
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma: must be in (0, 1]");
  }
  if (!(lambda_tf >= 0.0) || !std::isfinite(lambda_tf)) {
    throw std::invalid_argument("lambda_tf: must be a finite value >= 0");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("lr: must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size: must be >= 1");
  if (buffer_capacity < 1) {
    throw std::invalid_argument("buffer_capacity: must be >= 1");
  }
  if (target_sync_interval < 1) {
    throw std::invalid_argument("target_sync_interval: must be >= 1");
  }
  if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0)) {
    throw std::invalid_argument("epsilon.start: must be in [0, 1]");
  }
  if (!(epsilon.end >= 0.0 && epsilon.end <= 1.0)) {
    throw std::invalid_argument("epsilon.end: must be in [0, 1]");
  }
  if (epsilon.decay_steps < 1) {
    throw std::invalid_argument("epsilon.decay_steps: must be >= 1");
  }
}

BatchLossFn make_q_objective(Loss kind, std::vector<int> actions,
                             std::vector<double> td_targets,
                             std::vector<double> v_behavior, double lambda_tf,
                             double* td_out, double* suft_out) {
  return [kind, actions = std::move(actions), td_targets = std::move(td_targets),
          v_behavior = std::move(v_behavior), lambda_tf, td_out,
          suft_out](const double* outputs, int batch, int n_out,
                    double* d_outputs) {
    const double inv_b = 1.0 / batch;
    double td = 0.0;
    for (int s = 0; s < batch; ++s) {
      const size_t k = static_cast<size_t>(s) * n_out + actions[s];
      td += loss_eval(kind, td_targets[s], outputs[k]) * inv_b;
      d_outputs[k] += loss_grad_wrt_second(kind, td_targets[s], outputs[k]) * inv_b;
    }
    if (td_out) *td_out = td;

    double psi = 0.0;
    if (lambda_tf != 0.0) {
      for (int s = 0; s < batch; ++s) {
        const size_t k = static_cast<size_t>(s) * n_out + actions[s];
        psi += loss_eval(kind, v_behavior[s], outputs[k]) * inv_b;
        d_outputs[k] +=
            lambda_tf * loss_grad_wrt_second(kind, v_behavior[s], outputs[k]) * inv_b;
      }
    }
    if (suft_out) *suft_out = psi;
    return td + lambda_tf * psi;
  };
}

Agent::Agent(const AgentConfig& config, int obs_dim, int n_actions,
             uint64_t init_seed)
    : cfg_(config), obs_dim_(obs_dim), n_actions_(n_actions) {
  cfg_.validate();
  if (obs_dim < 1 || n_actions < 2) {
    throw std::invalid_argument("agent needs obs_dim >= 1 and n_actions >= 2");
  }
  Rng seeder(init_seed);
  if (is_q_agent()) {
    value_net_ = Mlp::init({obs_dim_, kHidden, kHidden, n_actions_},
                           Activation::ReLU, seeder.next_u64());
    value_target_ = clone_weights(value_net_);
  } else {
    value_net_ = Mlp::init({obs_dim_, kHidden, kHidden, 1}, Activation::ReLU,
                           seeder.next_u64());
    value_target_ = clone_weights(value_net_);
    actor_ = Mlp::init({obs_dim_, kHidden, kHidden, n_actions_},
                       Activation::ReLU, seeder.next_u64());
    actor_opt_ = AdamState::for_net(actor_);
  }
  value_opt_ = AdamState::for_net(value_net_);
}

const Mlp& Agent::actor_net() const {
  if (is_q_agent()) throw std::logic_error("Q-agents have no actor network");
  return actor_;
}

std::pair<int, double> Agent::act(const std::vector<double>& obs, Rng& rng) {
  if (static_cast<int>(obs.size()) != obs_dim_) {
    throw std::invalid_argument("observation dimension mismatch");
  }
  const int64_t step = act_count_++;

  if (is_q_agent()) {
    const std::vector<double> q_row = forward(value_net_, obs);
    const double eps = cfg_.epsilon.at(step);
    int action;
    if (rng.uniform() < eps) {
      action = static_cast<int>(rng.uniform_int(n_actions_));
    } else {
      action = argmax(q_row.data(), n_actions_);
    }
    return {action, q_row[action]};
  }

  // Actor-critic: sample from the softmax policy, recycle V(s).
  const std::vector<double> logits = forward(actor_, obs);
  double max_logit = logits[0];
  for (double z : logits) max_logit = std::max(max_logit, z);
  double norm = 0.0;
  std::vector<double> probs(n_actions_);
  for (int a = 0; a < n_actions_; ++a) {
    probs[a] = std::exp(logits[a] - max_logit);
    norm += probs[a];
  }
  const double u = rng.uniform() * norm;
  double acc = 0.0;
  int action = n_actions_ - 1;
  for (int a = 0; a < n_actions_; ++a) {
    acc += probs[a];
    if (u < acc) {
      action = a;
      break;
    }
  }
  const double v = forward(value_net_, obs)[0];
  return {action, v};
}

std::vector<double> Agent::td_targets(
    const std::vector<Transition>& batch) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> targets(batch.size());

  const std::vector<double> next_inputs = flatten_obs(batch, true);
  const int b = static_cast<int>(batch.size());

  if (is_q_agent()) {
    std::vector<double> online_next;
    if (cfg_.variant != AgentVariant::Dqn) {
      online_next = forward_batch(value_net_, next_inputs, b);
    }
    std::vector<double> target_next;
    if (cfg_.variant != AgentVariant::VanillaDqn) {
      target_next = forward_batch(value_target_, next_inputs, b);
    }
    for (int s = 0; s < b; ++s) {
      double bootstrap = 0.0;
      if (!batch[s].terminated) {
        const double* online_row = online_next.data() + static_cast<size_t>(s) * n_actions_;
        switch (cfg_.variant) {
          case AgentVariant::VanillaDqn:
            bootstrap = online_row[argmax(online_row, n_actions_)];
            break;
          case AgentVariant::Dqn: {
            const double* t_row = target_next.data() + static_cast<size_t>(s) * n_actions_;
            bootstrap = t_row[argmax(t_row, n_actions_)];
            break;
          }
          case AgentVariant::DoubleDqn: {
            const double* t_row = target_next.data() + static_cast<size_t>(s) * n_actions_;
            bootstrap = t_row[argmax(online_row, n_actions_)];
            break;
          }
          case AgentVariant::ActorCritic:
            break;
        }
      }
      targets[s] = batch[s].reward + cfg_.gamma * bootstrap;
    }
  } else {
    const std::vector<double> v_next = forward_batch(value_net_, next_inputs, b);
    for (int s = 0; s < b; ++s) {
      const double bootstrap = batch[s].terminated ? 0.0 : v_next[s];
      targets[s] = batch[s].reward + cfg_.gamma * bootstrap;
    }
  }
  return targets;
}

double Agent::suft_term(const std::vector<Transition>& batch) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const int b = static_cast<int>(batch.size());
  const std::vector<double> outputs =
      forward_batch(value_net_, flatten_obs(batch, false), b);
  const int n_out = value_net_.out_dim();
  double acc = 0.0;
  for (int s = 0; s < b; ++s) {
    const int col = is_q_agent() ? batch[s].action : 0;
    const double current = outputs[static_cast<size_t>(s) * n_out + col];
    acc += loss_eval(cfg_.loss_kind, batch[s].v_behavior, current);
  }
  return acc / b;
}

UpdateMetrics Agent::update(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() < static_cast<size_t>(cfg_.batch_size)) {
    throw not_ready("buffer holds " + std::to_string(buffer.size()) +
                    " transitions, need " + std::to_string(cfg_.batch_size));
  }
  const std::vector<Transition> batch = buffer.sample(cfg_.batch_size, rng);
  return is_q_agent() ? update_q(batch) : update_actor_critic(batch);
}

UpdateMetrics Agent::update_q(const std::vector<Transition>& batch) {
  const int b = static_cast<int>(batch.size());
  const std::vector<double> inputs = flatten_obs(batch, false);
  const std::vector<double> targets = td_targets(batch);

  std::vector<int> actions(b);
  std::vector<double> behavior(b);
  for (int s = 0; s < b; ++s) {
    actions[s] = batch[s].action;
    behavior[s] = batch[s].v_behavior;
  }

  UpdateMetrics m;
  const BatchLossFn objective =
      make_q_objective(cfg_.loss_kind, std::move(actions), targets,
                       std::move(behavior), cfg_.lambda_tf, &m.td_loss,
                       &m.suft_term);
  BackwardResult back = backward(value_net_, inputs, b, objective);
  adam_step(value_net_, back.grad, value_opt_, cfg_.lr);

  double norm_sq = 0.0;
  for (double g : back.grad) norm_sq += g * g;
  m.grad_norm = std::sqrt(norm_sq);
  m.total_loss = m.td_loss + cfg_.lambda_tf * m.suft_term;

  ++update_count_;
  if (update_count_ % cfg_.target_sync_interval == 0) {
    copy_into_target(value_net_, value_target_);
    ++policy_id_;
  }
  return m;
}

UpdateMetrics Agent::update_actor_critic(const std::vector<Transition>& batch) {
  const int b = static_cast<int>(batch.size());
  const std::vector<double> inputs = flatten_obs(batch, false);
  const std::vector<double> targets = td_targets(batch);

  // Advantages from the critic before it moves, constants for the actor.
  const std::vector<double> v_now = forward_batch(value_net_, inputs, b);
  std::vector<double> advantages(b);
  for (int s = 0; s < b; ++s) advantages[s] = targets[s] - v_now[s];

  std::vector<double> behavior(b);
  for (int s = 0; s < b; ++s) behavior[s] = batch[s].v_behavior;

  UpdateMetrics m;
  const BatchLossFn critic_objective = make_q_objective(
      cfg_.loss_kind, std::vector<int>(b, 0), targets, std::move(behavior),
      cfg_.lambda_tf, &m.td_loss, &m.suft_term);
  BackwardResult critic_back = backward(value_net_, inputs, b, critic_objective);
  adam_step(value_net_, critic_back.grad, value_opt_, cfg_.lr);

  std::vector<int> actions(b);
  for (int s = 0; s < b; ++s) actions[s] = batch[s].action;
  const BatchLossFn actor_objective =
      [&actions, &advantages](const double* outputs, int batch_n, int n_out,
                              double* d_outputs) {
        // Mean of -log pi(a|s) * advantage over the batch.
        double value = 0.0;
        const double inv_b = 1.0 / batch_n;
        for (int s = 0; s < batch_n; ++s) {
          const double* z = outputs + static_cast<size_t>(s) * n_out;
          double max_z = z[0];
          for (int a = 1; a < n_out; ++a) max_z = std::max(max_z, z[a]);
          double norm = 0.0;
          for (int a = 0; a < n_out; ++a) norm += std::exp(z[a] - max_z);
          const double log_norm = std::log(norm) + max_z;
          value += -(z[actions[s]] - log_norm) * advantages[s] * inv_b;
          double* d = d_outputs + static_cast<size_t>(s) * n_out;
          for (int a = 0; a < n_out; ++a) {
            const double p = std::exp(z[a] - log_norm);
            d[a] += (p - (a == actions[s] ? 1.0 : 0.0)) * advantages[s] * inv_b;
          }
        }
        return value;
      };
  BackwardResult actor_back = backward(actor_, inputs, b, actor_objective);
  adam_step(actor_, actor_back.grad, actor_opt_, cfg_.lr);

  double norm_sq = 0.0;
  for (double g : critic_back.grad) norm_sq += g * g;
  m.grad_norm = std::sqrt(norm_sq);
  m.total_loss = m.td_loss + cfg_.lambda_tf * m.suft_term;

  ++update_count_;
  ++policy_id_;  // every optimization phase is a new behavior epoch
  return m;
}

}  // namespace suft
