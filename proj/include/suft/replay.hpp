#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "suft/rng.hpp"

namespace suft {

// One stored experience. v_behavior is the behavior network's value output
// captured at action-selection time (Q(s,a) for Q-agents, V(s) for V-agents)
// and is immutable once stored: one extra 8-byte scalar per transition is the
// entire recycling cost. policy_id indexes the network epoch that produced
// the action.
struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool terminated = false;
  double v_behavior = 0.0;
  uint64_t policy_id = 0;
};

// Thrown when a consumer asks for a batch the buffer cannot serve yet
// (sampling is with replacement, so the buffer itself only requires
// non-emptiness; agents additionally gate updates on size() >= batch_size).
struct not_ready : std::logic_error {
  using std::logic_error::logic_error;
};

// Bounded FIFO ring of transitions; pushing beyond capacity evicts exactly
// the oldest item. Iteration via at() is insertion order among retained items.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  // Rejects transitions with non-finite fields or inconsistent dimensions.
  void push(Transition t);

  // batch_size transitions drawn uniformly with replacement.
  std::vector<Transition> sample(size_t batch_size, Rng& rng) const;

  size_t size() const { return len_; }
  size_t capacity() const { return capacity_; }

  // i-th oldest retained transition, i in [0, size()).
  const Transition& at(size_t i) const;

  // Number of distinct policy_id values currently stored.
  size_t distinct_policies() const;

  // Binary dump for post-hoc analysis: header {magic "SUFTRB1", obs_dim u32,
  // count u64}, then fixed-width little-endian records in field declaration
  // order (obs, action i64, reward f64, next_obs, terminated u8,
  // v_behavior f64, policy_id u64).
  void dump(const std::string& path) const;

  // Serialized record width for a given observation dimension.
  static size_t record_size(size_t obs_dim);

 private:
  size_t capacity_;
  std::vector<Transition> storage_;
  size_t write_index_ = 0;
  size_t len_ = 0;
  size_t obs_dim_ = 0;  // fixed by the first push
};

}  // namespace suft
