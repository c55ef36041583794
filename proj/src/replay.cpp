#include "suft/replay.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

namespace suft {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void put_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(buf, bits);
}

}  // namespace

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("capacity must be positive");
  storage_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (!std::isfinite(t.reward) || !std::isfinite(t.v_behavior) ||
      !all_finite(t.obs) || !all_finite(t.next_obs)) {
    throw std::invalid_argument("transition has non-finite fields");
  }
  if (t.obs.size() != t.next_obs.size() || t.obs.empty()) {
    throw std::invalid_argument("transition observation sizes are inconsistent");
  }
  if (obs_dim_ == 0) {
    obs_dim_ = t.obs.size();
  } else if (t.obs.size() != obs_dim_) {
    throw std::invalid_argument("transition observation dimension changed");
  }

  if (len_ < capacity_) {
    storage_.push_back(std::move(t));
    ++len_;
  } else {
    storage_[write_index_] = std::move(t);
  }
  write_index_ = (write_index_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(size_t i) const {
  if (i >= len_) throw std::out_of_range("replay index out of range");
  if (len_ < capacity_) return storage_[i];
  return storage_[(write_index_ + i) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample(size_t batch_size,
                                             Rng& rng) const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (len_ == 0) throw not_ready("buffer is empty");
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (size_t i = 0; i < batch_size; ++i) {
    batch.push_back(at(rng.uniform_int(len_)));
  }
  return batch;
}

size_t ReplayBuffer::distinct_policies() const {
  std::unordered_set<uint64_t> ids;
  for (size_t i = 0; i < len_; ++i) ids.insert(at(i).policy_id);
  return ids.size();
}

size_t ReplayBuffer::record_size(size_t obs_dim) {
  return 8 * obs_dim  // obs
         + 8          // action
         + 8          // reward
         + 8 * obs_dim  // next_obs
         + 1            // terminated
         + 8            // v_behavior
         + 8;           // policy_id
}

void ReplayBuffer::dump(const std::string& path) const {
  std::string buf;
  buf.append("SUFTRB1", 7);
  put_u32(buf, static_cast<uint32_t>(obs_dim_));
  put_u64(buf, static_cast<uint64_t>(len_));
  for (size_t i = 0; i < len_; ++i) {
    const Transition& t = at(i);
    for (double v : t.obs) put_f64(buf, v);
    put_u64(buf, static_cast<uint64_t>(static_cast<int64_t>(t.action)));
    put_f64(buf, t.reward);
    for (double v : t.next_obs) put_f64(buf, v);
    buf.push_back(t.terminated ? 1 : 0);
    put_f64(buf, t.v_behavior);
    put_u64(buf, t.policy_id);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open dump file: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("dump write failed: " + path);
}

}  // namespace suft
