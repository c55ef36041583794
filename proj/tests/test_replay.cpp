#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "doctest.h"
#include "suft/replay.hpp"
#include "suft/rng.hpp"

using namespace suft;

namespace {

Transition make_t(double tag, uint64_t policy = 0) {
  Transition t;
  t.obs = {tag, 0.0};
  t.next_obs = {tag + 0.5, 0.0};
  t.action = 1;
  t.reward = tag;
  t.v_behavior = 2.0 * tag;
  t.policy_id = policy;
  return t;
}

}  // namespace

TEST_CASE("push is FIFO beyond capacity") {
  ReplayBuffer buf(2);
  buf.push(make_t(1));
  buf.push(make_t(2));
  CHECK(buf.size() == 2);
  buf.push(make_t(3));
  CHECK(buf.size() == 2);
  CHECK(buf.at(0).reward == 2.0);
  CHECK(buf.at(1).reward == 3.0);

  // len after k <= capacity pushes equals k.
  ReplayBuffer small(10);
  for (int k = 1; k <= 7; ++k) {
    small.push(make_t(k));
    CHECK(small.size() == static_cast<size_t>(k));
  }
}

TEST_CASE("push rejects non-finite transitions") {
  ReplayBuffer buf(4);
  Transition bad = make_t(1);
  bad.reward = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(buf.push(bad), std::invalid_argument);

  Transition bad2 = make_t(1);
  bad2.v_behavior = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(buf.push(bad2), std::invalid_argument);

  Transition bad3 = make_t(1);
  bad3.obs[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(buf.push(bad3), std::invalid_argument);
  CHECK(buf.size() == 0);
}

TEST_CASE("sampling") {
  ReplayBuffer buf(8);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), not_ready);

  // With replacement: a buffer of one can serve any batch size.
  buf.push(make_t(7));
  auto batch = buf.sample(3, rng);
  CHECK(batch.size() == 3);
  for (const auto& t : batch) CHECK(t.reward == 7.0);

  // Fixed rng state gives identical batches.
  buf.push(make_t(8));
  buf.push(make_t(9));
  Rng a(99), b(99);
  auto ba = buf.sample(5, a);
  auto bb = buf.sample(5, b);
  for (size_t i = 0; i < ba.size(); ++i) CHECK(ba[i].reward == bb[i].reward);
}

TEST_CASE("sampling frequencies are uniform") {
  const size_t k = 10;
  ReplayBuffer buf(k);
  for (size_t i = 0; i < k; ++i) buf.push(make_t(static_cast<double>(i)));

  const int n = 1000000;
  std::vector<int> counts(k, 0);
  Rng rng(12345);
  for (int i = 0; i < n; ++i) {
    ++counts[static_cast<size_t>(buf.sample(1, rng)[0].reward)];
  }
  const double expected = static_cast<double>(n) / k;
  const double sd = std::sqrt(n * (1.0 / k) * (1.0 - 1.0 / k));
  for (size_t i = 0; i < k; ++i) {
    CHECK(std::fabs(counts[i] - expected) <= 4.0 * sd);
  }
}

TEST_CASE("distinct policies") {
  ReplayBuffer buf(16);
  CHECK(buf.distinct_policies() == 0);
  buf.push(make_t(1, 0));
  buf.push(make_t(2, 0));
  CHECK(buf.distinct_policies() == 1);
  buf.push(make_t(3, 1));
  buf.push(make_t(4, 0));
  CHECK(buf.distinct_policies() == 2);
}

TEST_CASE("FIFO eviction matches a naive list model") {
  ReplayBuffer buf(5);
  std::deque<double> model;
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    if (rng.uniform() < 0.7 || model.empty()) {
      const double tag = rng.uniform(-100.0, 100.0);
      buf.push(make_t(tag, static_cast<uint64_t>(i / 10)));
      model.push_back(tag);
      if (model.size() > 5) model.pop_front();
    } else {
      Rng probe(rng.next_u64());
      (void)buf.sample(1 + probe.uniform_int(model.size()), probe);
    }
    REQUIRE(buf.size() == model.size());
    REQUIRE(buf.size() <= buf.capacity());
    for (size_t j = 0; j < model.size(); ++j) {
      REQUIRE(buf.at(j).reward == model[j]);
    }
  }
}

TEST_CASE("v_behavior stays exactly as pushed") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 10; ++i) buf.push(make_t(0.1 * i));
  for (size_t j = 0; j < buf.size(); ++j) {
    CHECK(buf.at(j).v_behavior == 2.0 * buf.at(j).reward);
  }
}

TEST_CASE("dump layout costs exactly one scalar for v_behavior") {
  // Record width with the recycled value minus width without it == 8 bytes.
  const size_t obs_dim = 25;
  const size_t without_v = 8 * obs_dim + 8 + 8 + 8 * obs_dim + 1 + 8;
  CHECK(ReplayBuffer::record_size(obs_dim) == without_v + 8);

  ReplayBuffer buf(4);
  buf.push(make_t(1));
  buf.push(make_t(2));
  const auto path = std::filesystem::temp_directory_path() / "suft_rb.bin";
  buf.dump(path.string());
  const size_t header = 7 + 4 + 8;
  CHECK(std::filesystem::file_size(path) ==
        header + 2 * ReplayBuffer::record_size(2));
  std::filesystem::remove(path);
}
