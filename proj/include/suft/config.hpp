#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "suft/agent.hpp"

namespace suft {

// Invalid or malformed run configuration; the message names the field path.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsed run-config file. JSON shape:
// { "env": "...",
//   "agent": { "variant", "gamma", "lambda_tf", "loss", "lr", "batch_size",
//              "buffer_capacity", "target_sync_interval",
//              "epsilon": {"start", "end", "decay_steps"} },
//   "steps": N, "seeds": [..], "output_dir": "..." }
// Unknown keys anywhere are rejected.
struct RunConfig {
  std::string env;
  AgentConfig agent;
  int64_t steps = 0;
  std::vector<int64_t> seeds;
  std::string output_dir;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical JSON rendering (sorted keys), stable under field reordering in
// the source file.
std::string canonical_config_json(const RunConfig& config);

// FNV-1a hash of the canonical rendering, as a hex string.
std::string config_hash(const RunConfig& config);

// Agent block alone, for checkpoint sidecars.
std::string agent_config_json(const AgentConfig& agent);

}  // namespace suft
