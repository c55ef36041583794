#include "suft/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace suft {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw config_error(path + key + ": unknown key");
    }
  }
}

const json& require_field(const json& obj, const char* key,
                          const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw config_error(path + key + ": missing");
  return *it;
}

double require_number(const json& obj, const char* key,
                      const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_number()) throw config_error(path + key + ": expected a number");
  return v.get<double>();
}

int64_t require_integer(const json& obj, const char* key,
                        const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_number_integer()) {
    throw config_error(path + key + ": expected an integer");
  }
  return v.get<int64_t>();
}

std::string require_string(const json& obj, const char* key,
                           const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_string()) throw config_error(path + key + ": expected a string");
  return v.get<std::string>();
}

AgentConfig parse_agent(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw config_error(path + ": expected an object");
  reject_unknown_keys(obj,
                      {"variant", "gamma", "lambda_tf", "loss", "lr",
                       "batch_size", "buffer_capacity", "target_sync_interval",
                       "epsilon"},
                      path + ".");

  AgentConfig a;
  try {
    a.variant = variant_from_string(require_string(obj, "variant", path + "."));
  } catch (const std::invalid_argument& e) {
    throw config_error(path + ".variant: " + e.what());
  }
  a.gamma = require_number(obj, "gamma", path + ".");
  a.lambda_tf = require_number(obj, "lambda_tf", path + ".");
  try {
    a.loss_kind = loss_from_string(require_string(obj, "loss", path + "."));
  } catch (const std::invalid_argument& e) {
    throw config_error(path + ".loss: " + e.what());
  }
  a.lr = require_number(obj, "lr", path + ".");
  a.batch_size = static_cast<int>(require_integer(obj, "batch_size", path + "."));
  a.buffer_capacity =
      static_cast<int>(require_integer(obj, "buffer_capacity", path + "."));
  a.target_sync_interval = static_cast<int>(
      require_integer(obj, "target_sync_interval", path + "."));

  const json& eps = require_field(obj, "epsilon", path + ".");
  const std::string eps_path = path + ".epsilon";
  if (!eps.is_object()) throw config_error(eps_path + ": expected an object");
  reject_unknown_keys(eps, {"start", "end", "decay_steps"}, eps_path + ".");
  a.epsilon.start = require_number(eps, "start", eps_path + ".");
  a.epsilon.end = require_number(eps, "end", eps_path + ".");
  a.epsilon.decay_steps = require_integer(eps, "decay_steps", eps_path + ".");

  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(path + "." + e.what());
  }
  return a;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config root must be an object");
  reject_unknown_keys(doc, {"env", "agent", "steps", "seeds", "output_dir"},
                      "");

  RunConfig c;
  c.env = require_string(doc, "env", "");
  if (c.env != "gridworld" && c.env != "cartpole") {
    throw config_error("env: unknown environment '" + c.env + "'");
  }
  c.agent = parse_agent(require_field(doc, "agent", ""), "agent");
  c.steps = require_integer(doc, "steps", "");
  if (c.steps < 0) throw config_error("steps: must be >= 0");

  const json& seeds = require_field(doc, "seeds", "");
  if (!seeds.is_array() || seeds.empty()) {
    throw config_error("seeds: expected a non-empty array");
  }
  for (const json& s : seeds) {
    if (!s.is_number_integer()) {
      throw config_error("seeds: expected integer entries");
    }
    c.seeds.push_back(s.get<int64_t>());
  }
  c.output_dir = require_string(doc, "output_dir", "");
  if (c.output_dir.empty()) throw config_error("output_dir: must be non-empty");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string agent_config_json(const AgentConfig& a) {
  json obj{
      {"variant", variant_to_string(a.variant)},
      {"gamma", a.gamma},
      {"lambda_tf", a.lambda_tf},
      {"loss", loss_to_string(a.loss_kind)},
      {"lr", a.lr},
      {"batch_size", a.batch_size},
      {"buffer_capacity", a.buffer_capacity},
      {"target_sync_interval", a.target_sync_interval},
      {"epsilon",
       {{"start", a.epsilon.start},
        {"end", a.epsilon.end},
        {"decay_steps", a.epsilon.decay_steps}}},
  };
  return obj.dump(2);
}

std::string canonical_config_json(const RunConfig& c) {
  json obj{
      {"env", c.env},
      {"agent", json::parse(agent_config_json(c.agent))},
      {"steps", c.steps},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
  };
  return obj.dump(2);  // nlohmann objects are key-sorted: canonical
}

std::string config_hash(const RunConfig& c) {
  const std::string text = canonical_config_json(c);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char byte : text) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace suft
