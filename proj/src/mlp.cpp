#include "suft/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace suft {

namespace {

constexpr char kMagic[7] = {'S', 'U', 'F', 'T', 'N', 'N', '1'};

void require_shape(const Mlp& net) {
  if (net.layer_sizes.size() < 2) {
    throw std::invalid_argument("network needs at least input and output layers");
  }
  for (int s : net.layer_sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  if (net.weights.size() != mlp_param_count(net.layer_sizes)) {
    throw std::invalid_argument("weight vector length does not match layer sizes");
  }
}

double activate(Activation a, double z) {
  return a == Activation::ReLU ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_grad(Activation a, double z, double out) {
  return a == Activation::ReLU ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - out * out;
}

}  // namespace

size_t mlp_param_count(const std::vector<int>& layer_sizes) {
  size_t n = 0;
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += static_cast<size_t>(layer_sizes[l]) * layer_sizes[l + 1] +
         layer_sizes[l + 1];
  }
  return n;
}

size_t Mlp::n_params() const { return mlp_param_count(layer_sizes); }

Mlp Mlp::init(std::vector<int> layer_sizes, Activation activation,
              uint64_t seed) {
  Mlp net;
  net.layer_sizes = std::move(layer_sizes);
  net.activation = activation;
  net.weights.assign(mlp_param_count(net.layer_sizes), 0.0);
  require_shape(net);

  Rng rng(seed);
  size_t off = 0;
  for (size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int fan_in = net.layer_sizes[l];
    const int fan_out = net.layer_sizes[l + 1];
    const double w_limit = std::sqrt(6.0 / fan_in);
    for (int i = 0; i < fan_out * fan_in; ++i) {
      net.weights[off++] = rng.uniform(-w_limit, w_limit);
    }
    // Nonzero bias init keeps pre-activations off the exact ReLU kink even
    // when a whole sample goes dead in an earlier layer.
    const double b_limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < fan_out; ++i) {
      net.weights[off++] = rng.uniform(-b_limit, b_limit);
    }
  }
  return net;
}

std::vector<double> forward_batch(const Mlp& net,
                                  const std::vector<double>& inputs,
                                  int batch) {
  require_shape(net);
  if (batch < 1 || inputs.size() != static_cast<size_t>(batch) * net.in_dim()) {
    throw std::invalid_argument("input batch has wrong size");
  }

  std::vector<double> current(inputs);
  std::vector<double> next;
  size_t off = 0;
  const size_t n_layers = net.layer_sizes.size() - 1;
  for (size_t l = 0; l < n_layers; ++l) {
    const int n_in = net.layer_sizes[l];
    const int n_out = net.layer_sizes[l + 1];
    const double* w = net.weights.data() + off;
    const double* b = w + static_cast<size_t>(n_out) * n_in;
    next.assign(static_cast<size_t>(batch) * n_out, 0.0);
    for (int s = 0; s < batch; ++s) {
      const double* in_row = current.data() + static_cast<size_t>(s) * n_in;
      double* out_row = next.data() + static_cast<size_t>(s) * n_out;
      for (int o = 0; o < n_out; ++o) {
        const double* w_row = w + static_cast<size_t>(o) * n_in;
        double z = b[o];
        for (int i = 0; i < n_in; ++i) z += w_row[i] * in_row[i];
        out_row[o] = l + 1 == n_layers ? z : activate(net.activation, z);
      }
    }
    current.swap(next);
    off += static_cast<size_t>(n_out) * n_in + n_out;
  }
  return current;
}

std::vector<double> forward(const Mlp& net, const std::vector<double>& input) {
  return forward_batch(net, input, 1);
}

BackwardResult backward(const Mlp& net, const std::vector<double>& inputs,
                        int batch, const BatchLossFn& loss_fn) {
  require_shape(net);
  if (batch < 1 || inputs.size() != static_cast<size_t>(batch) * net.in_dim()) {
    throw std::invalid_argument("input batch has wrong size");
  }

  const size_t n_layers = net.layer_sizes.size() - 1;

  // Forward, keeping pre-activations and activations per layer.
  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  acts[0] = inputs;
  size_t off = 0;
  for (size_t l = 0; l < n_layers; ++l) {
    const int n_in = net.layer_sizes[l];
    const int n_out = net.layer_sizes[l + 1];
    const double* w = net.weights.data() + off;
    const double* b = w + static_cast<size_t>(n_out) * n_in;
    pre[l].assign(static_cast<size_t>(batch) * n_out, 0.0);
    acts[l + 1].assign(static_cast<size_t>(batch) * n_out, 0.0);
    for (int s = 0; s < batch; ++s) {
      const double* in_row = acts[l].data() + static_cast<size_t>(s) * n_in;
      double* z_row = pre[l].data() + static_cast<size_t>(s) * n_out;
      double* a_row = acts[l + 1].data() + static_cast<size_t>(s) * n_out;
      for (int o = 0; o < n_out; ++o) {
        const double* w_row = w + static_cast<size_t>(o) * n_in;
        double z = b[o];
        for (int i = 0; i < n_in; ++i) z += w_row[i] * in_row[i];
        z_row[o] = z;
        a_row[o] = l + 1 == n_layers ? z : activate(net.activation, z);
      }
    }
    off += static_cast<size_t>(n_out) * n_in + n_out;
  }

  BackwardResult result;
  result.grad.assign(net.weights.size(), 0.0);

  std::vector<double> delta(acts[n_layers].size(), 0.0);
  result.loss = loss_fn(acts[n_layers].data(), batch, net.out_dim(),
                        delta.data());

  // Backward through the layers.
  std::vector<double> delta_prev;
  for (size_t l = n_layers; l-- > 0;) {
    const int n_in = net.layer_sizes[l];
    const int n_out = net.layer_sizes[l + 1];
    off -= static_cast<size_t>(n_out) * n_in + n_out;
    const double* w = net.weights.data() + off;
    double* gw = result.grad.data() + off;
    double* gb = gw + static_cast<size_t>(n_out) * n_in;

    // delta currently holds d(loss)/d(activation of layer l+1); fold in the
    // activation derivative for hidden layers (output layer is linear).
    if (l + 1 < n_layers) {
      for (size_t k = 0; k < delta.size(); ++k) {
        delta[k] *= activate_grad(net.activation, pre[l][k], acts[l + 1][k]);
      }
    }

    delta_prev.assign(static_cast<size_t>(batch) * n_in, 0.0);
    for (int s = 0; s < batch; ++s) {
      const double* in_row = acts[l].data() + static_cast<size_t>(s) * n_in;
      const double* d_row = delta.data() + static_cast<size_t>(s) * n_out;
      double* dp_row = delta_prev.data() + static_cast<size_t>(s) * n_in;
      for (int o = 0; o < n_out; ++o) {
        const double d = d_row[o];
        if (d == 0.0) continue;
        double* gw_row = gw + static_cast<size_t>(o) * n_in;
        const double* w_row = w + static_cast<size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) {
          gw_row[i] += d * in_row[i];
          dp_row[i] += d * w_row[i];
        }
        gb[o] += d;
      }
    }
    delta.swap(delta_prev);
  }
  return result;
}

GradCheckReport grad_check(const Mlp& net, const std::vector<double>& inputs,
                           int batch, const BatchLossFn& loss_fn, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  BackwardResult analytic = backward(net, inputs, batch, loss_fn);

  Mlp probe = net;
  std::vector<double> scratch(static_cast<size_t>(batch) * net.out_dim());
  auto loss_at = [&]() {
    std::vector<double> out = forward_batch(probe, inputs, batch);
    std::fill(scratch.begin(), scratch.end(), 0.0);
    return loss_fn(out.data(), batch, probe.out_dim(), scratch.data());
  };

  GradCheckReport report;
  for (size_t i = 0; i < probe.weights.size(); ++i) {
    const double saved = probe.weights[i];
    probe.weights[i] = saved + h;
    const double up = loss_at();
    probe.weights[i] = saved - h;
    const double down = loss_at();
    probe.weights[i] = saved;

    const double numeric = (up - down) / (2.0 * h);
    const double analytic_i = analytic.grad[i];
    const double rel = std::fabs(analytic_i - numeric) /
                       std::max({1.0, std::fabs(analytic_i), std::fabs(numeric)});
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_index = i;
    }
  }
  report.passed = report.max_rel_err < 1e-5;
  return report;
}

void adam_step(Mlp& net, const std::vector<double>& grad, AdamState& state,
               double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (grad.size() != net.weights.size() || state.m.size() != net.weights.size() ||
      state.v.size() != net.weights.size()) {
    throw std::invalid_argument("gradient/state length mismatch");
  }
  state.step += 1;
  const double b1 = AdamState::kBeta1;
  const double b2 = AdamState::kBeta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t i = 0; i < net.weights.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    net.weights[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEps);
  }
}

Mlp clone_weights(const Mlp& net) { return net; }

void copy_into_target(const Mlp& online, Mlp& target) {
  if (online.layer_sizes != target.layer_sizes ||
      online.activation != target.activation) {
    throw std::invalid_argument("target network shape mismatch");
  }
  target.weights = online.weights;
}

namespace {

void put_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& data;
  size_t pos = 0;

  void need(size_t n, const char* what) const {
    if (pos + n > data.size()) throw parse_error(std::string("truncated ") + what, pos);
  }
  uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<uint8_t>(data[pos++]);
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(static_cast<uint8_t>(data[pos + i])) << (8 * i);
    pos += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

}  // namespace

void save_weights(const Mlp& net, const std::string& path) {
  require_shape(net);
  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  buf.push_back(static_cast<char>(net.activation));
  put_u32(buf, static_cast<uint32_t>(net.layer_sizes.size()));
  for (int s : net.layer_sizes) put_u32(buf, static_cast<uint32_t>(s));
  for (double w : net.weights) put_f64(buf, w);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Mlp load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  Reader r{data};
  r.need(sizeof(kMagic), "magic");
  if (std::memcmp(data.data(), kMagic, 6) != 0) {
    throw parse_error("bad checkpoint magic", 0);
  }
  if (data[6] != kMagic[6]) {
    throw version_error(std::string("unsupported checkpoint version '") +
                        data[6] + "'");
  }
  r.pos = sizeof(kMagic);

  Mlp net;
  const uint8_t act = r.u8("activation code");
  if (act > 1) throw parse_error("unknown activation code", r.pos - 1);
  net.activation = static_cast<Activation>(act);

  const uint32_t n_layers = r.u32("layer count");
  if (n_layers < 2 || n_layers > 64) throw parse_error("implausible layer count", r.pos - 4);
  net.layer_sizes.resize(n_layers);
  for (uint32_t i = 0; i < n_layers; ++i) {
    const uint32_t s = r.u32("layer size");
    if (s < 1 || s > (1u << 20)) throw parse_error("implausible layer size", r.pos - 4);
    net.layer_sizes[i] = static_cast<int>(s);
  }

  const size_t n_params = mlp_param_count(net.layer_sizes);
  net.weights.resize(n_params);
  for (size_t i = 0; i < n_params; ++i) net.weights[i] = r.f64("weight");
  if (r.pos != data.size()) throw parse_error("trailing bytes after weights", r.pos);
  return net;
}

}  // namespace suft
