#include "ffnet/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <zlib.h>

namespace ffnet {

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("qnet: unknown activation '" + name + "' (expected relu or tanh)");
}

const char* activation_name(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

void QNetworkConfig::validate() const {
  if (input_dim < 1) throw ConfigError("qnet: input_dim must be >= 1");
  if (output_dim < 1) throw ConfigError("qnet: output_dim must be >= 1");
  if (hidden_dims.empty()) throw ConfigError("qnet: at least one hidden layer required");
  for (auto w : hidden_dims) {
    if (w < 1) throw ConfigError("qnet: hidden widths must be >= 1");
  }
  if (learning_rate <= 0.0) throw ConfigError("qnet: learning_rate must be > 0");
}

namespace {

double activate(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the post-activation value.
double activate_grad(Activation a, double y) {
  return a == Activation::kRelu ? (y > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

void ensure_shapes(NetworkGradients& grads, const std::vector<DenseLayer>& layers) {
  if (grads.layers.size() == layers.size()) {
    bool ok = true;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (grads.layers[l].rows != layers[l].rows || grads.layers[l].cols != layers[l].cols) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (auto& g : grads.layers) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      return;
    }
  }
  grads.layers.clear();
  for (const auto& layer : layers) {
    DenseLayer g;
    g.rows = layer.rows;
    g.cols = layer.cols;
    g.weights.assign(layer.rows * layer.cols, 0.0);
    g.bias.assign(layer.rows, 0.0);
    grads.layers.push_back(std::move(g));
  }
}

}  // namespace

QNetwork::QNetwork(const QNetworkConfig& config) : config_(config) {
  config_.validate();
  std::vector<std::size_t> dims;
  dims.push_back(config_.input_dim);
  dims.insert(dims.end(), config_.hidden_dims.begin(), config_.hidden_dims.end());
  dims.push_back(config_.output_dim);

  std::mt19937_64 rng(config_.seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.cols = dims[l];
    layer.rows = dims[l + 1];
    const double scale = config_.init_scale > 0.0
                             ? config_.init_scale
                             : 1.0 / std::sqrt(static_cast<double>(layer.cols));
    std::uniform_real_distribution<double> dist(-scale, scale);
    layer.weights.resize(layer.rows * layer.cols);
    layer.bias.resize(layer.rows);
    for (auto& w : layer.weights) w = dist(rng);
    for (auto& b : layer.bias) b = dist(rng);
    layers_.push_back(std::move(layer));
  }
}

std::vector<double> QNetwork::forward(std::span<const double> state) const {
  if (state.size() != config_.input_dim) {
    throw Error("state dimension " + std::to_string(state.size()) +
                " does not match network input_dim " + std::to_string(config_.input_dim));
  }
  std::vector<double> current(state.begin(), state.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    next.assign(layer.rows, 0.0);
    for (std::size_t r = 0; r < layer.rows; ++r) {
      const double* wrow = layer.weights.data() + r * layer.cols;
      double z = layer.bias[r];
      for (std::size_t c = 0; c < layer.cols; ++c) z += wrow[c] * current[c];
      next[r] = (l + 1 < layers_.size()) ? activate(config_.activation, z) : z;
    }
    current.swap(next);
  }
  return current;
}

double QNetwork::loss_and_gradients(std::span<const TrainSample> batch,
                                    NetworkGradients& grads) const {
  if (batch.empty()) throw Error("empty batch");
  ensure_shapes(grads, layers_);

  const std::size_t num_layers = layers_.size();
  const double norm = 1.0 / (static_cast<double>(batch.size()) *
                             static_cast<double>(config_.output_dim));
  double loss = 0.0;

  // activations[0] is the input, activations[l+1] the output of layer l
  // (post-activation except for the final linear layer).
  std::vector<std::vector<double>> activations(num_layers + 1);
  std::vector<double> delta, delta_prev;

  for (const TrainSample& sample : batch) {
    if (sample.state.size() != config_.input_dim) {
      throw Error("batch state dimension mismatch");
    }
    if (sample.target.size() != config_.output_dim) {
      throw Error("batch target dimension mismatch");
    }
    activations[0].assign(sample.state.begin(), sample.state.end());
    for (std::size_t l = 0; l < num_layers; ++l) {
      const DenseLayer& layer = layers_[l];
      activations[l + 1].assign(layer.rows, 0.0);
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const double* wrow = layer.weights.data() + r * layer.cols;
        double z = layer.bias[r];
        for (std::size_t c = 0; c < layer.cols; ++c) z += wrow[c] * activations[l][c];
        activations[l + 1][r] = (l + 1 < num_layers) ? activate(config_.activation, z) : z;
      }
    }

    delta.assign(config_.output_dim, 0.0);
    for (std::size_t j = 0; j < config_.output_dim; ++j) {
      const double err = activations[num_layers][j] - sample.target[j];
      loss += err * err * norm;
      delta[j] = 2.0 * err * norm;
    }

    for (std::size_t l = num_layers; l-- > 0;) {
      const DenseLayer& layer = layers_[l];
      DenseLayer& grad = grads.layers[l];
      const std::vector<double>& input = activations[l];
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        double* grow = grad.weights.data() + r * layer.cols;
        for (std::size_t c = 0; c < layer.cols; ++c) grow[c] += d * input[c];
        grad.bias[r] += d;
      }
      if (l == 0) break;
      delta_prev.assign(layer.cols, 0.0);
      for (std::size_t r = 0; r < layer.rows; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        const double* wrow = layer.weights.data() + r * layer.cols;
        for (std::size_t c = 0; c < layer.cols; ++c) delta_prev[c] += wrow[c] * d;
      }
      for (std::size_t c = 0; c < layer.cols; ++c) {
        delta_prev[c] *= activate_grad(config_.activation, input[c]);
      }
      delta.swap(delta_prev);
    }
  }
  return loss;
}

double QNetwork::train_batch(std::span<const TrainSample> batch, double learning_rate) {
  NetworkGradients grads;
  const double loss = loss_and_gradients(batch, grads);
  if (!std::isfinite(loss)) throw NumericError("non-finite loss in train_batch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    DenseLayer& layer = layers_[l];
    const DenseLayer& grad = grads.layers[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      layer.weights[i] -= learning_rate * grad.weights[i];
      if (!std::isfinite(layer.weights[i])) {
        throw NumericError("non-finite weight after update");
      }
    }
    for (std::size_t i = 0; i < layer.bias.size(); ++i) {
      layer.bias[i] -= learning_rate * grad.bias[i];
      if (!std::isfinite(layer.bias[i])) {
        throw NumericError("non-finite bias after update");
      }
    }
  }
  return loss;
}

double bellman_target(double reward, double max_next_q, double gamma) {
  return reward + gamma * max_next_q;
}

std::vector<double> build_target(std::span<const double> current_q, int chosen,
                                 double target_value) {
  if (chosen < 0 || static_cast<std::size_t>(chosen) >= current_q.size()) {
    throw Error("chosen action index out of range");
  }
  std::vector<double> target(current_q.begin(), current_q.end());
  target[static_cast<std::size_t>(chosen)] = target_value;
  return target;
}

int greedy_action(std::span<const double> q_values) {
  if (q_values.empty()) throw Error("empty Q-value vector");
  return static_cast<int>(std::max_element(q_values.begin(), q_values.end()) -
                          q_values.begin());
}

namespace {

constexpr char kMagic[4] = {'F', 'F', 'Q', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in, const char* field) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw DataError(std::string("unexpected end of weights file reading ") + field);
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void append_f64(std::string& payload, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int s = 0; s < 64; s += 8) {
    payload.push_back(static_cast<char>((bits >> s) & 0xff));
  }
}

double take_f64(const std::string& payload, std::size_t index) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) {
    bits = (bits << 8) |
           static_cast<unsigned char>(payload[index * 8 + static_cast<std::size_t>(b)]);
  }
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void save_weights(const QNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write weights file " + path.string());

  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(net.input_dim()));
  write_u32(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& layer : net.layers()) {
    write_u32(out, static_cast<std::uint32_t>(layer.rows));
    write_u32(out, static_cast<std::uint32_t>(layer.cols));
  }

  std::string payload;
  for (const auto& layer : net.layers()) {
    payload.reserve(payload.size() + 8 * (layer.weights.size() + layer.bias.size()));
    for (double v : layer.weights) append_f64(payload, v);
    for (double v : layer.bias) append_f64(payload, v);
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));

  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
            static_cast<uInt>(payload.size())));
  write_u32(out, crc);
  if (!out) throw DataError("failed writing weights file " + path.string());
}

QNetwork load_weights(const std::filesystem::path& path, Activation activation,
                      double learning_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file: " + path.string());

  char magic[4];
  if (!in.read(magic, 4)) throw DataError("unexpected end of weights file reading magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("bad magic in weights file " + path.string());
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw DataError("unsupported weights file version " + std::to_string(version));
  }
  const std::uint32_t input_dim = read_u32(in, "input_dim");
  const std::uint32_t layer_count = read_u32(in, "layer count");
  if (input_dim < 1) throw DataError("weights file input_dim must be >= 1");
  if (layer_count < 2 || layer_count > 1024) {
    throw DataError("weights file layer count out of range: " +
                    std::to_string(layer_count));
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
  std::size_t total_doubles = 0;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    const std::uint32_t rows = read_u32(in, "rows");
    const std::uint32_t cols = read_u32(in, "cols");
    if (rows < 1 || cols < 1 || static_cast<std::uint64_t>(rows) * cols > (1u << 30)) {
      throw DataError("weights file layer shape out of range");
    }
    const std::uint32_t expected_cols = (l == 0) ? input_dim : shapes.back().first;
    if (cols != expected_cols) {
      throw DataError("dimension mismatch in weights file: layer " + std::to_string(l) +
                      " expects " + std::to_string(expected_cols) + " inputs, declares " +
                      std::to_string(cols));
    }
    shapes.emplace_back(rows, cols);
    total_doubles += static_cast<std::size_t>(rows) * cols + rows;
  }

  std::string payload(total_doubles * 8, '\0');
  if (!in.read(payload.data(), static_cast<std::streamsize>(payload.size()))) {
    throw DataError("unexpected end of weights file");
  }
  const std::uint32_t stored_crc = read_u32(in, "checksum");
  const auto computed_crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
            static_cast<uInt>(payload.size())));
  if (stored_crc != computed_crc) {
    throw DataError("checksum mismatch in weights file " + path.string());
  }

  QNetworkConfig config;
  config.input_dim = input_dim;
  config.hidden_dims.clear();
  for (std::size_t l = 0; l + 1 < shapes.size(); ++l) {
    config.hidden_dims.push_back(shapes[l].first);
  }
  config.output_dim = shapes.back().first;
  config.activation = activation;
  config.learning_rate = learning_rate;

  QNetwork net(config);
  std::size_t cursor = 0;
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    DenseLayer& layer = net.layers()[l];
    for (auto& w : layer.weights) w = take_f64(payload, cursor++);
    for (auto& b : layer.bias) b = take_f64(payload, cursor++);
    for (double v : layer.weights) {
      if (!std::isfinite(v)) throw DataError("non-finite weight in weights file");
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) throw DataError("non-finite bias in weights file");
    }
  }
  return net;
}

}  // namespace ffnet
