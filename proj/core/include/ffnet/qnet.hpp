#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ffnet/common.hpp"
#include "ffnet/stream.hpp"

namespace ffnet {

enum class Activation { kRelu, kTanh };

Activation activation_from_name(const std::string& name);  // throws ConfigError
const char* activation_name(Activation activation);

struct QNetworkConfig {
  std::size_t input_dim = 16;
  std::vector<std::size_t> hidden_dims{64, 32};  // two hidden layers by default
  std::size_t output_dim = 25;
  Activation activation = Activation::kRelu;
  // Uniform init bound per layer. <= 0 selects 1/sqrt(fan_in).
  double init_scale = 0.0;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;

  void validate() const;  // throws ConfigError
};

// One dense layer: y = W x + b with W row-major (rows x cols).
struct DenseLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;  // rows * cols
  std::vector<double> bias;     // rows
};

// Shape-compatible gradient accumulator for a network.
struct NetworkGradients {
  std::vector<DenseLayer> layers;
};

// (state, target) pair consumed by train_batch. Targets have output_dim
// entries; see build_target.
struct TrainSample {
  FrameFeatures state;
  std::vector<double> target;
};

// Fully connected value approximator: input -> hidden... -> output, with the
// configured activation between layers and a linear output layer. The output
// is one estimated value per action. Double precision throughout.
class QNetwork {
 public:
  explicit QNetwork(const QNetworkConfig& config);  // seeded uniform init

  std::vector<double> forward(std::span<const double> state) const;

  const QNetworkConfig& config() const { return config_; }
  std::size_t input_dim() const { return config_.input_dim; }
  std::size_t output_dim() const { return config_.output_dim; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  // Mean squared error over the batch: (1 / (B * M)) * sum ||forward(s) - target||^2.
  // Fills grads (allocating shapes on first use) with d(loss)/d(params).
  double loss_and_gradients(std::span<const TrainSample> batch,
                            NetworkGradients& grads) const;

  // One full-batch gradient-descent step. Returns the pre-step loss.
  // Throws Error on an empty batch and NumericError if the loss or any
  // updated parameter is non-finite.
  double train_batch(std::span<const TrainSample> batch, double learning_rate);

 private:
  QNetworkConfig config_;
  std::vector<DenseLayer> layers_;
};

// r + gamma * max_next_q.
double bellman_target(double reward, double max_next_q, double gamma);

// Copy of current_q with the chosen coordinate replaced by target_value.
std::vector<double> build_target(std::span<const double> current_q, int chosen,
                                 double target_value);

// Argmax with ties broken toward the smallest index.
int greedy_action(std::span<const double> q_values);

// Binary weights file, little-endian:
//   magic "FFQN", version u32, input_dim u32, layer count u32,
//   then rows u32 / cols u32 per layer,
//   then per layer the row-major weight doubles followed by the bias doubles,
//   then a CRC32 trailer (u32) over the float payload.
// The file stores parameters only; activation and learning rate come from the
// caller on load.
void save_weights(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_weights(const std::filesystem::path& path,
                      Activation activation = Activation::kRelu,
                      double learning_rate = 1e-3);

}  // namespace ffnet
