#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ffnet/evaluation.hpp"
#include "ffnet/qnet.hpp"
#include "ffnet/reward.hpp"
#include "ffnet/runtime.hpp"
#include "ffnet/stream.hpp"
#include "ffnet/trainer.hpp"

namespace ffnet {

// Everything an experiment file can configure, with the library defaults.
// Sections and keys mirror the struct fields: [synthetic], [reward],
// [actions], [qnet], [training], [runtime], [evaluation].
struct ExperimentConfig {
  SyntheticConfig synthetic;
  RewardConfig reward;

  struct Actions {
    int size = 25;
    std::vector<int> jumps;  // optional explicit jump table
    bool skip_then_land = false;
  } actions;

  struct QNet {
    std::vector<std::size_t> hidden_dims{64, 32};
    std::string activation = "relu";
    double init_scale = 0.0;
    double learning_rate = 1.0;
    std::uint64_t seed = 1;
  } qnet;

  struct Training {
    std::size_t epochs = 60000;
    std::size_t memory_size = 128;
    double epsilon_init = 1.0;
    double epsilon_min = 0.1;
    double epsilon_decay = 1e-5;
    double gamma = 0.8;
    std::uint64_t seed = 1;
    std::size_t start_index = 0;
    bool retain_memory = false;
  } training;

  RuntimeConfig runtime;
  EvaluationConfig evaluation;
  bool include_supervised = false;  // [evaluation] include_supervised

  ActionSpace action_space() const;
  QNetworkConfig qnetwork_config(std::size_t input_dim) const;
  TrainingConfig training_config() const;

  void validate() const;  // throws ConfigError
};

// Parses the experiment file: [section] headers, key = value lines, #
// comments, integer / float / bool / quoted-string / [int, ...] values.
// Unknown sections or keys are ConfigErrors naming the offending line.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace ffnet
