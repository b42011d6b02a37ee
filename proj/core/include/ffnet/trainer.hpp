#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ffnet/qnet.hpp"
#include "ffnet/reward.hpp"
#include "ffnet/stream.hpp"

namespace ffnet {

struct TrainingConfig {
  std::size_t epochs = 2000;  // one episode per epoch
  std::size_t memory_size = 128;
  double epsilon_init = 1.0;
  double epsilon_min = 0.1;
  double epsilon_decay = 1e-5;  // per batch update
  double gamma = 0.8;
  RewardConfig reward;
  ActionSpace actions = ActionSpace::uniform(25);
  std::uint64_t seed = 0;
  std::size_t start_index = 0;
  // When set, the memory is kept as a FIFO of capacity memory_size instead
  // of being emptied after each update (conventional replay, for ablation).
  bool retain_memory = false;

  void validate() const;  // throws ConfigError
};

// One row per batch update; this is what the CSV log carries.
struct UpdateRecord {
  std::size_t epoch = 0;          // 1-based episode counter
  std::size_t episode_steps = 0;  // steps taken in the current episode so far
  double epsilon = 0.0;           // value after this update's decay
  double loss = 0.0;              // pre-step batch MSE
  double mean_reward = 0.0;       // mean immediate reward of the episode so far
  std::size_t batch_size = 0;     // not serialized; kept for diagnostics
};

// One row per finished episode (in-memory only).
struct EpisodeRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double mean_reward = 0.0;
};

struct TrainingLog {
  std::vector<UpdateRecord> updates;
  std::vector<EpisodeRecord> episodes;

  // CSV with header "epoch,steps,epsilon,loss,mean_reward", one data row per
  // batch update.
  void write_csv(const std::filesystem::path& path) const;
};

// epsilon-greedy selection: a uniformly random index with probability
// epsilon, otherwise greedy_action(q_values).
int select_action(std::span<const double> q_values, double epsilon,
                  std::mt19937_64& rng);

// One rollout from config.start_index to the last frame without learning.
// A raw jump past the end is clamped so the final transition lands on the
// last frame. A single-frame video yields no transitions.
std::vector<Transition> run_episode(const LabeledVideo& video, const QNetwork& net,
                                    double epsilon, const TrainingConfig& config,
                                    std::mt19937_64& rng);

// Full training loop: per epoch, pick a video uniformly at random, roll out
// an episode pushing (state, target) pairs into the batch memory, and run a
// gradient step + epsilon decay each time the memory reaches memory_size
// (emptying it afterwards unless retain_memory is set). Targets are built at
// insertion time from the network's current outputs.
std::pair<QNetwork, TrainingLog> train(std::span<const LabeledVideo> dataset,
                                       const QNetworkConfig& qconfig,
                                       const TrainingConfig& tconfig);

}  // namespace ffnet
