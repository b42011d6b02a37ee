#include "ffnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

namespace ffnet {

void TrainingConfig::validate() const {
  if (epsilon_min < 0.0 || epsilon_init > 1.0 || epsilon_min > epsilon_init) {
    throw ConfigError("training: need 0 <= epsilon_min <= epsilon_init <= 1");
  }
  if (epsilon_decay < 0.0) throw ConfigError("training: epsilon_decay must be >= 0");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("training: gamma must be in [0, 1]");
  if (memory_size < 1) throw ConfigError("training: memory_size must be >= 1");
  if (reward.T < actions.max_jump()) {
    throw ConfigError("training: reward T must be >= the largest jump");
  }
  reward.validate();
}

void TrainingLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write log file " + path.string());
  out << "epoch,steps,epsilon,loss,mean_reward\n";
  char buf[128];
  for (const auto& rec : updates) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9g,%.9g,%.9g\n", rec.epoch,
                  rec.episode_steps, rec.epsilon, rec.loss, rec.mean_reward);
    out << buf;
  }
  if (!out) throw DataError("failed writing log file " + path.string());
}

int select_action(std::span<const double> q_values, double epsilon,
                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(q_values.size()) - 1);
    return pick(rng);
  }
  return greedy_action(q_values);
}

namespace {

// One environment step shared by run_episode and train: chooses an action at
// `cursor`, clamps the landing to the last frame, and computes the reward.
struct Step {
  int action;
  std::size_t landing;
  double reward;
};

Step take_step(const LabeledVideo& video, std::span<const double> q, std::size_t cursor,
               double epsilon, const TrainingConfig& config, std::mt19937_64& rng) {
  Step step{};
  step.action = select_action(q, epsilon, rng);
  const std::size_t last = video.length() - 1;
  step.landing = std::min(cursor + static_cast<std::size_t>(config.actions.advance(step.action)), last);
  step.reward = immediate_reward(video.labels, cursor, step.landing - cursor, config.reward);
  return step;
}

void check_start(const LabeledVideo& video, const TrainingConfig& config) {
  if (config.start_index >= video.length()) {
    throw Error("start_index " + std::to_string(config.start_index) +
                " out of range for video '" + video.id + "' of length " +
                std::to_string(video.length()));
  }
}

}  // namespace

std::vector<Transition> run_episode(const LabeledVideo& video, const QNetwork& net,
                                    double epsilon, const TrainingConfig& config,
                                    std::mt19937_64& rng) {
  check_start(video, config);
  std::vector<Transition> transitions;
  const std::size_t last = video.length() - 1;
  std::size_t cursor = config.start_index;
  while (cursor < last) {
    const std::vector<double> q = net.forward(video.frames[cursor]);
    const Step step = take_step(video, q, cursor, epsilon, config, rng);
    transitions.push_back(Transition{video.frames[cursor], step.action,
                                     video.frames[step.landing], step.reward});
    cursor = step.landing;
  }
  return transitions;
}

std::pair<QNetwork, TrainingLog> train(std::span<const LabeledVideo> dataset,
                                       const QNetworkConfig& qconfig,
                                       const TrainingConfig& tconfig) {
  if (dataset.empty()) throw DataError("training dataset is empty");
  tconfig.validate();
  if (static_cast<std::size_t>(tconfig.actions.size()) != qconfig.output_dim) {
    throw ConfigError("qnet output_dim must equal the action-space size");
  }
  for (const auto& video : dataset) {
    if (video.feature_dim() != qconfig.input_dim) {
      throw DataError("video '" + video.id + "' has dimension " +
                      std::to_string(video.feature_dim()) +
                      ", network expects " + std::to_string(qconfig.input_dim));
    }
  }

  QNetwork net(qconfig);
  TrainingLog log;
  std::mt19937_64 rng(tconfig.seed);
  std::uniform_int_distribution<std::size_t> pick_video(0, dataset.size() - 1);
  std::deque<TrainSample> memory;
  std::vector<TrainSample> batch;
  double epsilon = tconfig.epsilon_init;
  std::size_t update_count = 0;

  for (std::size_t epoch = 1; epoch <= tconfig.epochs; ++epoch) {
    const LabeledVideo& video = dataset[pick_video(rng)];
    check_start(video, tconfig);
    const std::size_t last = video.length() - 1;
    std::size_t cursor = tconfig.start_index;
    std::size_t episode_steps = 0;
    double episode_reward_sum = 0.0;

    while (cursor < last) {
      const std::vector<double> q = net.forward(video.frames[cursor]);
      const Step step = take_step(video, q, cursor, epsilon, tconfig, rng);
      const std::vector<double> q_next = net.forward(video.frames[step.landing]);
      const double target_value = bellman_target(
          step.reward, *std::max_element(q_next.begin(), q_next.end()), tconfig.gamma);
      memory.push_back(TrainSample{video.frames[cursor],
                                   build_target(q, step.action, target_value)});
      if (tconfig.retain_memory && memory.size() > tconfig.memory_size) {
        memory.pop_front();
      }
      ++episode_steps;
      episode_reward_sum += step.reward;
      cursor = step.landing;

      if (memory.size() >= tconfig.memory_size) {
        batch.assign(memory.begin(), memory.end());
        const double loss = net.train_batch(batch, qconfig.learning_rate);
        // Computed from the update counter so the logged trajectory matches
        // max(epsilon_init - k * decay, epsilon_min) exactly.
        ++update_count;
        epsilon = std::max(
            tconfig.epsilon_init -
                static_cast<double>(update_count) * tconfig.epsilon_decay,
            tconfig.epsilon_min);
        log.updates.push_back(UpdateRecord{epoch, episode_steps, epsilon, loss,
                                           episode_reward_sum / episode_steps,
                                           batch.size()});
        if (!tconfig.retain_memory) memory.clear();
      }
    }
    log.episodes.push_back(EpisodeRecord{
        epoch, episode_steps,
        episode_steps > 0 ? episode_reward_sum / episode_steps : 0.0});
  }
  return {std::move(net), std::move(log)};
}

}  // namespace ffnet
