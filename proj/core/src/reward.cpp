#include "ffnet/reward.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ffnet {

ActionSpace ActionSpace::uniform(int size) {
  if (size < 1) throw ConfigError("actions: size must be >= 1");
  std::vector<int> jumps(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) jumps[static_cast<std::size_t>(i)] = i + 1;
  return ActionSpace(std::move(jumps));
}

ActionSpace ActionSpace::from_jumps(std::vector<int> jumps) {
  if (jumps.empty()) throw ConfigError("actions: jump table must be nonempty");
  if (jumps.front() < 1) throw ConfigError("actions: smallest jump must be >= 1");
  for (std::size_t i = 1; i < jumps.size(); ++i) {
    if (jumps[i] <= jumps[i - 1]) {
      throw ConfigError("actions: jump table must be strictly increasing");
    }
  }
  return ActionSpace(std::move(jumps));
}

int ActionSpace::jump(int action) const {
  if (action < 0 || action >= size()) {
    throw Error("action index " + std::to_string(action) + " out of range [0, " +
                std::to_string(size()) + ")");
  }
  return jumps_[static_cast<std::size_t>(action)];
}

void RewardConfig::validate() const {
  if (T < 1) throw ConfigError("reward: T must be >= 1");
  if (beta < 0.0 || beta > 1.0) throw ConfigError("reward: beta must be in [0, 1]");
  if (sigma <= 0.0) throw ConfigError("reward: sigma must be > 0");
  if (w < 0) throw ConfigError("reward: w must be >= 0");
}

double gaussian_kernel(std::int64_t t, std::int64_t i, double sigma) {
  if (sigma <= 0.0) throw Error("invalid sigma");
  const double d = static_cast<double>(t - i);
  return std::exp(-(d * d) / (2.0 * sigma * sigma)) /
         std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

double skip_penalty(std::span<const std::uint8_t> interval_labels,
                    const RewardConfig& config) {
  std::size_t important = 0;
  for (auto l : interval_labels) important += (l == 1);
  const std::size_t unimportant = interval_labels.size() - important;
  return static_cast<double>(important) / config.T -
         config.beta * static_cast<double>(unimportant) / config.T;
}

double hit_reward(std::span<const std::uint8_t> video_labels, std::size_t z,
                  const RewardConfig& config) {
  if (z >= video_labels.size()) throw Error("landing index out of range");
  const auto zi = static_cast<std::int64_t>(z);
  const auto len = static_cast<std::int64_t>(video_labels.size());
  double reward = 0.0;
  for (std::int64_t i = zi - config.w; i <= zi + config.w; ++i) {
    if (i < 0 || i >= len) continue;
    if (video_labels[static_cast<std::size_t>(i)] == 1) {
      reward += gaussian_kernel(zi, i, config.sigma);
    }
  }
  return reward;
}

double immediate_reward(std::span<const std::uint8_t> video_labels,
                        std::size_t from_index, std::size_t jump,
                        const RewardConfig& config) {
  if (jump < 1) throw Error("jump must be >= 1");
  const std::size_t landing = from_index + jump;
  if (landing >= video_labels.size()) throw Error("jump exceeds video");
  const auto skipped = video_labels.subspan(from_index + 1, jump - 1);
  return -skip_penalty(skipped, config) + hit_reward(video_labels, landing, config);
}

double accumulated_reward(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

}  // namespace ffnet
