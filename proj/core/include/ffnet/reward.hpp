#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ffnet/common.hpp"
#include "ffnet/stream.hpp"

namespace ffnet {

// Discrete action space. Action indices are 0-based everywhere in this
// library (including result JSON); the default space has jump(i) = i + 1,
// i.e. action 0 advances one frame (contiguous playback) and action M-1
// advances M frames.
class ActionSpace {
 public:
  // jump(i) = i + 1 for i in [0, size).
  static ActionSpace uniform(int size);
  // Custom strictly increasing jump table, jumps[0] >= 1.
  static ActionSpace from_jumps(std::vector<int> jumps);

  int size() const { return static_cast<int>(jumps_.size()); }
  int jump(int action) const;
  int min_jump() const { return jumps_.front(); }
  int max_jump() const { return jumps_.back(); }

  // Cursor displacement for an action. With skip_then_land the action value
  // counts skipped frames and the cursor lands one past them.
  int advance(int action) const { return jump(action) + (skip_then_land ? 1 : 0); }
  int min_advance() const { return min_jump() + (skip_then_land ? 1 : 0); }
  int max_advance() const { return max_jump() + (skip_then_land ? 1 : 0); }

  bool skip_then_land = false;

 private:
  explicit ActionSpace(std::vector<int> jumps) : jumps_(std::move(jumps)) {}
  std::vector<int> jumps_;
};

// Immediate-reward hyperparameters. T normalizes skip counts, beta trades
// off skipping unimportant frames against important ones, and (sigma, w)
// shape the Gaussian label spreading of the hit reward.
struct RewardConfig {
  int T = 25;
  double beta = 0.8;
  double sigma = 1.0;
  int w = 4;

  void validate() const;  // throws ConfigError
};

// One training quadruple (s_k, a_k, s_{k+1}, r_k).
struct Transition {
  FrameFeatures state;
  int action = 0;
  FrameFeatures next_state;
  double reward = 0.0;
};

// Normal density at t for a unit mass centered on frame i:
// (1/sqrt(2*pi*sigma^2)) * exp(-(t-i)^2 / (2*sigma^2)). Symmetric in (t, i).
double gaussian_kernel(std::int64_t t, std::int64_t i, double sigma);

// Penalty for a skipped interval:
// (#important)/T - beta * (#unimportant)/T. Empty interval -> 0.
double skip_penalty(std::span<const std::uint8_t> interval_labels,
                    const RewardConfig& config);

// Reward for landing at frame z: sum of the Gaussian kernel over important
// frames within [z-w, z+w], out-of-range indices contributing zero.
double hit_reward(std::span<const std::uint8_t> video_labels, std::size_t z,
                  const RewardConfig& config);

// r = -skip_penalty(labels strictly between from and from+jump) +
//     hit_reward(labels, from+jump). The landing frame is not part of the
// skipped interval.
double immediate_reward(std::span<const std::uint8_t> video_labels,
                        std::size_t from_index, std::size_t jump,
                        const RewardConfig& config);

// Discounted return sum_k gamma^(k-1) * r_k, k starting at 1.
double accumulated_reward(std::span<const double> rewards, double gamma);

}  // namespace ffnet
