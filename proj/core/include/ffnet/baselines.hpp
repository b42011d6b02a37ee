#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ffnet/qnet.hpp"
#include "ffnet/reward.hpp"
#include "ffnet/runtime.hpp"
#include "ffnet/stream.hpp"
#include "ffnet/trainer.hpp"

namespace ffnet {

// Fixed-speed fast-forward: processed = {0, stride, 2*stride, ...}.
// Reads no features.
SelectionResult uniform_skip(std::size_t length, std::size_t stride,
                             std::size_t halfwidth);

// Same rollout mechanics as run_policy but with uniformly random actions and
// no feature reads. Deterministic per seed.
SelectionResult random_policy(std::size_t length, const ActionSpace& actions,
                              std::size_t halfwidth, std::uint64_t seed);

// Largest stride whose presented set still reaches `budget` frames, so the
// result can be trimmed to exactly the budget. Falls back to 1.
std::size_t choose_uniform_stride(std::size_t length, std::size_t halfwidth,
                                  std::size_t budget);

// Single-pass online k-means: centroids seeded with distance-weighted
// sampling, then one sequential pass updating the nearest centroid with
// learning rate 1/count. The frame nearest each final centroid becomes a
// processed frame. This baseline reads every frame, so its
// processing_percentage is reported as 100.
SelectionResult online_kmeans_select(std::span<const FrameFeatures> frames,
                                     std::size_t k, std::size_t halfwidth,
                                     std::optional<std::size_t> budget,
                                     std::uint64_t seed);

// Regressor trained to predict, from a frame's features, the distance to the
// next important frame (clamped to max_jump). Drives a rollout by jumping
// the rounded prediction.
struct JumpRegressor {
  QNetwork net;
  int max_jump;
};

// Regression target for one frame; frames with no later important frame get
// max_jump. Exposed for tests.
int supervised_jump_target(std::span<const std::uint8_t> labels, std::size_t index,
                           int max_jump);

// Trains on every frame of every video. Uses tconfig.epochs full-batch
// gradient steps at qconfig.learning_rate. Throws DataError when the dataset
// has no important frame at all.
JumpRegressor train_supervised_jump(std::span<const LabeledVideo> dataset,
                                    QNetworkConfig qconfig,
                                    const TrainingConfig& tconfig);

// Rollout under the regressor's predicted jumps. actions holds the applied
// advance per step.
SelectionResult run_jump_regressor(const JumpRegressor& regressor,
                                   std::span<const FrameFeatures> frames,
                                   const RuntimeConfig& config);

}  // namespace ffnet
