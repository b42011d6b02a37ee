#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffnet/qnet.hpp"
#include "ffnet/reward.hpp"
#include "ffnet/stream.hpp"

namespace ffnet {

// Output of one inference pass. `processed` are the frames the policy
// visited and evaluated; `presented` adds the neighbor windows shown to a
// user. processing_percentage is 100 * |processed| / stream length for every
// producer except the online k-means baseline, which reads the whole stream
// and reports 100.
struct SelectionResult {
  std::vector<std::size_t> processed;
  std::vector<std::size_t> presented;
  std::vector<int> actions;  // per decision step; empty for non-policy selectors
  double processing_percentage = 0.0;

  std::string to_json() const;
  static SelectionResult from_json(const std::string& text);
};

struct RuntimeConfig {
  std::size_t present_halfwidth = 4;
  std::size_t start_index = 0;
  std::optional<std::size_t> budget;  // presented-frame cap, >= |processed|

  void validate() const;  // throws ConfigError
};

// Read-tracking view over a frame stream. run_policy pulls features through
// this facade, which is how tests verify that skipped frames are never read.
class CountingFrameSource {
 public:
  explicit CountingFrameSource(std::span<const FrameFeatures> frames);

  const FrameFeatures& at(std::size_t index);
  std::size_t size() const { return frames_.size(); }
  std::size_t feature_dim() const { return frames_.empty() ? 0 : frames_[0].size(); }

  std::size_t distinct_reads() const { return distinct_reads_; }
  bool was_read(std::size_t index) const { return read_.at(index); }

 private:
  std::span<const FrameFeatures> frames_;
  std::vector<bool> read_;
  std::size_t distinct_reads_ = 0;
};

// Strictly greedy rollout from config.start_index to the last frame, with
// the same end-of-stream clamping as training. Every visited frame is read
// and evaluated exactly once.
SelectionResult run_policy(CountingFrameSource& source, const QNetwork& net,
                           const ActionSpace& actions, const RuntimeConfig& config);
SelectionResult run_policy(std::span<const FrameFeatures> frames, const QNetwork& net,
                           const ActionSpace& actions, const RuntimeConfig& config);

// Union of [p - halfwidth, p + halfwidth] over processed frames, clipped to
// [0, length), sorted and deduplicated.
std::vector<std::size_t> presented_set(std::span<const std::size_t> processed,
                                       std::size_t halfwidth, std::size_t length);

// Shrinks presentation windows symmetrically (one frame per side per round,
// never dropping processed frames) until |presented| <= budget; a partial
// final round drops highest-index window frames first. Throws Error when
// budget < |processed|.
std::vector<std::size_t> match_budget(std::span<const std::size_t> presented,
                                      std::span<const std::size_t> processed,
                                      std::size_t budget);

}  // namespace ffnet
