#include "ffnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ffnet {

SelectionResult uniform_skip(std::size_t length, std::size_t stride,
                             std::size_t halfwidth) {
  if (length == 0) throw Error("empty frame stream");
  if (stride < 1) throw Error("stride must be >= 1");
  SelectionResult result;
  for (std::size_t i = 0; i < length; i += stride) result.processed.push_back(i);
  result.presented = presented_set(result.processed, halfwidth, length);
  result.processing_percentage =
      100.0 * static_cast<double>(result.processed.size()) / static_cast<double>(length);
  return result;
}

SelectionResult random_policy(std::size_t length, const ActionSpace& actions,
                              std::size_t halfwidth, std::uint64_t seed) {
  if (length == 0) throw Error("empty frame stream");
  SelectionResult result;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, actions.size() - 1);
  const std::size_t last = length - 1;
  std::size_t cursor = 0;
  for (;;) {
    result.processed.push_back(cursor);
    if (cursor == last) break;
    const int action = pick(rng);
    result.actions.push_back(action);
    cursor = std::min(cursor + static_cast<std::size_t>(actions.advance(action)), last);
  }
  result.presented = presented_set(result.processed, halfwidth, length);
  result.processing_percentage =
      100.0 * static_cast<double>(result.processed.size()) / static_cast<double>(length);
  return result;
}

std::size_t choose_uniform_stride(std::size_t length, std::size_t halfwidth,
                                  std::size_t budget) {
  for (std::size_t stride = length; stride >= 2; --stride) {
    std::vector<std::size_t> processed;
    for (std::size_t i = 0; i < length; i += stride) processed.push_back(i);
    if (presented_set(processed, halfwidth, length).size() >= budget) return stride;
  }
  return 1;
}

namespace {

double squared_distance(const FrameFeatures& a, const FrameFeatures& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Distance-weighted centroid seeding: first pick uniform, each further pick
// with probability proportional to the squared distance to the nearest
// centroid chosen so far.
std::vector<FrameFeatures> seed_centroids(std::span<const FrameFeatures> frames,
                                          std::size_t k, std::mt19937_64& rng) {
  std::vector<FrameFeatures> centroids;
  centroids.reserve(k);
  std::uniform_int_distribution<std::size_t> first(0, frames.size() - 1);
  centroids.push_back(frames[first(rng)]);

  std::vector<double> best(frames.size());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      double d = squared_distance(frames[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        d = std::min(d, squared_distance(frames[i], centroids[c]));
      }
      best[i] = d;
      total += d;
    }
    std::size_t chosen;
    if (total <= 0.0) {
      std::uniform_int_distribution<std::size_t> any(0, frames.size() - 1);
      chosen = any(rng);
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      chosen = frames.size() - 1;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        r -= best[i];
        if (r <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(frames[chosen]);
  }
  return centroids;
}

}  // namespace

SelectionResult online_kmeans_select(std::span<const FrameFeatures> frames,
                                     std::size_t k, std::size_t halfwidth,
                                     std::optional<std::size_t> budget,
                                     std::uint64_t seed) {
  if (frames.empty()) throw Error("empty frame stream");
  if (k < 1) throw Error("k must be >= 1");
  if (k > frames.size()) {
    throw Error("k = " + std::to_string(k) + " exceeds stream length " +
                std::to_string(frames.size()));
  }

  std::mt19937_64 rng(seed);
  std::vector<FrameFeatures> centroids = seed_centroids(frames, k, rng);
  std::vector<std::size_t> counts(k, 1);

  // Sequential pass: assign each frame to its nearest centroid and move the
  // centroid by 1/count toward it.
  for (const FrameFeatures& frame : frames) {
    std::size_t nearest = 0;
    double best = squared_distance(frame, centroids[0]);
    for (std::size_t c = 1; c < k; ++c) {
      const double d = squared_distance(frame, centroids[c]);
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    ++counts[nearest];
    const double rate = 1.0 / static_cast<double>(counts[nearest]);
    FrameFeatures& centroid = centroids[nearest];
    for (std::size_t d = 0; d < centroid.size(); ++d) {
      centroid[d] += rate * (frame[d] - centroid[d]);
    }
  }

  SelectionResult result;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const double d = squared_distance(frames[i], centroids[c]);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    result.processed.push_back(nearest);
  }
  std::sort(result.processed.begin(), result.processed.end());
  result.processed.erase(
      std::unique(result.processed.begin(), result.processed.end()),
      result.processed.end());

  result.presented = presented_set(result.processed, halfwidth, frames.size());
  if (budget) {
    result.presented = match_budget(result.presented, result.processed,
                                    std::max(*budget, result.processed.size()));
  }
  // Every frame was read during the pass.
  result.processing_percentage = 100.0;
  return result;
}

int supervised_jump_target(std::span<const std::uint8_t> labels, std::size_t index,
                           int max_jump) {
  for (std::size_t j = index + 1; j < labels.size(); ++j) {
    const auto dist = static_cast<std::int64_t>(j - index);
    if (dist > max_jump) break;
    if (labels[j] == 1) return static_cast<int>(dist);
  }
  return max_jump;
}

JumpRegressor train_supervised_jump(std::span<const LabeledVideo> dataset,
                                    QNetworkConfig qconfig,
                                    const TrainingConfig& tconfig) {
  if (dataset.empty()) throw DataError("training dataset is empty");
  const int max_jump = tconfig.actions.max_jump();

  bool any_important = false;
  std::vector<TrainSample> samples;
  for (const auto& video : dataset) {
    if (video.feature_dim() != qconfig.input_dim) {
      throw DataError("video '" + video.id + "' has dimension " +
                      std::to_string(video.feature_dim()) + ", network expects " +
                      std::to_string(qconfig.input_dim));
    }
    if (std::find(video.labels.begin(), video.labels.end(), 1) == video.labels.end()) {
      continue;
    }
    any_important = true;
    for (std::size_t i = 0; i < video.length(); ++i) {
      samples.push_back(TrainSample{
          video.frames[i],
          {static_cast<double>(supervised_jump_target(video.labels, i, max_jump))}});
    }
  }
  if (!any_important) throw DataError("no supervision signal");

  qconfig.output_dim = 1;
  QNetwork net(qconfig);
  for (std::size_t step = 0; step < tconfig.epochs; ++step) {
    net.train_batch(samples, qconfig.learning_rate);
  }
  return JumpRegressor{std::move(net), max_jump};
}

SelectionResult run_jump_regressor(const JumpRegressor& regressor,
                                   std::span<const FrameFeatures> frames,
                                   const RuntimeConfig& config) {
  if (frames.empty()) throw Error("empty frame stream");
  if (config.start_index >= frames.size()) throw Error("start_index out of range");
  SelectionResult result;
  const std::size_t last = frames.size() - 1;
  std::size_t cursor = config.start_index;
  for (;;) {
    const std::vector<double> out = regressor.net.forward(frames[cursor]);
    result.processed.push_back(cursor);
    if (cursor == last) break;
    const double predicted = std::round(out[0]);
    const int jump = static_cast<int>(
        std::clamp(predicted, 1.0, static_cast<double>(regressor.max_jump)));
    result.actions.push_back(jump);
    cursor = std::min(cursor + static_cast<std::size_t>(jump), last);
  }
  result.presented = presented_set(result.processed, config.present_halfwidth,
                                   frames.size());
  if (config.budget) {
    result.presented = match_budget(result.presented, result.processed, *config.budget);
  }
  result.processing_percentage =
      100.0 * static_cast<double>(result.processed.size()) /
      static_cast<double>(frames.size());
  return result;
}

}  // namespace ffnet
