#include "ffnet/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace ffnet {

using nlohmann::json;

std::string SelectionResult::to_json() const {
  json j;
  j["processed"] = processed;
  j["presented"] = presented;
  j["actions"] = actions;
  j["processing_percentage"] = processing_percentage;
  return j.dump();
}

SelectionResult SelectionResult::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed selection result JSON: ") + e.what());
  }
  SelectionResult result;
  try {
    result.processed = j.at("processed").get<std::vector<std::size_t>>();
    result.presented = j.at("presented").get<std::vector<std::size_t>>();
    result.actions = j.at("actions").get<std::vector<int>>();
    result.processing_percentage = j.at("processing_percentage").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("selection result JSON missing field: ") + e.what());
  }
  return result;
}

void RuntimeConfig::validate() const {
  // present_halfwidth and start_index are unsigned; nothing further to check
  // until the stream length is known.
}

CountingFrameSource::CountingFrameSource(std::span<const FrameFeatures> frames)
    : frames_(frames), read_(frames.size(), false) {}

const FrameFeatures& CountingFrameSource::at(std::size_t index) {
  if (index >= frames_.size()) {
    throw Error("frame index " + std::to_string(index) + " out of range");
  }
  if (!read_[index]) {
    read_[index] = true;
    ++distinct_reads_;
  }
  return frames_[index];
}

SelectionResult run_policy(CountingFrameSource& source, const QNetwork& net,
                           const ActionSpace& actions, const RuntimeConfig& config) {
  if (source.size() == 0) throw Error("empty frame stream");
  if (source.feature_dim() != net.input_dim()) {
    throw Error("stream dimension " + std::to_string(source.feature_dim()) +
                " does not match network input_dim " + std::to_string(net.input_dim()));
  }
  if (config.start_index >= source.size()) {
    throw Error("start_index out of range");
  }

  SelectionResult result;
  const std::size_t last = source.size() - 1;
  std::size_t cursor = config.start_index;
  for (;;) {
    const std::vector<double> q = net.forward(source.at(cursor));
    result.processed.push_back(cursor);
    if (cursor == last) break;
    const int action = greedy_action(q);
    result.actions.push_back(action);
    cursor = std::min(cursor + static_cast<std::size_t>(actions.advance(action)), last);
  }

  result.presented = presented_set(result.processed, config.present_halfwidth,
                                   source.size());
  if (config.budget) {
    result.presented = match_budget(result.presented, result.processed, *config.budget);
  }
  result.processing_percentage =
      100.0 * static_cast<double>(result.processed.size()) /
      static_cast<double>(source.size());
  return result;
}

SelectionResult run_policy(std::span<const FrameFeatures> frames, const QNetwork& net,
                           const ActionSpace& actions, const RuntimeConfig& config) {
  CountingFrameSource source(frames);
  return run_policy(source, net, actions, config);
}

std::vector<std::size_t> presented_set(std::span<const std::size_t> processed,
                                       std::size_t halfwidth, std::size_t length) {
  std::vector<std::size_t> presented;
  for (std::size_t p : processed) {
    const std::size_t lo = p > halfwidth ? p - halfwidth : 0;
    const std::size_t hi = std::min(p + halfwidth, length > 0 ? length - 1 : 0);
    for (std::size_t i = lo; i <= hi; ++i) presented.push_back(i);
  }
  std::sort(presented.begin(), presented.end());
  presented.erase(std::unique(presented.begin(), presented.end()), presented.end());
  return presented;
}

std::vector<std::size_t> match_budget(std::span<const std::size_t> presented,
                                      std::span<const std::size_t> processed,
                                      std::size_t budget) {
  if (budget < processed.size()) throw Error("budget below processed count");
  if (presented.size() <= budget) {
    return {presented.begin(), presented.end()};
  }

  // Window membership is implied by distance to the nearest processed frame;
  // shrinking every window by one frame per side per round removes the
  // outermost distance shell each time.
  auto nearest_distance = [&](std::size_t f) {
    auto it = std::lower_bound(processed.begin(), processed.end(), f);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    if (it != processed.end()) best = *it - f;
    if (it != processed.begin()) best = std::min(best, f - *(it - 1));
    return best;
  };

  std::vector<std::pair<std::size_t, std::size_t>> by_distance;  // (distance, frame)
  std::size_t max_distance = 0;
  for (std::size_t f : presented) {
    const std::size_t d = nearest_distance(f);
    by_distance.emplace_back(d, f);
    max_distance = std::max(max_distance, d);
  }

  std::size_t to_remove = presented.size() - budget;
  std::vector<std::size_t> kept;
  kept.reserve(budget);
  for (std::size_t shell = max_distance; shell >= 1 && to_remove > 0; --shell) {
    std::vector<std::size_t> ring;
    for (const auto& [d, f] : by_distance) {
      if (d == shell) ring.push_back(f);
    }
    if (ring.size() <= to_remove) {
      to_remove -= ring.size();
      for (auto& entry : by_distance) {
        if (entry.first == shell) entry.first = std::numeric_limits<std::size_t>::max();
      }
    } else {
      // Partial round: drop the highest-index frames of this shell first.
      std::sort(ring.begin(), ring.end());
      for (std::size_t i = ring.size() - to_remove; i < ring.size(); ++i) {
        for (auto& entry : by_distance) {
          if (entry.second == ring[i] &&
              entry.first != std::numeric_limits<std::size_t>::max()) {
            entry.first = std::numeric_limits<std::size_t>::max();
            break;
          }
        }
      }
      to_remove = 0;
    }
  }
  for (const auto& [d, f] : by_distance) {
    if (d != std::numeric_limits<std::size_t>::max()) kept.push_back(f);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace ffnet
