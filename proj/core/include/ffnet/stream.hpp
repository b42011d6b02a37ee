#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffnet/common.hpp"

namespace ffnet {

// One frame's feature vector. All frames of a dataset share dimension D >= 1
// and every value is finite; load/generate validate this.
using FrameFeatures = std::vector<double>;

// Inclusive frame-index range of one ground-truth important segment.
struct GroundTruthSegment {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool operator==(const GroundTruthSegment&) const = default;
};

// A feature stream with per-frame binary importance labels. Immutable after
// construction by convention; nothing here mutates a loaded video.
struct LabeledVideo {
  std::string id;
  std::vector<FrameFeatures> frames;
  std::vector<std::uint8_t> labels;  // one 0/1 per frame
  // Segment annotations from the manifest, when provided. When absent the
  // ground truth defaults to maximal runs of label 1 (see segments_of).
  std::optional<std::vector<GroundTruthSegment>> explicit_segments;

  std::size_t length() const { return frames.size(); }
  std::size_t feature_dim() const { return frames.empty() ? 0 : frames.front().size(); }

  // Throws DataError if the frame/label shapes or values are inconsistent.
  void validate() const;
};

struct SyntheticConfig {
  std::size_t num_videos = 25;
  std::size_t frames_per_video = 500;
  std::size_t feature_dim = 16;
  std::size_t num_important_segments = 5;
  std::size_t segment_length_min = 10;
  std::size_t segment_length_max = 30;
  double feature_separation = 2.0;  // ||u_imp - u_unimp||
  double noise_std = 0.3;           // per-coordinate
  std::uint64_t seed = 7;

  void validate() const;  // throws ConfigError
};

// Maximal runs of consecutive 1-labels, sorted by start.
// Throws DataError on an empty label sequence.
std::vector<GroundTruthSegment> derive_segments(std::span<const std::uint8_t> labels);

// Explicit manifest segments when present, otherwise derive_segments(labels).
std::vector<GroundTruthSegment> segments_of(const LabeledVideo& video);

// Deterministic two-cluster generator: frames inside important runs are drawn
// around u_imp, the rest around u_unimp, with ||u_imp - u_unimp|| equal to
// feature_separation and i.i.d. per-coordinate noise. Same config (seed
// included) reproduces the same dataset byte for byte.
// Throws DataError when the requested segments cannot be placed.
std::vector<LabeledVideo> generate_synthetic(const SyntheticConfig& config);

// Manifest-driven dataset IO. Layout on disk:
//   manifest.json      {"feature_dim": D, "videos": [{"id", "features",
//                       "labels", "segments"?}]}, paths relative to the
//                       manifest's directory
//   <id>.features.csv  one row per frame, D comma-separated decimals
//   <id>.labels.txt    one '0' or '1' per line
//   <id>.segments.csv  optional "start,end" rows, inclusive 0-based
std::vector<LabeledVideo> load_dataset(const std::filesystem::path& manifest_path);
void save_dataset(const std::filesystem::path& out_dir,
                  std::span<const LabeledVideo> videos);

// Reads a bare features CSV (one frame per row, expected_dim values each;
// expected_dim 0 infers the dimension from the first row).
std::vector<FrameFeatures> load_features_csv(const std::filesystem::path& path,
                                             std::size_t expected_dim = 0);

}  // namespace ffnet
