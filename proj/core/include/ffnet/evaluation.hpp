#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ffnet/runtime.hpp"
#include "ffnet/stream.hpp"

namespace ffnet {

struct CoveragePoint {
  int hit_number = 1;
  double coverage = 0.0;
};

// Coverage as a function of the hit-number threshold; non-increasing under
// the default (strict-denominator) accounting.
struct CoverageCurve {
  std::string method;
  std::vector<CoveragePoint> points;
};

struct EvaluationConfig {
  int hit_min = 1;
  int hit_max = 20;
  // Drop ground-truth segments shorter than the hit number from the
  // denominator (they can never be covered at that threshold). Off by
  // default: the strict reading keeps them.
  bool exclude_short_segments = false;
  // Report precision over the method's own selected runs instead of
  // coverage over ground-truth segments (sensitivity analysis).
  bool selected_run_metric = false;
  std::size_t kmeans_k = 20;
  std::uint64_t seed = 123;

  void validate() const;  // throws ConfigError
};

// Fraction of ground-truth segments with at least hit_number selected frames
// inside them. No segments -> 1.0 (vacuous).
double segment_coverage(std::span<const GroundTruthSegment> segments,
                        std::span<const std::size_t> selected, int hit_number,
                        bool exclude_short_segments = false);

// Alternative reading: fraction of the method's own maximal selected runs
// containing at least hit_number important frames. No runs -> 0.0.
double selected_run_precision(std::span<const std::uint8_t> labels,
                              std::span<const std::size_t> selected, int hit_number);

CoverageCurve coverage_curve(std::span<const GroundTruthSegment> segments,
                             std::span<const std::size_t> selected, int hit_min,
                             int hit_max, std::string method = {},
                             bool exclude_short_segments = false);

// One SelectionResult per video, aligned with the dataset order.
struct MethodResults {
  std::string method;
  std::vector<SelectionResult> per_video;
};

struct ComparisonRow {
  std::string method;
  int hit_number = 1;
  double mean_coverage = 0.0;
  double mean_processing_pct = 0.0;
};

// Per-method mean coverage across videos at each hit number plus mean
// processing percentage. Videos without ground-truth segments are excluded
// from the coverage mean. Throws DataError when a method is missing a
// video's result.
std::vector<ComparisonRow> compare_methods(std::span<const LabeledVideo> dataset,
                                           std::span<const MethodResults> results,
                                           const EvaluationConfig& config);

// CSV "method,hit_number,mean_coverage,mean_processing_pct".
void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const ComparisonRow> rows);
std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& path);

}  // namespace ffnet
