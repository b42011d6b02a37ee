#include "ffnet/evaluation.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace ffnet {

void EvaluationConfig::validate() const {
  if (hit_min < 1 || hit_max < hit_min) {
    throw ConfigError("evaluation: need 1 <= hit_min <= hit_max");
  }
  if (kmeans_k < 1) throw ConfigError("evaluation: kmeans_k must be >= 1");
}

double segment_coverage(std::span<const GroundTruthSegment> segments,
                        std::span<const std::size_t> selected, int hit_number,
                        bool exclude_short_segments) {
  if (hit_number < 1) throw Error("hit_number must be >= 1");
  std::size_t total = 0;
  std::size_t covered = 0;
  for (const auto& seg : segments) {
    if (exclude_short_segments &&
        seg.length() < static_cast<std::size_t>(hit_number)) {
      continue;
    }
    ++total;
    const auto lo = std::lower_bound(selected.begin(), selected.end(), seg.start);
    const auto hi = std::upper_bound(selected.begin(), selected.end(), seg.end);
    if (static_cast<std::size_t>(hi - lo) >= static_cast<std::size_t>(hit_number)) {
      ++covered;
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

double selected_run_precision(std::span<const std::uint8_t> labels,
                              std::span<const std::size_t> selected, int hit_number) {
  if (hit_number < 1) throw Error("hit_number must be >= 1");
  std::size_t runs = 0;
  std::size_t hits = 0;
  std::size_t i = 0;
  while (i < selected.size()) {
    std::size_t important = labels[selected[i]] == 1 ? 1 : 0;
    while (i + 1 < selected.size() && selected[i + 1] == selected[i] + 1) {
      ++i;
      important += labels[selected[i]] == 1;
    }
    ++runs;
    if (important >= static_cast<std::size_t>(hit_number)) ++hits;
    ++i;
  }
  if (runs == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(runs);
}

CoverageCurve coverage_curve(std::span<const GroundTruthSegment> segments,
                             std::span<const std::size_t> selected, int hit_min,
                             int hit_max, std::string method,
                             bool exclude_short_segments) {
  if (hit_min < 1 || hit_max < hit_min) throw Error("invalid hit range");
  CoverageCurve curve;
  curve.method = std::move(method);
  for (int hit = hit_min; hit <= hit_max; ++hit) {
    curve.points.push_back(
        {hit, segment_coverage(segments, selected, hit, exclude_short_segments)});
  }
  if (!exclude_short_segments) {
    // Antitone in the hit number by construction under the strict denominator.
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      assert(curve.points[i].coverage <= curve.points[i - 1].coverage);
    }
  }
  return curve;
}

std::vector<ComparisonRow> compare_methods(std::span<const LabeledVideo> dataset,
                                           std::span<const MethodResults> results,
                                           const EvaluationConfig& config) {
  config.validate();
  std::vector<ComparisonRow> rows;
  for (const auto& method : results) {
    if (method.per_video.size() != dataset.size()) {
      const std::size_t missing = method.per_video.size();
      const std::string video_id =
          missing < dataset.size() ? dataset[missing].id : "<extra>";
      throw DataError("method '" + method.method + "' missing result for video '" +
                      video_id + "'");
    }

    double pct_sum = 0.0;
    for (const auto& r : method.per_video) pct_sum += r.processing_percentage;
    const double mean_pct = pct_sum / static_cast<double>(dataset.size());

    for (int hit = config.hit_min; hit <= config.hit_max; ++hit) {
      double coverage_sum = 0.0;
      std::size_t counted = 0;
      for (std::size_t v = 0; v < dataset.size(); ++v) {
        const auto segments = segments_of(dataset[v]);
        if (config.selected_run_metric) {
          coverage_sum += selected_run_precision(dataset[v].labels,
                                                 method.per_video[v].presented, hit);
          ++counted;
          continue;
        }
        if (segments.empty()) continue;  // vacuous videos would inflate the mean
        coverage_sum += segment_coverage(segments, method.per_video[v].presented, hit,
                                         config.exclude_short_segments);
        ++counted;
      }
      rows.push_back({method.method, hit,
                      counted > 0 ? coverage_sum / static_cast<double>(counted) : 0.0,
                      mean_pct});
    }
  }
  return rows;
}

void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const ComparisonRow> rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "method,hit_number,mean_coverage,mean_processing_pct\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.9g,%.9g\n", row.method.c_str(),
                  row.hit_number, row.mean_coverage, row.mean_processing_pct);
    out << buf;
  }
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::vector<ComparisonRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    ComparisonRow row;
    std::size_t p0 = line.find(',');
    std::size_t p1 = line.find(',', p0 + 1);
    std::size_t p2 = line.find(',', p1 + 1);
    if (p0 == std::string::npos || p1 == std::string::npos || p2 == std::string::npos) {
      throw DataError("malformed row in " + path.string() + " line " +
                      std::to_string(line_no));
    }
    row.method = line.substr(0, p0);
    row.hit_number = std::stoi(line.substr(p0 + 1, p1 - p0 - 1));
    row.mean_coverage = std::stod(line.substr(p1 + 1, p2 - p1 - 1));
    row.mean_processing_pct = std::stod(line.substr(p2 + 1));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ffnet
