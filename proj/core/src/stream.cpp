#include "ffnet/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace ffnet {

namespace fs = std::filesystem;
using nlohmann::json;

void LabeledVideo::validate() const {
  if (frames.empty()) throw DataError("video '" + id + "': empty frame sequence");
  if (frames.size() != labels.size()) {
    throw DataError("video '" + id + "': " + std::to_string(frames.size()) +
                    " frames but " + std::to_string(labels.size()) + " labels");
  }
  const std::size_t dim = frames.front().size();
  if (dim == 0) throw DataError("video '" + id + "': zero feature dimension");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != dim) {
      throw DataError("video '" + id + "': frame " + std::to_string(i) +
                      " has dimension " + std::to_string(frames[i].size()) +
                      ", expected " + std::to_string(dim));
    }
    for (double v : frames[i]) {
      if (!std::isfinite(v)) {
        throw DataError("video '" + id + "': non-finite feature in frame " +
                        std::to_string(i));
      }
    }
    if (labels[i] > 1) {
      throw DataError("video '" + id + "': non-binary label at frame " +
                      std::to_string(i));
    }
  }
  if (explicit_segments) {
    std::size_t prev_end = 0;
    bool first = true;
    for (const auto& seg : *explicit_segments) {
      if (seg.start > seg.end || seg.end >= frames.size()) {
        throw DataError("video '" + id + "': segment [" + std::to_string(seg.start) +
                        "," + std::to_string(seg.end) + "] out of range");
      }
      if (!first && seg.start <= prev_end) {
        throw DataError("video '" + id + "': segments overlap or are unsorted");
      }
      prev_end = seg.end;
      first = false;
    }
  }
}

void SyntheticConfig::validate() const {
  if (num_videos < 1) throw ConfigError("synthetic: num_videos must be >= 1");
  if (frames_per_video < 1) throw ConfigError("synthetic: frames_per_video must be >= 1");
  if (feature_dim < 1) throw ConfigError("synthetic: feature_dim must be >= 1");
  if (segment_length_min < 1 || segment_length_min > segment_length_max) {
    throw ConfigError("synthetic: segment_length_range must satisfy 1 <= min <= max");
  }
  if (frames_per_video < num_important_segments * segment_length_max) {
    throw ConfigError("synthetic: frames_per_video must be >= num_important_segments "
                      "* segment_length_max");
  }
  if (noise_std < 0) throw ConfigError("synthetic: noise_std must be >= 0");
  if (feature_separation <= 0) throw ConfigError("synthetic: feature_separation must be > 0");
}

std::vector<GroundTruthSegment> derive_segments(std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw DataError("empty label sequence");
  std::vector<GroundTruthSegment> segments;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == 1) {
      std::size_t start = i;
      while (i + 1 < labels.size() && labels[i + 1] == 1) ++i;
      segments.push_back({start, i});
    }
    ++i;
  }
  return segments;
}

std::vector<GroundTruthSegment> segments_of(const LabeledVideo& video) {
  if (video.explicit_segments) return *video.explicit_segments;
  return derive_segments(video.labels);
}

namespace {

// Uniform composition of `slack` extra gap frames into k+1 slots, via k
// distinct sorted draws from [1, slack+k].
std::vector<std::size_t> draw_gap_extras(std::size_t k, std::size_t slack,
                                         std::mt19937_64& rng) {
  if (k == 0) return {slack};
  std::vector<std::size_t> pool(slack + k);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  std::vector<std::size_t> cuts;
  std::sample(pool.begin(), pool.end(), std::back_inserter(cuts), k, rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> extras(k + 1);
  std::size_t prev = 0;
  for (std::size_t i = 0; i < k; ++i) {
    extras[i] = cuts[i] - prev - 1;
    prev = cuts[i];
  }
  extras[k] = slack + k - prev;
  return extras;
}

}  // namespace

std::vector<LabeledVideo> generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);

  // Cluster centers +/- sep/2 along a random unit direction.
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::vector<double> direction(config.feature_dim);
  double norm = 0.0;
  do {
    for (auto& d : direction) d = unit_normal(rng);
    norm = std::sqrt(std::inner_product(direction.begin(), direction.end(),
                                        direction.begin(), 0.0));
  } while (norm == 0.0);
  std::vector<double> center_important(config.feature_dim);
  std::vector<double> center_unimportant(config.feature_dim);
  for (std::size_t d = 0; d < config.feature_dim; ++d) {
    double offset = 0.5 * config.feature_separation * direction[d] / norm;
    center_important[d] = offset;
    center_unimportant[d] = -offset;
  }

  std::uniform_int_distribution<std::size_t> length_dist(config.segment_length_min,
                                                         config.segment_length_max);
  std::vector<LabeledVideo> videos;
  videos.reserve(config.num_videos);
  for (std::size_t v = 0; v < config.num_videos; ++v) {
    const std::size_t k = config.num_important_segments;
    std::vector<std::size_t> lengths(k);
    for (auto& len : lengths) len = length_dist(rng);
    const std::size_t total_important =
        std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
    // Segments must be separated by at least one unimportant frame so that
    // label runs stay distinct.
    const std::size_t required = total_important + (k > 0 ? k - 1 : 0);
    if (required > config.frames_per_video) throw DataError("segments do not fit");
    const std::size_t slack = config.frames_per_video - required;
    const std::vector<std::size_t> extras = draw_gap_extras(k, slack, rng);

    LabeledVideo video;
    char name[32];
    std::snprintf(name, sizeof(name), "synthetic_%03zu", v);
    video.id = name;
    video.labels.assign(config.frames_per_video, 0);
    std::size_t cursor = extras[0];
    for (std::size_t s = 0; s < k; ++s) {
      if (s > 0) cursor += 1 + extras[s];
      std::fill_n(video.labels.begin() + static_cast<std::ptrdiff_t>(cursor),
                  lengths[s], std::uint8_t{1});
      cursor += lengths[s];
    }

    video.frames.resize(config.frames_per_video);
    for (std::size_t i = 0; i < config.frames_per_video; ++i) {
      const auto& center = video.labels[i] ? center_important : center_unimportant;
      FrameFeatures f(config.feature_dim);
      for (std::size_t d = 0; d < config.feature_dim; ++d) {
        f[d] = center[d] + (config.noise_std > 0 ? config.noise_std * unit_normal(rng) : 0.0);
      }
      video.frames[i] = std::move(f);
    }
    video.validate();
    videos.push_back(std::move(video));
  }
  return videos;
}

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(std::string_view text, const fs::path& file, std::size_t line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("invalid number in " + file.string() + " line " +
                    std::to_string(line_no));
  }
  return value;
}

// expected_dim == 0 infers the dimension from the first row.
std::vector<FrameFeatures> load_features(const fs::path& path, std::size_t expected_dim) {
  std::vector<FrameFeatures> frames;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    FrameFeatures row;
    row.reserve(expected_dim);
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::size_t len = (comma == std::string::npos ? line.size() : comma) - pos;
      row.push_back(parse_double(std::string_view(line).substr(pos, len), path, n + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (expected_dim == 0) expected_dim = row.size();
    if (row.size() != expected_dim) {
      throw DataError("row-length mismatch in " + path.string() + " line " +
                      std::to_string(n + 1) + ": expected " +
                      std::to_string(expected_dim) + " values, got " +
                      std::to_string(row.size()));
    }
    frames.push_back(std::move(row));
  }
  return frames;
}

std::vector<std::uint8_t> load_labels(const fs::path& path) {
  std::vector<std::uint8_t> labels;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string token = lines[n];
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    if (token == "0") {
      labels.push_back(0);
    } else if (token == "1") {
      labels.push_back(1);
    } else {
      throw DataError("non-binary label in " + path.string() + " line " +
                      std::to_string(n + 1) + ": '" + token + "'");
    }
  }
  return labels;
}

std::vector<GroundTruthSegment> load_segments(const fs::path& path) {
  std::vector<GroundTruthSegment> segments;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("malformed segment row in " + path.string() + " line " +
                      std::to_string(n + 1));
    }
    double start = parse_double(std::string_view(line).substr(0, comma), path, n + 1);
    double end = parse_double(std::string_view(line).substr(comma + 1), path, n + 1);
    if (start < 0 || end < start) {
      throw DataError("invalid segment range in " + path.string() + " line " +
                      std::to_string(n + 1));
    }
    segments.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
  }
  return segments;
}

}  // namespace

std::vector<FrameFeatures> load_features_csv(const fs::path& path,
                                             std::size_t expected_dim) {
  return load_features(path, expected_dim);
}

std::vector<LabeledVideo> load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("missing file: " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("feature_dim") || !manifest["feature_dim"].is_number_integer()) {
    throw DataError("manifest " + manifest_path.string() + ": missing integer field 'feature_dim'");
  }
  if (!manifest.contains("videos") || !manifest["videos"].is_array()) {
    throw DataError("manifest " + manifest_path.string() + ": missing array field 'videos'");
  }
  const auto feature_dim = manifest["feature_dim"].get<std::size_t>();
  if (feature_dim < 1) {
    throw DataError("manifest " + manifest_path.string() + ": feature_dim must be >= 1");
  }

  const fs::path base = manifest_path.parent_path();
  std::vector<LabeledVideo> videos;
  for (const auto& entry : manifest["videos"]) {
    for (const char* field : {"id", "features", "labels"}) {
      if (!entry.contains(field) || !entry[field].is_string()) {
        throw DataError("manifest " + manifest_path.string() +
                        ": video entry missing string field '" + field + "'");
      }
    }
    LabeledVideo video;
    video.id = entry["id"].get<std::string>();
    const fs::path features_path = base / entry["features"].get<std::string>();
    const fs::path labels_path = base / entry["labels"].get<std::string>();
    video.frames = load_features(features_path, feature_dim);
    video.labels = load_labels(labels_path);
    if (video.frames.size() != video.labels.size()) {
      throw DataError("video '" + video.id + "': " + features_path.string() + " has " +
                      std::to_string(video.frames.size()) + " frames but " +
                      labels_path.string() + " has " +
                      std::to_string(video.labels.size()) + " labels");
    }
    if (entry.contains("segments")) {
      video.explicit_segments = load_segments(base / entry["segments"].get<std::string>());
    }
    video.validate();
    videos.push_back(std::move(video));
  }
  return videos;
}

void save_dataset(const fs::path& out_dir, std::span<const LabeledVideo> videos) {
  if (videos.empty()) throw DataError("cannot save an empty dataset");
  fs::create_directories(out_dir);
  const std::size_t feature_dim = videos.front().feature_dim();

  json manifest;
  manifest["feature_dim"] = feature_dim;
  manifest["videos"] = json::array();
  char buf[64];
  for (const auto& video : videos) {
    video.validate();
    if (video.feature_dim() != feature_dim) {
      throw DataError("video '" + video.id + "': dimension mismatch: has " +
                      std::to_string(video.feature_dim()) + ", dataset uses " +
                      std::to_string(feature_dim));
    }
    const std::string features_name = video.id + ".features.csv";
    const std::string labels_name = video.id + ".labels.txt";

    std::ofstream features(out_dir / features_name);
    if (!features) throw DataError("cannot write " + (out_dir / features_name).string());
    for (const auto& frame : video.frames) {
      for (std::size_t d = 0; d < frame.size(); ++d) {
        std::snprintf(buf, sizeof(buf), "%.17g", frame[d]);
        if (d > 0) features << ',';
        features << buf;
      }
      features << '\n';
    }

    std::ofstream labels(out_dir / labels_name);
    if (!labels) throw DataError("cannot write " + (out_dir / labels_name).string());
    for (auto l : video.labels) labels << int(l) << '\n';

    json entry;
    entry["id"] = video.id;
    entry["features"] = features_name;
    entry["labels"] = labels_name;
    if (video.explicit_segments) {
      const std::string segments_name = video.id + ".segments.csv";
      std::ofstream segments(out_dir / segments_name);
      if (!segments) throw DataError("cannot write " + (out_dir / segments_name).string());
      for (const auto& seg : *video.explicit_segments) {
        segments << seg.start << ',' << seg.end << '\n';
      }
      entry["segments"] = segments_name;
    }
    manifest["videos"].push_back(entry);
  }

  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw DataError("cannot write " + (out_dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace ffnet
