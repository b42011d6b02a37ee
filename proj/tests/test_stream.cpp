#include "ffnet/stream.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

using namespace ffnet;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("ffnet_stream_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

SyntheticConfig small_synthetic() {
  SyntheticConfig config;
  config.num_videos = 3;
  config.frames_per_video = 100;
  config.feature_dim = 4;
  config.num_important_segments = 3;
  config.segment_length_min = 10;
  config.segment_length_max = 10;
  config.noise_std = 0.2;
  config.seed = 7;
  return config;
}

}  // namespace

TEST(DeriveSegments, AllUnimportant) {
  const std::vector<std::uint8_t> labels{0, 0, 0};
  EXPECT_TRUE(derive_segments(labels).empty());
}

TEST(DeriveSegments, MaximalRuns) {
  const std::vector<std::uint8_t> labels{1, 1, 0, 1};
  const auto segments = derive_segments(labels);
  ASSERT_EQ(segments.size(), 2u);
  EXPECT_EQ(segments[0], (GroundTruthSegment{0, 1}));
  EXPECT_EQ(segments[1], (GroundTruthSegment{3, 3}));
}

TEST(DeriveSegments, EmptyInputRejected) {
  try {
    derive_segments({});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "empty label sequence");
  }
}

TEST(DeriveSegments, CoversExactlyTheOneLabeledIndices) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> labels(200);
    for (auto& l : labels) l = static_cast<std::uint8_t>(bit(rng));
    const auto segments = derive_segments(labels);

    std::set<std::size_t> from_segments;
    std::size_t previous_end = 0;
    bool first = true;
    for (const auto& seg : segments) {
      ASSERT_LE(seg.start, seg.end);
      ASSERT_LT(seg.end, labels.size());
      if (!first) ASSERT_GT(seg.start, previous_end + 1);  // maximality
      for (std::size_t i = seg.start; i <= seg.end; ++i) from_segments.insert(i);
      previous_end = seg.end;
      first = false;
    }
    std::set<std::size_t> from_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == 1) from_labels.insert(i);
    }
    ASSERT_EQ(from_segments, from_labels);
  }
}

TEST(GenerateSynthetic, DeterministicPerSeed) {
  const auto config = small_synthetic();
  const auto a = generate_synthetic(config);
  const auto b = generate_synthetic(config);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t v = 0; v < a.size(); ++v) {
    EXPECT_EQ(a[v].id, b[v].id);
    EXPECT_EQ(a[v].labels, b[v].labels);
    EXPECT_EQ(a[v].frames, b[v].frames);
  }
  auto other = config;
  other.seed = 8;
  EXPECT_NE(generate_synthetic(other)[0].labels, a[0].labels);
}

TEST(GenerateSynthetic, ZeroNoiseCollapsesToClusterCenters) {
  auto config = small_synthetic();
  config.noise_std = 0.0;
  config.feature_separation = 2.0;
  const auto videos = generate_synthetic(config);

  FrameFeatures important, unimportant;
  for (const auto& video : videos) {
    for (std::size_t i = 0; i < video.length(); ++i) {
      auto& bucket = video.labels[i] ? important : unimportant;
      if (bucket.empty()) {
        bucket = video.frames[i];
      } else {
        EXPECT_EQ(video.frames[i], bucket);
      }
    }
  }
  double dist = 0.0;
  for (std::size_t d = 0; d < important.size(); ++d) {
    dist += (important[d] - unimportant[d]) * (important[d] - unimportant[d]);
  }
  EXPECT_NEAR(std::sqrt(dist), 2.0, 1e-12);
}

TEST(GenerateSynthetic, LabelCountMatchesSegmentBudget) {
  const auto config = small_synthetic();  // 3 segments of exactly 10 frames
  for (const auto& video : generate_synthetic(config)) {
    std::size_t count = 0;
    for (auto l : video.labels) count += l;
    EXPECT_EQ(count, 30u);
    EXPECT_EQ(derive_segments(video.labels).size(), 3u);
  }
}

TEST(GenerateSynthetic, InfeasiblePlacementRejected) {
  auto config = small_synthetic();
  config.frames_per_video = 100;
  config.num_important_segments = 2;
  config.segment_length_min = 50;
  config.segment_length_max = 50;
  // 2 x 50 fills the video; the mandatory gap cannot fit.
  EXPECT_THROW(generate_synthetic(config), DataError);

  config.segment_length_max = 60;
  // Invariant violation is a config error, caught before placement.
  EXPECT_THROW(generate_synthetic(config), ConfigError);
}

TEST(LoadDataset, HandWrittenFixture) {
  TempDir dir("fixture");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 4, "videos": [
                  {"id": "clip", "features": "clip.features.csv",
                   "labels": "clip.labels.txt"}]})");
  write_file(dir.path() / "clip.features.csv",
             "0,0.5,1,1.5\n1,1.5,2,2.5\n2,2.5,3,3.5\n3,3.5,4,4.5\n4,4.5,5,5.5\n");
  write_file(dir.path() / "clip.labels.txt", "0\n1\n1\n0\n0\n");

  const auto videos = load_dataset(dir.path() / "manifest.json");
  ASSERT_EQ(videos.size(), 1u);
  EXPECT_EQ(videos[0].id, "clip");
  EXPECT_EQ(videos[0].length(), 5u);
  EXPECT_EQ(videos[0].feature_dim(), 4u);
  EXPECT_EQ(videos[0].labels, (std::vector<std::uint8_t>{0, 1, 1, 0, 0}));
  EXPECT_EQ(videos[0].frames[2], (FrameFeatures{2, 2.5, 3, 3.5}));
  EXPECT_FALSE(videos[0].explicit_segments.has_value());
}

TEST(LoadDataset, NonBinaryLabelNamesFileAndLine) {
  TempDir dir("badlabel");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 1, "videos": [
                  {"id": "v", "features": "v.csv", "labels": "v.txt"}]})");
  write_file(dir.path() / "v.csv", "1\n2\n3\n");
  write_file(dir.path() / "v.txt", "0\n1\n2\n");
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("non-binary label"), std::string::npos);
    EXPECT_NE(message.find("v.txt"), std::string::npos);
    EXPECT_NE(message.find("line 3"), std::string::npos);
  }
}

TEST(LoadDataset, RowLengthMismatchNamesLine) {
  TempDir dir("badrow");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 3, "videos": [
                  {"id": "v", "features": "v.csv", "labels": "v.txt"}]})");
  write_file(dir.path() / "v.csv", "1,2,3\n4,5\n");
  write_file(dir.path() / "v.txt", "0\n0\n");
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("row-length mismatch"), std::string::npos);
    EXPECT_NE(message.find("line 2"), std::string::npos);
  }
}

TEST(LoadDataset, MissingFileNamed) {
  TempDir dir("missing");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 3, "videos": [
                  {"id": "v", "features": "nope.csv", "labels": "v.txt"}]})");
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.csv"), std::string::npos);
  }
  EXPECT_THROW(load_dataset(dir.path() / "absent.json"), DataError);
}

TEST(LoadDataset, FrameLabelCountMismatchRejected) {
  TempDir dir("countmismatch");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 1, "videos": [
                  {"id": "v", "features": "v.csv", "labels": "v.txt"}]})");
  write_file(dir.path() / "v.csv", "1\n2\n3\n");
  write_file(dir.path() / "v.txt", "0\n1\n");
  EXPECT_THROW(load_dataset(dir.path() / "manifest.json"), DataError);
}

TEST(LoadDataset, ExplicitSegmentsPreferred) {
  TempDir dir("segments");
  write_file(dir.path() / "manifest.json",
             R"({"feature_dim": 1, "videos": [
                  {"id": "v", "features": "v.csv", "labels": "v.txt",
                   "segments": "v.segments.csv"}]})");
  write_file(dir.path() / "v.csv", "1\n2\n3\n4\n5\n6\n");
  write_file(dir.path() / "v.txt", "0\n1\n1\n0\n1\n0\n");
  write_file(dir.path() / "v.segments.csv", "1,2\n4,4\n");

  const auto videos = load_dataset(dir.path() / "manifest.json");
  ASSERT_TRUE(videos[0].explicit_segments.has_value());
  const auto segments = segments_of(videos[0]);
  ASSERT_EQ(segments.size(), 2u);
  EXPECT_EQ(segments[0], (GroundTruthSegment{1, 2}));
  EXPECT_EQ(segments[1], (GroundTruthSegment{4, 4}));
}

TEST(SegmentsOf, DerivedWhenNoExplicitAnnotation) {
  LabeledVideo video;
  video.id = "v";
  video.frames = {{0.0}, {0.0}, {0.0}};
  video.labels = {1, 0, 1};
  const auto segments = segments_of(video);
  ASSERT_EQ(segments.size(), 2u);
  EXPECT_EQ(segments[0], (GroundTruthSegment{0, 0}));
  EXPECT_EQ(segments[1], (GroundTruthSegment{2, 2}));
}

TEST(SaveLoad, RoundTripIsIdentity) {
  TempDir dir("roundtrip");
  const auto videos = generate_synthetic(small_synthetic());
  save_dataset(dir.path(), videos);
  const auto reloaded = load_dataset(dir.path() / "manifest.json");

  ASSERT_EQ(reloaded.size(), videos.size());
  for (std::size_t v = 0; v < videos.size(); ++v) {
    EXPECT_EQ(reloaded[v].id, videos[v].id);
    EXPECT_EQ(reloaded[v].labels, videos[v].labels);
    // %.17g serialization round-trips doubles exactly.
    EXPECT_EQ(reloaded[v].frames, videos[v].frames);
  }
}

TEST(SaveLoad, ExplicitSegmentsSurvive) {
  TempDir dir("segmentsave");
  auto videos = generate_synthetic(small_synthetic());
  videos[0].explicit_segments = derive_segments(videos[0].labels);
  save_dataset(dir.path(), videos);
  const auto reloaded = load_dataset(dir.path() / "manifest.json");
  ASSERT_TRUE(reloaded[0].explicit_segments.has_value());
  EXPECT_EQ(*reloaded[0].explicit_segments, *videos[0].explicit_segments);
  EXPECT_FALSE(reloaded[1].explicit_segments.has_value());
}

TEST(Validate, CatchesShapeAndValueProblems) {
  LabeledVideo video;
  video.id = "v";
  video.frames = {{1.0, 2.0}, {3.0, 4.0}};
  video.labels = {0};
  EXPECT_THROW(video.validate(), DataError);

  video.labels = {0, 1};
  EXPECT_NO_THROW(video.validate());

  video.frames[1] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(video.validate(), DataError);

  video.frames[1] = {1.0};
  EXPECT_THROW(video.validate(), DataError);
}

TEST(LoadFeaturesCsv, InfersDimensionFromFirstRow) {
  TempDir dir("barecsv");
  write_file(dir.path() / "stream.csv", "1,2,3\n4,5,6\n");
  const auto frames = load_features_csv(dir.path() / "stream.csv");
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].size(), 3u);
  EXPECT_THROW(load_features_csv(dir.path() / "stream.csv", 4), DataError);
}
