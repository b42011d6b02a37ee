#include "ffnet/runtime.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include <json.hpp>

using namespace ffnet;

namespace {

std::vector<FrameFeatures> constant_frames(std::size_t length, std::size_t dim,
                                           double value = 0.5) {
  return std::vector<FrameFeatures>(length, FrameFeatures(dim, value));
}

QNetwork fixed_action_net(std::size_t dim, std::size_t actions, std::size_t chosen) {
  QNetworkConfig config;
  config.input_dim = dim;
  config.hidden_dims = {4};
  config.output_dim = actions;
  config.seed = 0;
  QNetwork net(config);
  for (auto& layer : net.layers()) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  net.layers().back().bias[chosen] = 1.0;
  return net;
}

}  // namespace

TEST(SelectionResultJson, RoundTripAndSchema) {
  SelectionResult result;
  result.processed = {0, 25, 50};
  result.presented = {0, 1, 24, 25, 26, 49, 50};
  result.actions = {24, 24};
  result.processing_percentage = 2.97;

  const std::string text = result.to_json();
  const auto parsed = nlohmann::json::parse(text);
  EXPECT_TRUE(parsed.contains("processed"));
  EXPECT_TRUE(parsed.contains("presented"));
  EXPECT_TRUE(parsed.contains("actions"));
  EXPECT_TRUE(parsed.contains("processing_percentage"));

  const SelectionResult back = SelectionResult::from_json(text);
  EXPECT_EQ(back.processed, result.processed);
  EXPECT_EQ(back.presented, result.presented);
  EXPECT_EQ(back.actions, result.actions);
  EXPECT_DOUBLE_EQ(back.processing_percentage, result.processing_percentage);

  EXPECT_THROW(SelectionResult::from_json("{not json"), DataError);
  EXPECT_THROW(SelectionResult::from_json(R"({"processed": []})"), DataError);
}

TEST(CountingFrameSource, TracksDistinctReads) {
  const auto frames = constant_frames(5, 2);
  CountingFrameSource source(frames);
  EXPECT_EQ(source.distinct_reads(), 0u);
  source.at(1);
  source.at(1);
  source.at(3);
  EXPECT_EQ(source.distinct_reads(), 2u);
  EXPECT_TRUE(source.was_read(1));
  EXPECT_FALSE(source.was_read(0));
  EXPECT_THROW(source.at(5), Error);
}

TEST(RunPolicy, SingleFrameStream) {
  const auto frames = constant_frames(1, 3);
  const QNetwork net = fixed_action_net(3, 4, 2);
  const auto result = run_policy(frames, net, ActionSpace::uniform(4), RuntimeConfig{});
  EXPECT_EQ(result.processed, (std::vector<std::size_t>{0}));
  EXPECT_EQ(result.processing_percentage, 100.0);
  EXPECT_TRUE(result.actions.empty());
  EXPECT_EQ(result.presented, (std::vector<std::size_t>{0}));
}

TEST(RunPolicy, MaxJumpPolicyOn101Frames) {
  const auto frames = constant_frames(101, 3);
  const QNetwork net = fixed_action_net(3, 25, 24);
  const auto result =
      run_policy(frames, net, ActionSpace::uniform(25), RuntimeConfig{});
  EXPECT_EQ(result.processed, (std::vector<std::size_t>{0, 25, 50, 75, 100}));
  EXPECT_NEAR(result.processing_percentage, 4.95, 0.01);
  EXPECT_DOUBLE_EQ(result.processing_percentage, 100.0 * 5 / 101);
  EXPECT_EQ(result.actions, (std::vector<int>{24, 24, 24, 24}));
}

TEST(RunPolicy, PercentageEqualsDistinctForwardCalls) {
  const auto frames = constant_frames(57, 3);
  const QNetwork net = fixed_action_net(3, 7, 3);
  CountingFrameSource source(frames);
  const auto result =
      run_policy(source, net, ActionSpace::uniform(7), RuntimeConfig{});
  EXPECT_EQ(source.distinct_reads(), result.processed.size());
  EXPECT_DOUBLE_EQ(result.processing_percentage,
                   100.0 * static_cast<double>(source.distinct_reads()) / 57.0);
}

TEST(RunPolicy, SkippedFramesAreNeverRead) {
  const auto frames = constant_frames(80, 3);
  const QNetwork net = fixed_action_net(3, 9, 5);
  CountingFrameSource source(frames);
  const auto result =
      run_policy(source, net, ActionSpace::uniform(9), RuntimeConfig{});
  const std::set<std::size_t> processed(result.processed.begin(),
                                        result.processed.end());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(source.was_read(i), processed.count(i) == 1);
  }
}

TEST(RunPolicy, TrajectoryIndependentOfSkippedContent) {
  QNetworkConfig config;
  config.input_dim = 4;
  config.hidden_dims = {12, 8};
  config.output_dim = 6;
  config.seed = 31;
  const QNetwork net(config);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<FrameFeatures> frames(120, FrameFeatures(4));
  for (auto& f : frames) {
    for (auto& v : f) v = value(rng);
  }

  const auto first = run_policy(frames, net, ActionSpace::uniform(6), RuntimeConfig{});
  auto mutated = frames;
  const std::set<std::size_t> processed(first.processed.begin(),
                                        first.processed.end());
  for (std::size_t i = 0; i < mutated.size(); ++i) {
    if (processed.count(i) == 0) {
      for (auto& v : mutated[i]) v = 1e6;
    }
  }
  const auto second =
      run_policy(mutated, net, ActionSpace::uniform(6), RuntimeConfig{});
  EXPECT_EQ(second.processed, first.processed);
  EXPECT_EQ(second.actions, first.actions);
  EXPECT_EQ(second.presented, first.presented);
}

TEST(RunPolicy, ProcessedCountBounds) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    QNetworkConfig config;
    config.input_dim = 3;
    config.hidden_dims = {6};
    config.output_dim = 5;
    config.seed = static_cast<std::uint64_t>(trial);
    const QNetwork net(config);
    std::vector<FrameFeatures> frames(60, FrameFeatures(3));
    for (auto& f : frames) {
      for (auto& v : f) v = value(rng);
    }
    const auto result =
        run_policy(frames, net, ActionSpace::uniform(5), RuntimeConfig{});
    // transitions = processed - 1, bounded by ceil((len-1)/advance).
    EXPECT_LE(result.processed.size() - 1, (60 - 1 + 0) / 1);
    EXPECT_GE(result.processed.size() - 1, (60 - 1 + 4) / 5);
    for (std::size_t i = 1; i < result.processed.size(); ++i) {
      EXPECT_GT(result.processed[i], result.processed[i - 1]);
    }
  }
}

TEST(RunPolicy, DimensionMismatchRejected) {
  const auto frames = constant_frames(10, 3);
  const QNetwork net = fixed_action_net(4, 5, 0);
  EXPECT_THROW(run_policy(frames, net, ActionSpace::uniform(5), RuntimeConfig{}),
               Error);
}

TEST(RunPolicy, BudgetAppliedWhenConfigured) {
  const auto frames = constant_frames(101, 3);
  const QNetwork net = fixed_action_net(3, 25, 24);
  RuntimeConfig config;
  config.budget = 10;
  const auto result =
      run_policy(frames, net, ActionSpace::uniform(25), config);
  EXPECT_EQ(result.presented.size(), 10u);
}

TEST(PresentedSet, ZeroHalfwidthIsIdentity) {
  const std::vector<std::size_t> processed{5};
  EXPECT_EQ(presented_set(processed, 0, 10), processed);
}

TEST(PresentedSet, TruncatedAtBoundaries) {
  const std::vector<std::size_t> processed{2};
  EXPECT_EQ(presented_set(processed, 4, 5),
            (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(PresentedSet, MatchesBruteForceUnion) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> len_dist(1, 60);
    const std::size_t length = len_dist(rng);
    std::uniform_int_distribution<std::size_t> idx(0, length - 1);
    std::uniform_int_distribution<std::size_t> hw_dist(0, 6);
    const std::size_t halfwidth = hw_dist(rng);
    std::set<std::size_t> processed_set;
    std::uniform_int_distribution<std::size_t> count_dist(1, 8);
    const std::size_t count = count_dist(rng);
    for (std::size_t i = 0; i < count; ++i) processed_set.insert(idx(rng));
    const std::vector<std::size_t> processed(processed_set.begin(),
                                             processed_set.end());

    std::set<std::size_t> expected;
    for (std::size_t p : processed) {
      for (std::size_t f = (p > halfwidth ? p - halfwidth : 0);
           f <= std::min(p + halfwidth, length - 1); ++f) {
        expected.insert(f);
      }
    }
    const auto actual = presented_set(processed, halfwidth, length);
    EXPECT_EQ(actual, std::vector<std::size_t>(expected.begin(), expected.end()));
    EXPECT_TRUE(std::is_sorted(actual.begin(), actual.end()));
    EXPECT_EQ(std::set<std::size_t>(actual.begin(), actual.end()).size(),
              actual.size());
  }
}

TEST(PresentedSet, MonotoneInHalfwidth) {
  const std::vector<std::size_t> processed{3, 17, 40};
  std::vector<std::size_t> previous;
  for (std::size_t halfwidth = 0; halfwidth <= 8; ++halfwidth) {
    const auto current = presented_set(processed, halfwidth, 50);
    EXPECT_TRUE(std::includes(current.begin(), current.end(), previous.begin(),
                              previous.end()));
    previous = current;
  }
}

TEST(MatchBudget, NoOpWhenWithinBudget) {
  const std::vector<std::size_t> processed{10};
  const auto presented = presented_set(processed, 4, 100);
  EXPECT_EQ(match_budget(presented, processed, 9), presented);
  EXPECT_EQ(match_budget(presented, processed, 50), presented);
}

TEST(MatchBudget, SymmetricShrink) {
  const std::vector<std::size_t> processed{10};
  const auto presented = presented_set(processed, 4, 100);  // 6..14
  EXPECT_EQ(match_budget(presented, processed, 5),
            (std::vector<std::size_t>{8, 9, 10, 11, 12}));
}

TEST(MatchBudget, PartialRoundDropsHighestIndexFirst) {
  const std::vector<std::size_t> processed{10};
  const auto presented = presented_set(processed, 4, 100);  // 6..14
  // Removing 3 frames: full outermost shell {6, 14}, then 13 from the next.
  EXPECT_EQ(match_budget(presented, processed, 6),
            (std::vector<std::size_t>{7, 8, 9, 10, 11, 12}));
}

TEST(MatchBudget, MergedWindowsShrinkAtRunEdges) {
  const std::vector<std::size_t> processed{3, 5};
  const auto presented = presented_set(processed, 2, 20);  // 1..7
  EXPECT_EQ(match_budget(presented, processed, 5),
            (std::vector<std::size_t>{2, 3, 4, 5, 6}));
}

TEST(MatchBudget, BudgetBelowProcessedRejected) {
  const std::vector<std::size_t> processed{1, 5, 9};
  const auto presented = presented_set(processed, 1, 12);
  EXPECT_THROW(match_budget(presented, processed, 2), Error);
}

TEST(MatchBudget, SizeContractOnRandomInstances) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> len_dist(1, 40);
    const std::size_t length = len_dist(rng);
    std::uniform_int_distribution<std::size_t> idx(0, length - 1);
    std::set<std::size_t> processed_set;
    std::uniform_int_distribution<std::size_t> count_dist(1, 6);
    for (std::size_t i = 0, n = count_dist(rng); i < n; ++i) {
      processed_set.insert(idx(rng));
    }
    const std::vector<std::size_t> processed(processed_set.begin(),
                                             processed_set.end());
    std::uniform_int_distribution<std::size_t> hw_dist(0, 5);
    const auto presented = presented_set(processed, hw_dist(rng), length);
    std::uniform_int_distribution<std::size_t> budget_dist(processed.size(),
                                                           length + 5);
    const std::size_t budget = budget_dist(rng);

    const auto result = match_budget(presented, processed, budget);
    EXPECT_EQ(result.size(), std::min(budget, presented.size()));
    EXPECT_TRUE(std::includes(result.begin(), result.end(), processed.begin(),
                              processed.end()));
    EXPECT_TRUE(std::includes(presented.begin(), presented.end(), result.begin(),
                              result.end()));
    EXPECT_TRUE(std::is_sorted(result.begin(), result.end()));
  }
}
