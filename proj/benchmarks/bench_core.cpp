#include <benchmark/benchmark.h>

#include <random>

#include "ffnet/baselines.hpp"
#include "ffnet/qnet.hpp"
#include "ffnet/runtime.hpp"
#include "ffnet/stream.hpp"
#include "ffnet/trainer.hpp"

using namespace ffnet;

namespace {

QNetwork make_net(std::size_t input_dim, std::size_t actions, std::uint64_t seed) {
  QNetworkConfig config;
  config.input_dim = input_dim;
  config.output_dim = actions;
  config.seed = seed;
  return QNetwork(config);
}

std::vector<FrameFeatures> make_frames(std::size_t length, std::size_t dim) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<FrameFeatures> frames(length, FrameFeatures(dim));
  for (auto& f : frames) {
    for (auto& v : f) v = value(rng);
  }
  return frames;
}

void BM_Forward(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const QNetwork net = make_net(dim, 25, 1);
  const FrameFeatures frame(dim, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(frame));
  }
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(256)->Arg(4096);

void BM_TrainBatch(benchmark::State& state) {
  const std::size_t dim = 16;
  QNetwork net = make_net(dim, 25, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<TrainSample> batch(static_cast<std::size_t>(state.range(0)));
  for (auto& sample : batch) {
    sample.state.assign(dim, 0.0);
    sample.target.assign(25, 0.0);
    for (auto& v : sample.state) v = value(rng);
    for (auto& v : sample.target) v = value(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.train_batch(batch, 1e-3));
  }
}
BENCHMARK(BM_TrainBatch)->Arg(128);

void BM_RunPolicy(benchmark::State& state) {
  const std::size_t dim = 16;
  const auto frames = make_frames(static_cast<std::size_t>(state.range(0)), dim);
  const QNetwork net = make_net(dim, 25, 5);
  const ActionSpace actions = ActionSpace::uniform(25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_policy(frames, net, actions, RuntimeConfig{}));
  }
}
BENCHMARK(BM_RunPolicy)->Arg(500)->Arg(5000);

void BM_GenerateSynthetic(benchmark::State& state) {
  SyntheticConfig config;
  config.num_videos = 5;
  config.frames_per_video = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_synthetic(config));
  }
}
BENCHMARK(BM_GenerateSynthetic)->Arg(500);

void BM_OnlineKmeans(benchmark::State& state) {
  const auto frames = make_frames(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(online_kmeans_select(frames, 20, 4, std::nullopt, 11));
  }
}
BENCHMARK(BM_OnlineKmeans)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
