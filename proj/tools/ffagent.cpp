// ffagent: generate synthetic datasets, train the fast-forward agent, run it
// over a feature stream, and compare it against the baseline selectors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffnet/baselines.hpp"
#include "ffnet/common.hpp"
#include "ffnet/evaluation.hpp"
#include "ffnet/experiment.hpp"
#include "ffnet/qnet.hpp"
#include "ffnet/runtime.hpp"
#include "ffnet/stream.hpp"
#include "ffnet/trainer.hpp"

namespace fs = std::filesystem;
using namespace ffnet;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNumericError = 4;

fs::path manifest_path_of(const fs::path& dataset) {
  if (fs::is_directory(dataset)) return dataset / "manifest.json";
  return dataset;
}

std::size_t important_count(const LabeledVideo& video) {
  return static_cast<std::size_t>(
      std::count(video.labels.begin(), video.labels.end(), std::uint8_t{1}));
}

// Caps a result's presented set at the larger of `budget` and its own
// processed count (processed frames are never dropped).
void apply_budget(SelectionResult& result, std::size_t budget) {
  const std::size_t effective = std::max(budget, result.processed.size());
  if (result.presented.size() > effective) {
    result.presented = match_budget(result.presented, result.processed, effective);
  }
}

int cmd_generate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (seed_override) config.synthetic.seed = *seed_override;
  const auto videos = generate_synthetic(config.synthetic);
  save_dataset(out_dir, videos);

  // Outputs must load back through the library's own reader.
  const auto reloaded = load_dataset(out_dir / "manifest.json");
  if (reloaded.size() != videos.size()) {
    throw DataError("generated dataset failed to reload: wrote " +
                    std::to_string(videos.size()) + " videos, read back " +
                    std::to_string(reloaded.size()));
  }
  std::cout << "wrote " << videos.size() << " videos to " << out_dir.string()
            << std::endl;
  return 0;
}

int cmd_train(const fs::path& config_path, const fs::path& dataset,
              const fs::path& out_weights, std::optional<fs::path> log_path,
              std::optional<std::size_t> epochs_override,
              std::optional<std::uint64_t> seed_override) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (epochs_override) config.training.epochs = *epochs_override;
  if (seed_override) {
    config.training.seed = *seed_override;
    config.qnet.seed = *seed_override;
  }

  const auto videos = load_dataset(manifest_path_of(dataset));
  if (videos.empty()) throw DataError("dataset is empty");
  const QNetworkConfig qconfig = config.qnetwork_config(videos.front().feature_dim());
  const TrainingConfig tconfig = config.training_config();

  auto [net, log] = train(videos, qconfig, tconfig);
  save_weights(net, out_weights);
  const fs::path log_file =
      log_path ? *log_path : fs::path(out_weights.string() + ".log.csv");
  log.write_csv(log_file);

  // Verify the weights round-trip before declaring success.
  const QNetwork reloaded = load_weights(out_weights, qconfig.activation);
  const auto a = net.forward(videos.front().frames.front());
  const auto b = reloaded.forward(videos.front().frames.front());
  if (a != b) throw DataError("weights file failed round-trip verification");

  std::cout << "trained " << tconfig.epochs << " epochs (" << log.updates.size()
            << " updates); weights: " << out_weights.string()
            << "; log: " << log_file.string() << std::endl;
  return 0;
}

int cmd_run(const fs::path& weights_path, const fs::path& features_path,
            std::optional<fs::path> config_path, std::size_t start,
            std::size_t halfwidth, std::optional<std::size_t> budget) {
  ExperimentConfig config;
  if (config_path) config = load_experiment_config(*config_path);
  const QNetwork net =
      load_weights(weights_path, activation_from_name(config.qnet.activation));

  const auto frames = load_features_csv(features_path, net.input_dim());
  ActionSpace actions = config.action_space();
  if (static_cast<std::size_t>(actions.size()) != net.output_dim()) {
    actions = ActionSpace::uniform(static_cast<int>(net.output_dim()));
    actions.skip_then_land = config.actions.skip_then_land;
  }

  RuntimeConfig rt = config.runtime;
  rt.start_index = start;
  rt.present_halfwidth = halfwidth;
  if (budget) rt.budget = budget;

  const SelectionResult result = run_policy(frames, net, actions, rt);
  std::cout << result.to_json() << std::endl;
  return 0;
}

int cmd_compare(const fs::path& config_path, const fs::path& dataset,
                const fs::path& weights_path, const fs::path& out_csv) {
  const ExperimentConfig config = load_experiment_config(config_path);
  const auto videos = load_dataset(manifest_path_of(dataset));
  if (videos.empty()) throw DataError("dataset is empty");

  const QNetwork net =
      load_weights(weights_path, activation_from_name(config.qnet.activation));
  if (net.input_dim() != videos.front().feature_dim()) {
    throw DataError("weights expect dimension " + std::to_string(net.input_dim()) +
                    ", dataset has " + std::to_string(videos.front().feature_dim()));
  }
  ActionSpace actions = config.action_space();
  if (static_cast<std::size_t>(actions.size()) != net.output_dim()) {
    throw DataError("weights have " + std::to_string(net.output_dim()) +
                    " actions, config declares " + std::to_string(actions.size()));
  }

  // Per-video presented budget: the configured budget if any, otherwise the
  // ground-truth summary length, mirroring equal-length comparison.
  std::vector<std::size_t> budgets(videos.size());
  for (std::size_t v = 0; v < videos.size(); ++v) {
    budgets[v] = config.runtime.budget ? *config.runtime.budget
                                       : std::max<std::size_t>(important_count(videos[v]), 1);
  }

  const std::size_t halfwidth = config.runtime.present_halfwidth;
  const auto& eval = config.evaluation;
  std::optional<JumpRegressor> regressor;
  if (config.include_supervised) {
    regressor = train_supervised_jump(videos, config.qnetwork_config(net.input_dim()),
                                      config.training_config());
  }

  std::vector<MethodResults> methods;
  methods.push_back({"ffnet", std::vector<SelectionResult>(videos.size())});
  methods.push_back({"uniform", std::vector<SelectionResult>(videos.size())});
  methods.push_back({"random", std::vector<SelectionResult>(videos.size())});
  methods.push_back({"online_kmeans", std::vector<SelectionResult>(videos.size())});
  if (regressor) methods.push_back({"sup", std::vector<SelectionResult>(videos.size())});

  RuntimeConfig rt;
  rt.present_halfwidth = halfwidth;
  rt.start_index = config.runtime.start_index;

  parallel_for(videos.size(), max_worker_threads(), [&](std::size_t v) {
    const LabeledVideo& video = videos[v];
    const std::size_t budget = budgets[v];

    SelectionResult agent = run_policy(video.frames, net, actions, rt);
    apply_budget(agent, budget);
    methods[0].per_video[v] = std::move(agent);

    SelectionResult uniform = uniform_skip(
        video.length(), choose_uniform_stride(video.length(), halfwidth, budget),
        halfwidth);
    apply_budget(uniform, budget);
    methods[1].per_video[v] = std::move(uniform);

    SelectionResult random = random_policy(video.length(), actions, halfwidth,
                                           split_seed(eval.seed, 1000 + v));
    apply_budget(random, budget);
    methods[2].per_video[v] = std::move(random);

    const std::size_t k = std::min<std::size_t>(eval.kmeans_k, video.length());
    methods[3].per_video[v] = online_kmeans_select(video.frames, k, halfwidth, budget,
                                                   split_seed(eval.seed, 2000 + v));

    if (regressor) {
      SelectionResult sup = run_jump_regressor(*regressor, video.frames, rt);
      apply_budget(sup, budget);
      methods[4].per_video[v] = std::move(sup);
    }
  });

  const auto rows = compare_methods(videos, methods, eval);
  write_comparison_csv(out_csv, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_csv.string() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online video fast-forwarding agent"};
  app.require_subcommand(1);

  std::string config_path, dataset_path, out_dir, weights_path, features_path;
  std::string out_csv = "comparison.csv";
  std::optional<std::string> log_path, run_config;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> epochs_override, budget;
  std::size_t start = 0;
  std::size_t halfwidth = 4;

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("config", config_path, "Experiment config file")->required();
  generate->add_option("out_dir", out_dir, "Output dataset directory")->required();
  generate->add_option("--seed", seed_override, "Override [synthetic] seed");

  auto* train_cmd = app.add_subcommand("train", "Train the fast-forward policy");
  train_cmd->add_option("config", config_path, "Experiment config file")->required();
  train_cmd->add_option("dataset", dataset_path, "Dataset directory or manifest")->required();
  train_cmd->add_option("weights", weights_path, "Output weights file")->required();
  train_cmd->add_option("--log", log_path, "Training log CSV (default <weights>.log.csv)");
  train_cmd->add_option("--epochs", epochs_override, "Override [training] epochs");
  train_cmd->add_option("--seed", seed_override, "Override training and init seeds");

  auto* run = app.add_subcommand("run", "Fast-forward one feature stream");
  run->add_option("weights", weights_path, "Trained weights file")->required();
  run->add_option("features", features_path, "Features CSV (one frame per row)")->required();
  run->add_option("--config", run_config, "Experiment config file");
  run->add_option("--start", start, "Start frame index");
  run->add_option("--halfwidth", halfwidth, "Presented window half-width");
  run->add_option("--budget", budget, "Presented-frame budget");

  auto* compare = app.add_subcommand("compare", "Evaluate agent vs baselines");
  compare->add_option("config", config_path, "Experiment config file")->required();
  compare->add_option("dataset", dataset_path, "Dataset directory or manifest")->required();
  compare->add_option("weights", weights_path, "Trained weights file")->required();
  compare->add_option("--out", out_csv, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir, seed_override);
    if (train_cmd->parsed()) {
      return cmd_train(config_path, dataset_path, weights_path,
                       log_path ? std::optional<fs::path>(*log_path) : std::nullopt,
                       epochs_override, seed_override);
    }
    if (run->parsed()) {
      return cmd_run(weights_path, features_path,
                     run_config ? std::optional<fs::path>(*run_config) : std::nullopt,
                     start, halfwidth, budget);
    }
    if (compare->parsed()) {
      return cmd_compare(config_path, dataset_path, weights_path, out_csv);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return kExitDataError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << std::endl;
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
