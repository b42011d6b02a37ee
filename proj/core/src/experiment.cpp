#include "ffnet/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

namespace ffnet {

ActionSpace ExperimentConfig::action_space() const {
  ActionSpace space = actions.jumps.empty() ? ActionSpace::uniform(actions.size)
                                            : ActionSpace::from_jumps(actions.jumps);
  space.skip_then_land = actions.skip_then_land;
  return space;
}

QNetworkConfig ExperimentConfig::qnetwork_config(std::size_t input_dim) const {
  QNetworkConfig config;
  config.input_dim = input_dim;
  config.hidden_dims = qnet.hidden_dims;
  config.output_dim = static_cast<std::size_t>(action_space().size());
  config.activation = activation_from_name(qnet.activation);
  config.init_scale = qnet.init_scale;
  config.seed = qnet.seed;
  config.learning_rate = qnet.learning_rate;
  return config;
}

TrainingConfig ExperimentConfig::training_config() const {
  TrainingConfig config;
  config.epochs = training.epochs;
  config.memory_size = training.memory_size;
  config.epsilon_init = training.epsilon_init;
  config.epsilon_min = training.epsilon_min;
  config.epsilon_decay = training.epsilon_decay;
  config.gamma = training.gamma;
  config.reward = reward;
  config.actions = action_space();
  config.seed = training.seed;
  config.start_index = training.start_index;
  config.retain_memory = training.retain_memory;
  return config;
}

void ExperimentConfig::validate() const {
  synthetic.validate();
  reward.validate();
  training_config().validate();
  qnetwork_config(synthetic.feature_dim).validate();
  runtime.validate();
  evaluation.validate();
}

namespace {

struct RawValue {
  std::string text;
  std::size_t line = 0;
  bool consumed = false;
};

using Section = std::map<std::string, RawValue>;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& message) {
  throw ConfigError(path.string() + " line " + std::to_string(line) + ": " + message);
}

class ConfigReader {
 public:
  ConfigReader(const std::filesystem::path& path, Section& section,
               const std::string& name)
      : path_(path), section_(section), name_(name) {}

  template <typename T>
  void integer(const std::string& key, T& out) {
    if (RawValue* raw = find(key)) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(raw->text.data(),
                                       raw->text.data() + raw->text.size(), v);
      if (ec != std::errc{} || ptr != raw->text.data() + raw->text.size()) {
        fail(path_, raw->line, "expected integer for " + name_ + "." + key);
      }
      if (v < 0 && !std::is_signed_v<T>) {
        fail(path_, raw->line, name_ + "." + key + " must be >= 0");
      }
      out = static_cast<T>(v);
    }
  }

  void real(const std::string& key, double& out) {
    if (RawValue* raw = find(key)) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(raw->text.data(),
                                       raw->text.data() + raw->text.size(), v);
      if (ec != std::errc{} || ptr != raw->text.data() + raw->text.size()) {
        fail(path_, raw->line, "expected number for " + name_ + "." + key);
      }
      out = v;
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (RawValue* raw = find(key)) {
      if (raw->text == "true") {
        out = true;
      } else if (raw->text == "false") {
        out = false;
      } else {
        fail(path_, raw->line, "expected true/false for " + name_ + "." + key);
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (RawValue* raw = find(key)) {
      std::string v = raw->text;
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        v = v.substr(1, v.size() - 2);
      }
      out = v;
    }
  }

  template <typename T>
  void integer_list(const std::string& key, std::vector<T>& out) {
    if (RawValue* raw = find(key)) {
      std::string v = raw->text;
      if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
        fail(path_, raw->line, "expected [a, b, ...] for " + name_ + "." + key);
      }
      out.clear();
      std::string body = v.substr(1, v.size() - 2);
      std::size_t pos = 0;
      while (pos <= body.size()) {
        std::size_t comma = body.find(',', pos);
        std::string item =
            trim(std::string_view(body).substr(pos, (comma == std::string::npos
                                                         ? body.size()
                                                         : comma) - pos));
        if (!item.empty()) {
          long long parsed = 0;
          auto [ptr, ec] =
              std::from_chars(item.data(), item.data() + item.size(), parsed);
          if (ec != std::errc{} || ptr != item.data() + item.size() || parsed < 0) {
            fail(path_, raw->line, "expected integer list for " + name_ + "." + key);
          }
          out.push_back(static_cast<T>(parsed));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  }

  void optional_size(const std::string& key, std::optional<std::size_t>& out) {
    if (section_.count(key) > 0) {
      std::size_t v = 0;
      integer(key, v);
      out = v;
    }
  }

  void finish() const {
    for (const auto& [key, raw] : section_) {
      if (!raw.consumed) {
        fail(path_, raw.line, "unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

 private:
  RawValue* find(const std::string& key) {
    auto it = section_.find(key);
    if (it == section_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
  }

  const std::filesystem::path& path_;
  Section& section_;
  std::string name_;
};

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());

  static const std::vector<std::string> kSections = {
      "synthetic", "reward", "actions", "qnet", "training", "runtime", "evaluation"};
  std::map<std::string, Section> sections;

  std::string line;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(path, line_no, "unterminated section header");
      current = trim(std::string_view(text).substr(1, text.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), current) == kSections.end()) {
        fail(path, line_no, "unknown section [" + current + "]");
      }
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) fail(path, line_no, "expected key = value");
    if (current.empty()) fail(path, line_no, "key outside any [section]");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty() || value.empty()) fail(path, line_no, "expected key = value");
    if (!sections[current].emplace(key, RawValue{value, line_no, false}).second) {
      fail(path, line_no, "duplicate key '" + key + "' in [" + current + "]");
    }
  }

  ExperimentConfig config;
  {
    ConfigReader r(path, sections["synthetic"], "synthetic");
    r.integer("num_videos", config.synthetic.num_videos);
    r.integer("frames_per_video", config.synthetic.frames_per_video);
    r.integer("feature_dim", config.synthetic.feature_dim);
    r.integer("num_important_segments", config.synthetic.num_important_segments);
    r.integer("segment_length_min", config.synthetic.segment_length_min);
    r.integer("segment_length_max", config.synthetic.segment_length_max);
    r.real("feature_separation", config.synthetic.feature_separation);
    r.real("noise_std", config.synthetic.noise_std);
    r.integer("seed", config.synthetic.seed);
    r.finish();
  }
  {
    ConfigReader r(path, sections["reward"], "reward");
    r.integer("T", config.reward.T);
    r.real("beta", config.reward.beta);
    r.real("sigma", config.reward.sigma);
    r.integer("w", config.reward.w);
    r.finish();
  }
  {
    ConfigReader r(path, sections["actions"], "actions");
    r.integer("size", config.actions.size);
    r.integer_list("jumps", config.actions.jumps);
    r.boolean("skip_then_land", config.actions.skip_then_land);
    r.finish();
  }
  {
    ConfigReader r(path, sections["qnet"], "qnet");
    r.integer_list("hidden_dims", config.qnet.hidden_dims);
    r.string("activation", config.qnet.activation);
    r.real("init_scale", config.qnet.init_scale);
    r.real("learning_rate", config.qnet.learning_rate);
    r.integer("seed", config.qnet.seed);
    r.finish();
  }
  {
    ConfigReader r(path, sections["training"], "training");
    r.integer("epochs", config.training.epochs);
    r.integer("memory_size", config.training.memory_size);
    r.real("epsilon_init", config.training.epsilon_init);
    r.real("epsilon_min", config.training.epsilon_min);
    r.real("epsilon_decay", config.training.epsilon_decay);
    r.real("gamma", config.training.gamma);
    r.integer("seed", config.training.seed);
    r.integer("start_index", config.training.start_index);
    r.boolean("retain_memory", config.training.retain_memory);
    r.finish();
  }
  {
    ConfigReader r(path, sections["runtime"], "runtime");
    r.integer("present_halfwidth", config.runtime.present_halfwidth);
    r.integer("start_index", config.runtime.start_index);
    r.optional_size("budget", config.runtime.budget);
    r.finish();
  }
  {
    ConfigReader r(path, sections["evaluation"], "evaluation");
    r.integer("hit_min", config.evaluation.hit_min);
    r.integer("hit_max", config.evaluation.hit_max);
    r.boolean("exclude_short_segments", config.evaluation.exclude_short_segments);
    r.boolean("selected_run_metric", config.evaluation.selected_run_metric);
    r.integer("kmeans_k", config.evaluation.kmeans_k);
    r.integer("seed", config.evaluation.seed);
    r.boolean("include_supervised", config.include_supervised);
    r.finish();
  }

  config.validate();
  return config;
}

}  // namespace ffnet
