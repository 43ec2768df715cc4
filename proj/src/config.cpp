#include "scobot/config.hpp"

#include <fstream>
#include <sstream>

#include "scobot/common.hpp"

namespace scobot {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"game", "paddles", "paddles | brawl | slalom"},
      {"work_dir", "work", "directory holding every artifact"},
      {"seed", "0", "base seed of every stage"},
      {"data_train", "2048", "training sequences"},
      {"data_val", "128", "validation sequences"},
      {"data_test", "128", "test sequences"},
      {"data_gap", "16", "random steps between sequences"},
      {"tau", "0.1", "foreground threshold as a fraction of 255"},
      {"min_area", "4", "smallest blob in pixels"},
      {"calibration_frames", "100", "frames for the background mode"},
      {"knn", "24", "neighbours voting on each centroid's name"},
      {"d_max", "0.15", "tracker gate distance"},
      {"history", "4", "tracked positions per object"},
      {"schema", "pruned", "full | pruned"},
      {"extractor", "ground_truth", "ground_truth | vision"},
      {"hidden_layers", "2", "1 | 2"},
      {"lr", "0.0003", "Adam learning rate"},
      {"clip", "0.2", "PPO clip ratio"},
      {"gamma", "0.99", "discount"},
      {"lambda", "0.95", "GAE parameter"},
      {"epochs", "4", "passes per update"},
      {"minibatch", "64", "samples per minibatch"},
      {"horizon", "2048", "frames per update"},
      {"total_frames", "1000000", "training budget"},
      {"entropy_coef", "0.01", "entropy bonus weight"},
      {"value_coef", "0.5", "value loss weight"},
      {"max_grad_norm", "0.5", "gradient norm clip"},
      {"envs", "1", "parallel rollout instances"},
      {"eval_interval", "100000", "frames between evaluations during training"},
      {"eval_episodes", "5", "episodes per evaluation"},
      {"eval_seed", "1000", "base seed of evaluation episodes"},
      {"target_reward", "0", "stop training once evaluation exceeds this (0 = off)"},
      {"distill_samples", "50000", "states collected for distillation"},
      {"distill_eps", "0.25", "random-action probability while collecting"},
      {"holdout_samples", "5000", "held-out states for the fidelity report"},
      {"mu", "16", "minimum samples before a tree node splits"},
      {"clause_cap", "512", "substituted clauses per hidden-layer rule"},
      {"selector", "both", "neural | rules | both (eval-agent)"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_.emplace(std::string(k.name), std::string(k.default_value));
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ContractError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  RunConfig c;
  c.apply_text(ss.str());
  return c;
}

void RunConfig::apply_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    set_assignment(t);
  }
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ContractError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(trim(value));
}

void RunConfig::set_assignment(std::string_view kv) {
  const auto eq = kv.find('=');
  if (eq == std::string_view::npos) throw ContractError("expected key=value, got '" + std::string(kv) + "'");
  set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ContractError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

long RunConfig::get_long(std::string_view key) const {
  try {
    return parse_long(get(key));
  } catch (const ContractError&) {
    throw ContractError("config key '" + std::string(key) + "' needs an integer, got '" + get(key) + "'");
  }
}

double RunConfig::get_double(std::string_view key) const {
  try {
    return parse_double(get(key));
  } catch (const ContractError&) {
    throw ContractError("config key '" + std::string(key) + "' needs a number, got '" + get(key) + "'");
  }
}

bool RunConfig::get_bool(std::string_view key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ContractError("config key '" + std::string(key) + "' needs true or false, got '" + v + "'");
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const auto& k : config_keys()) s += std::string(k.name) + '=' + get(k.name) + '\n';
  return s;
}

GameId RunConfig::game() const { return parse_game(get("game")); }

std::filesystem::path RunConfig::work_dir() const { return get("work_dir"); }

SplitSizes RunConfig::split_sizes() const {
  return {static_cast<int>(get_long("data_train")), static_cast<int>(get_long("data_val")),
          static_cast<int>(get_long("data_test"))};
}

VisionParams RunConfig::vision_params() const {
  VisionParams p;
  p.tau = get_double("tau");
  p.min_area = static_cast<int>(get_long("min_area"));
  p.calibration_frames = static_cast<int>(get_long("calibration_frames"));
  return p;
}

TrackerConfig RunConfig::tracker() const {
  return {get_double("d_max"), static_cast<int>(get_long("history"))};
}

PpoConfig RunConfig::ppo() const {
  PpoConfig c;
  c.lr = get_double("lr");
  c.clip = get_double("clip");
  c.gamma = get_double("gamma");
  c.lambda = get_double("lambda");
  c.epochs = static_cast<int>(get_long("epochs"));
  c.minibatch = static_cast<int>(get_long("minibatch"));
  c.horizon = static_cast<int>(get_long("horizon"));
  c.total_frames = get_long("total_frames");
  c.entropy_coef = get_double("entropy_coef");
  c.value_coef = get_double("value_coef");
  c.max_grad_norm = get_double("max_grad_norm");
  c.hidden_layers = static_cast<int>(get_long("hidden_layers"));
  c.envs = static_cast<int>(get_long("envs"));
  c.seed = static_cast<std::uint64_t>(get_long("seed"));
  c.eval_interval = get_long("eval_interval");
  c.eval_episodes = static_cast<int>(get_long("eval_episodes"));
  c.eval_seed = static_cast<std::uint64_t>(get_long("eval_seed"));
  c.target_reward = get_double("target_reward");
  c.validate();
  return c;
}

ExtractOptions RunConfig::extract_options() const {
  ExtractOptions o;
  o.mu = static_cast<int>(get_long("mu"));
  o.clause_cap = static_cast<std::size_t>(get_long("clause_cap"));
  return o;
}

PipelineSpec RunConfig::pipeline() const {
  PipelineSpec s;
  s.game = game();
  s.extractor = parse_extractor(get("extractor"));
  s.schema = parse_schema_kind(get("schema"));
  s.tracker = tracker();
  return s;
}

}  // namespace scobot
