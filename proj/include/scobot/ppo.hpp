#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scobot/common.hpp"
#include "scobot/mlp.hpp"
#include "scobot/pipeline.hpp"

namespace scobot {

struct PpoConfig {
  double lr = 3e-4;
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 4;
  int minibatch = 64;
  int horizon = 2048;  // frames per update, summed over rollout instances
  long total_frames = 1'000'000;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int hidden_layers = 2;
  int envs = 1;  // rollout instances
  std::uint64_t seed = 0;
  long eval_interval = 0;  // frames between evaluations; 0 = only at the end
  int eval_episodes = 5;
  std::uint64_t eval_seed = 1000;
  double target_reward = 0.0;  // stop once an evaluation mean exceeds this (0 = never)

  void validate() const;
};

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;  // episode ended after this step
};

struct GaeResult {
  std::vector<double> raw;         // before normalization
  std::vector<double> advantages;  // normalized to mean 0, std 1
  std::vector<double> returns;     // raw + value
};

/// Generalized advantage estimates of a time-ordered segment. `last_value`
/// bootstraps a segment cut before its episode ended.
GaeResult gae(std::span<const Transition> transitions, double gamma, double lambda, double last_value = 0.0);

/// In place: mean 0, population std 1 (1e-8 guard).
void normalize_advantages(std::span<double> adv);

struct UpdateStats {
  double policy_loss = 0.0;  // means over minibatches
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int minibatches = 0;
};

/// cfg.epochs passes over shuffled minibatches of the clipped-surrogate loss.
/// Throws NumericalError naming the minibatch on a non-finite loss.
UpdateStats ppo_update(Mlp& net, Adam& opt, std::span<const PpoSample> batch, const PpoConfig& cfg, Rng& rng);

struct EvalPoint {
  long frame = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct TrainResult {
  Mlp net;
  std::vector<EvalPoint> log;
  std::vector<double> episode_rewards;  // training episodes in completion order
  long frames = 0;
};

using TrainProgress = std::function<void(const EvalPoint&)>;

/// Rollout/update loop. Rollout instances step in parallel and are merged
/// in instance order, so results depend only on the seed and `envs`.
TrainResult train(const PipelineSpec& spec, const PpoConfig& cfg, const TrainProgress& progress = {});

/// Trailing mean over `window` values; one entry per full window.
std::vector<double> moving_average(std::span<const double> v, int window);

std::string eval_log_csv(std::span<const EvalPoint> log);

}  // namespace scobot
