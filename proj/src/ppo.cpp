#include "scobot/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scobot/eval.hpp"

namespace scobot {

void PpoConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) throw ContractError("clip must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ContractError("gamma must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ContractError("lambda must lie in (0, 1]");
  if (!(lr >= 0.0)) throw ContractError("lr must be non-negative");
  if (epochs < 1 || minibatch < 1 || horizon < 1 || envs < 1 || total_frames < 1)
    throw ContractError("epochs, minibatch, horizon, envs and total_frames must be positive");
  if (hidden_layers < 1 || hidden_layers > 2) throw ContractError("hidden_layers must be 1 or 2");
  if (eval_episodes < 1) throw ContractError("eval_episodes must be positive");
}

void normalize_advantages(std::span<double> adv) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (sd + 1e-8);
}

GaeResult gae(std::span<const Transition> tr, double gamma, double lambda, double last_value) {
  if (tr.empty()) throw ContractError("gae: empty input");
  GaeResult r;
  const std::size_t n = tr.size();
  r.raw.assign(n, 0.0);
  r.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? tr[i + 1].value : last_value;
    const double live = tr[i].done ? 0.0 : 1.0;
    const double delta = tr[i].reward + gamma * next_value * live - tr[i].value;
    running = delta + gamma * lambda * live * running;
    r.raw[i] = running;
    r.returns[i] = running + tr[i].value;
  }
  r.advantages = r.raw;
  normalize_advantages(r.advantages);
  return r;
}

UpdateStats ppo_update(Mlp& net, Adam& opt, std::span<const PpoSample> batch, const PpoConfig& cfg, Rng& rng) {
  if (batch.empty()) throw ContractError("ppo_update: empty batch");
  const LossSpec spec{cfg.clip, 1.0, cfg.value_coef, cfg.entropy_coef};
  std::vector<int> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  UpdateStats st;
  std::vector<PpoSample> mb;
  std::vector<double> grad;
  int index = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.minibatch), ++index) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.minibatch));
      mb.clear();
      for (std::size_t j = start; j < end; ++j) mb.push_back(batch[static_cast<std::size_t>(order[j])]);
      const LossStats ls = ppo_loss(net, mb, spec, &grad);
      bool finite = std::isfinite(ls.total);
      for (double g : grad) finite = finite && std::isfinite(g);
      if (!finite) throw NumericalError("non-finite PPO loss in minibatch " + std::to_string(index), index);
      clip_grad_norm(grad, cfg.max_grad_norm);
      opt.step(net.params(), grad);
      st.policy_loss += ls.policy_loss;
      st.value_loss += ls.value_loss;
      st.entropy += ls.entropy;
      st.clip_fraction += ls.clip_fraction;
      st.approx_kl += ls.approx_kl;
      ++st.minibatches;
    }
  }
  const double m = st.minibatches;
  st.policy_loss /= m;
  st.value_loss /= m;
  st.entropy /= m;
  st.clip_fraction /= m;
  st.approx_kl /= m;
  return st;
}

namespace {

int sample_action(std::span<const double> logits, Rng& rng, double* log_prob) {
  const auto lp = log_softmax(logits);
  const double u = rng.uniform();
  double acc = 0.0;
  int a = static_cast<int>(lp.size()) - 1;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    acc += std::exp(lp[i]);
    if (u < acc) {
      a = static_cast<int>(i);
      break;
    }
  }
  *log_prob = lp[static_cast<std::size_t>(a)];
  return a;
}

struct Worker {
  Worker(const PipelineSpec& spec, std::uint64_t action_seed, std::uint64_t episode_seed)
      : env(spec), rng(action_seed), seed_base(episode_seed) {}

  ConceptEnv env;
  Rng rng;
  std::uint64_t seed_base;
  std::uint64_t episode = 0;
  double episode_reward = 0.0;
  std::vector<Transition> segment;
  std::vector<double> finished;
  double last_value = 0.0;

  void start_episode() {
    env.reset(derive_seed(seed_base, episode++));
    episode_reward = 0.0;
  }

  void collect(const Mlp& net, int steps) {
    segment.clear();
    finished.clear();
    for (int t = 0; t < steps; ++t) {
      Transition tr;
      tr.obs = env.observation().values;
      const ForwardResult f = forward(net, tr.obs);
      tr.action = sample_action(f.logits, rng, &tr.log_prob);
      tr.value = f.value;
      const StepResult r = env.step(tr.action);
      tr.reward = r.reward;
      tr.done = r.done;
      episode_reward += r.reward;
      segment.push_back(std::move(tr));
      if (r.done) {
        finished.push_back(episode_reward);
        start_episode();
      }
    }
    last_value = forward(net, env.observation().values).value;
  }
};

}  // namespace

TrainResult train(const PipelineSpec& spec, const PpoConfig& cfg, const TrainProgress& progress) {
  cfg.validate();
  TrainResult out;
  const ConceptSchema schema = make_schema(spec.game, spec.schema);
  const MlpShape shape{schema.size(), cfg.hidden_layers, kHiddenWidth, action_count(spec.game)};
  out.net = Mlp::initialized(shape, derive_seed(cfg.seed, 1));
  Adam opt(out.net.param_count(), cfg.lr);
  Rng update_rng(derive_seed(cfg.seed, 2));

  std::vector<Worker> workers;
  for (int i = 0; i < cfg.envs; ++i) {
    workers.emplace_back(spec, derive_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(i)),
                         derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i)));
    workers.back().start_episode();
  }
  const int steps = std::max(1, (cfg.horizon + cfg.envs - 1) / cfg.envs);
  const auto eval_seeds = evaluation_seeds(cfg.eval_seed, cfg.eval_episodes);
  long next_eval = cfg.eval_interval > 0 ? cfg.eval_interval : cfg.total_frames;

  auto evaluate = [&]() {
    const AgentScore s = evaluate_agent(spec, out.net, eval_seeds);
    const EvalPoint p{out.frames, s.mean, s.std};
    out.log.push_back(p);
    if (progress) progress(p);
    return p;
  };

  std::vector<PpoSample> batch;
  while (out.frames < cfg.total_frames) {
#pragma omp parallel for schedule(static, 1)
    for (int i = 0; i < cfg.envs; ++i) workers[static_cast<std::size_t>(i)].collect(out.net, steps);

    batch.clear();
    std::vector<double> adv, ret;
    for (Worker& w : workers) {
      const GaeResult g = gae(w.segment, cfg.gamma, cfg.lambda, w.last_value);
      adv.insert(adv.end(), g.raw.begin(), g.raw.end());
      ret.insert(ret.end(), g.returns.begin(), g.returns.end());
      for (Transition& t : w.segment) batch.push_back({std::move(t.obs), t.action, t.log_prob, 0.0, 0.0});
      out.episode_rewards.insert(out.episode_rewards.end(), w.finished.begin(), w.finished.end());
      out.frames += static_cast<long>(w.segment.size());
    }
    normalize_advantages(adv);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch[i].advantage = adv[i];
      batch[i].ret = ret[i];
    }
    ppo_update(out.net, opt, batch, cfg, update_rng);

    if (out.frames >= next_eval || out.frames >= cfg.total_frames) {
      const EvalPoint p = evaluate();
      while (next_eval <= out.frames) next_eval += cfg.eval_interval > 0 ? cfg.eval_interval : cfg.total_frames;
      if (cfg.target_reward != 0.0 && p.mean > cfg.target_reward) break;
    }
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> v, int window) {
  if (window < 1) throw ContractError("moving_average: window must be positive");
  std::vector<double> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += v[i];
    if (i >= static_cast<std::size_t>(window)) sum -= v[i - static_cast<std::size_t>(window)];
    if (i + 1 >= static_cast<std::size_t>(window)) out.push_back(sum / window);
  }
  return out;
}

std::string eval_log_csv(std::span<const EvalPoint> log) {
  std::ostringstream os;
  os << "frame,mean_reward,std\n";
  for (const EvalPoint& p : log) os << p.frame << ',' << format_exact(p.mean) << ',' << format_exact(p.std) << '\n';
  return os.str();
}

}  // namespace scobot
