#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scobot {

inline constexpr int kHiddenWidth = 64;

struct MlpShape {
  int inputs = 0;
  int hidden_layers = 2;  // 1 or 2
  int hidden_width = kHiddenWidth;
  int actions = 0;

  bool operator==(const MlpShape&) const = default;
};

/// Shared tanh trunk with an action-logit head and a scalar value head.
/// Parameters live in one flat vector; each layer stores its weight matrix
/// (out x in, row-major) followed by its bias.
class Mlp {
 public:
  struct Layer {
    int in = 0, out = 0;
    std::size_t weights = 0;  // offset of W
    std::size_t bias = 0;     // offset of b
    bool operator==(const Layer&) const = default;
  };

  Mlp() = default;
  explicit Mlp(MlpShape shape);  // all parameters zero

  /// Orthogonal initialization: trunk gain sqrt(2), policy head 0.01, value head 1.
  static Mlp initialized(MlpShape shape, std::uint64_t seed);

  const MlpShape& shape() const { return shape_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  /// Trunk layers in order, then the policy head, then the value head.
  const std::vector<Layer>& layers() const { return layers_; }
  int trunk_depth() const { return shape_.hidden_layers; }
  const Layer& policy_head() const { return layers_[static_cast<std::size_t>(shape_.hidden_layers)]; }
  const Layer& value_head() const { return layers_[static_cast<std::size_t>(shape_.hidden_layers) + 1]; }

  bool operator==(const Mlp&) const = default;

 private:
  MlpShape shape_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

struct ForwardResult {
  std::vector<double> logits;
  double value = 0.0;
  std::vector<std::vector<double>> hidden;  // activations per trunk layer
};

ForwardResult forward(const Mlp& net, std::span<const double> x);

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);
/// Index of the largest logit; ties go to the lowest index.
int argmax(std::span<const double> logits);

// ---------------------------------------------------------------------------
// PPO loss and its gradient
// ---------------------------------------------------------------------------

struct PpoSample {
  std::vector<double> obs;
  int action = 0;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

/// total = policy_coef * clipped surrogate + value_coef * MSE - entropy_coef * entropy
struct LossSpec {
  double clip = 0.2;
  double policy_coef = 1.0;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

/// Batch-mean PPO loss. When `grad` is non-null it receives dtotal/dparams
/// (resized to param_count).
LossStats ppo_loss(const Mlp& net, std::span<const PpoSample> batch, const LossSpec& spec,
                   std::vector<double>* grad = nullptr);

/// Gradient of the PPO loss; throws NumericalError on a non-finite loss.
std::vector<double> backward(const Mlp& net, std::span<const PpoSample> batch, const LossSpec& spec);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5);

  void step(std::span<double> params, std::span<const double> grad);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_ = 0.0, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-5;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// Scales `grad` so its L2 norm is at most `max_norm`; returns the original norm.
double clip_grad_norm(std::span<double> grad, double max_norm);

// ---------------------------------------------------------------------------
// Checkpoint file
// ---------------------------------------------------------------------------
//
//   bytes 0..3   magic "SCPK"
//   u32          format version (1)
//   u64          concept schema hash
//   u32 x 4      inputs, hidden layers, hidden width, actions
//   u32          layer count
//   per layer    u32 out, u32 in, then out*in f64 weights (row-major), out f64 biases
//
// All integers and doubles are little-endian.

void save_checkpoint(const Mlp& net, std::uint64_t schema_hash, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path, std::uint64_t* schema_hash = nullptr);

}  // namespace scobot
