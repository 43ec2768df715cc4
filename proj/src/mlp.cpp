#include "scobot/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "scobot/common.hpp"

namespace scobot {

Mlp::Mlp(MlpShape shape) : shape_(shape) {
  if (shape.hidden_layers < 1 || shape.hidden_layers > 2)
    throw ContractError("Mlp: hidden layer count must be 1 or 2");
  if (shape.inputs < 1 || shape.actions < 1 || shape.hidden_width < 1)
    throw ContractError("Mlp: dimensions must be positive");
  std::size_t offset = 0;
  auto add = [&](int in, int out) {
    Layer l{in, out, offset, offset + static_cast<std::size_t>(in) * out};
    offset = l.bias + static_cast<std::size_t>(out);
    layers_.push_back(l);
  };
  int width = shape.inputs;
  for (int i = 0; i < shape.hidden_layers; ++i) {
    add(width, shape.hidden_width);
    width = shape.hidden_width;
  }
  add(width, shape.actions);
  add(width, 1);
  params_.assign(offset, 0.0);
}

namespace {

// Rows (or columns, whichever are fewer) of a Gaussian matrix made
// orthonormal by modified Gram-Schmidt.
void orthogonal_fill(std::span<double> w, int rows, int cols, double gain, Rng& rng) {
  for (double& v : w) v = rng.normal();
  const bool by_rows = rows <= cols;
  const int count = by_rows ? rows : cols, len = by_rows ? cols : rows;
  auto at = [&](int vec, int i) -> double& {
    return by_rows ? w[static_cast<std::size_t>(vec) * cols + i] : w[static_cast<std::size_t>(i) * cols + vec];
  };
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < a; ++b) {
      double dot = 0.0;
      for (int i = 0; i < len; ++i) dot += at(a, i) * at(b, i);
      for (int i = 0; i < len; ++i) at(a, i) -= dot * at(b, i);
    }
    double norm = 0.0;
    for (int i = 0; i < len; ++i) norm += at(a, i) * at(a, i);
    norm = std::sqrt(norm);
    for (int i = 0; i < len; ++i) at(a, i) /= norm;
  }
  for (double& v : w) v *= gain;
}

}  // namespace

Mlp Mlp::initialized(MlpShape shape, std::uint64_t seed) {
  Mlp net(shape);
  Rng rng(seed);
  for (std::size_t i = 0; i < net.layers_.size(); ++i) {
    const Layer& l = net.layers_[i];
    double gain = std::sqrt(2.0);
    if (static_cast<int>(i) == shape.hidden_layers) gain = 0.01;
    if (static_cast<int>(i) == shape.hidden_layers + 1) gain = 1.0;
    orthogonal_fill(std::span<double>(net.params_).subspan(l.weights, static_cast<std::size_t>(l.in) * l.out),
                    l.out, l.in, gain, rng);
  }
  return net;
}

namespace {

void affine(std::span<const double> p, const Mlp::Layer& l, std::span<const double> x,
            std::vector<double>& y) {
  y.assign(static_cast<std::size_t>(l.out), 0.0);
  for (int o = 0; o < l.out; ++o) {
    const double* w = p.data() + l.weights + static_cast<std::size_t>(o) * l.in;
    double s = p[l.bias + static_cast<std::size_t>(o)];
    for (int i = 0; i < l.in; ++i) s += w[i] * x[static_cast<std::size_t>(i)];
    y[static_cast<std::size_t>(o)] = s;
  }
}

}  // namespace

ForwardResult forward(const Mlp& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.shape().inputs)
    throw ContractError("forward: input dimension mismatch");
  ForwardResult r;
  const auto p = net.params();
  std::span<const double> h = x;
  std::vector<double> z;
  for (int i = 0; i < net.trunk_depth(); ++i) {
    affine(p, net.layers()[static_cast<std::size_t>(i)], h, z);
    for (double& v : z) v = std::tanh(v);
    r.hidden.push_back(z);
    h = r.hidden.back();
  }
  affine(p, net.policy_head(), h, r.logits);
  std::vector<double> v;
  affine(p, net.value_head(), h, v);
  r.value = v[0];
  return r;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double z : logits) s += std::exp(z - mx);
  const double lse = mx + std::log(s);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

int argmax(std::span<const double> logits) {
  int best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

LossStats ppo_loss(const Mlp& net, std::span<const PpoSample> batch, const LossSpec& spec,
                   std::vector<double>* grad) {
  LossStats st;
  if (batch.empty()) return st;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const auto p = net.params();
  if (grad) grad->assign(net.param_count(), 0.0);

  const Mlp::Layer& ph = net.policy_head();
  const Mlp::Layer& vh = net.value_head();
  const int L = net.shape().actions;
  std::vector<double> dlogits(static_cast<std::size_t>(L)), dh, dprev;

  for (const PpoSample& s : batch) {
    const ForwardResult f = forward(net, s.obs);
    const auto logp = log_softmax(f.logits);
    double entropy = 0.0;
    for (double lp : logp) entropy -= std::exp(lp) * lp;

    const double ratio = std::exp(logp[static_cast<std::size_t>(s.action)] - s.old_log_prob);
    const double clipped_ratio = std::clamp(ratio, 1.0 - spec.clip, 1.0 + spec.clip);
    const double unclipped = ratio * s.advantage, clipped = clipped_ratio * s.advantage;
    const double policy = -std::min(unclipped, clipped);
    const double value_err = f.value - s.ret;

    st.policy_loss += policy * inv_n;
    st.value_loss += value_err * value_err * inv_n;
    st.entropy += entropy * inv_n;
    if (std::abs(ratio - 1.0) > spec.clip) st.clip_fraction += inv_n;
    st.approx_kl += ((ratio - 1.0) - std::log(ratio)) * inv_n;

    if (!grad) continue;
    auto& g = *grad;

    // d(policy)/d(log p_a): only the unclipped branch carries gradient.
    const double dlogp_a = unclipped <= clipped ? -ratio * s.advantage : 0.0;
    for (int j = 0; j < L; ++j) {
      const double pj = std::exp(logp[static_cast<std::size_t>(j)]);
      const double d_policy = dlogp_a * ((j == s.action ? 1.0 : 0.0) - pj);
      const double d_entropy = -pj * (logp[static_cast<std::size_t>(j)] + entropy);
      dlogits[static_cast<std::size_t>(j)] =
          (spec.policy_coef * d_policy - spec.entropy_coef * d_entropy) * inv_n;
    }
    const double dvalue = spec.value_coef * 2.0 * value_err * inv_n;

    const std::vector<double>& top = f.hidden.back();
    const int width = static_cast<int>(top.size());
    dh.assign(static_cast<std::size_t>(width), 0.0);
    for (int o = 0; o < L; ++o) {
      const double d = dlogits[static_cast<std::size_t>(o)];
      g[ph.bias + static_cast<std::size_t>(o)] += d;
      for (int i = 0; i < width; ++i) {
        g[ph.weights + static_cast<std::size_t>(o) * width + i] += d * top[static_cast<std::size_t>(i)];
        dh[static_cast<std::size_t>(i)] += d * p[ph.weights + static_cast<std::size_t>(o) * width + i];
      }
    }
    g[vh.bias] += dvalue;
    for (int i = 0; i < width; ++i) {
      g[vh.weights + static_cast<std::size_t>(i)] += dvalue * top[static_cast<std::size_t>(i)];
      dh[static_cast<std::size_t>(i)] += dvalue * p[vh.weights + static_cast<std::size_t>(i)];
    }

    for (int li = net.trunk_depth() - 1; li >= 0; --li) {
      const Mlp::Layer& l = net.layers()[static_cast<std::size_t>(li)];
      const std::vector<double>& out = f.hidden[static_cast<std::size_t>(li)];
      std::span<const double> in =
          li == 0 ? std::span<const double>(s.obs) : std::span<const double>(f.hidden[static_cast<std::size_t>(li - 1)]);
      dprev.assign(static_cast<std::size_t>(l.in), 0.0);
      for (int o = 0; o < l.out; ++o) {
        const double dz = dh[static_cast<std::size_t>(o)] * (1.0 - out[static_cast<std::size_t>(o)] * out[static_cast<std::size_t>(o)]);
        g[l.bias + static_cast<std::size_t>(o)] += dz;
        const std::size_t row = l.weights + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) {
          g[row + static_cast<std::size_t>(i)] += dz * in[static_cast<std::size_t>(i)];
          dprev[static_cast<std::size_t>(i)] += dz * p[row + static_cast<std::size_t>(i)];
        }
      }
      dh.swap(dprev);
    }
  }
  st.total = spec.policy_coef * st.policy_loss + spec.value_coef * st.value_loss -
             spec.entropy_coef * st.entropy;
  return st;
}

std::vector<double> backward(const Mlp& net, std::span<const PpoSample> batch, const LossSpec& spec) {
  std::vector<double> g;
  const LossStats st = ppo_loss(net, batch, spec, &g);
  if (!std::isfinite(st.total)) throw NumericalError("backward: non-finite loss");
  return g;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ContractError("Adam::step: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / (norm + 1e-6);
    for (double& g : grad) g *= scale;
  }
  return norm;
}

// ---------------------------------------------------------------------------
// Checkpoint
// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[4] = {'S', 'C', 'P', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    std::memcpy(&bits, &v, sizeof(T));
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
    throw CorruptFileError("truncated checkpoint: " + path.string());
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  T v;
  if constexpr (std::is_floating_point_v<T>) {
    std::memcpy(&v, &bits, sizeof(T));
  } else {
    v = static_cast<T>(bits);
  }
  return v;
}

}  // namespace

void save_checkpoint(const Mlp& net, std::uint64_t schema_hash, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CorruptFileError("cannot write checkpoint: " + path.string());
  os.write(kCheckpointMagic, 4);
  put_le<std::uint32_t>(os, kCheckpointVersion);
  put_le<std::uint64_t>(os, schema_hash);
  const MlpShape& s = net.shape();
  for (int v : {s.inputs, s.hidden_layers, s.hidden_width, s.actions})
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(v));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers().size()));
  const auto p = net.params();
  for (const Mlp::Layer& l : net.layers()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.out));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.in));
    for (std::size_t i = 0; i < static_cast<std::size_t>(l.in) * l.out; ++i) put_le<double>(os, p[l.weights + i]);
    for (std::size_t i = 0; i < static_cast<std::size_t>(l.out); ++i) put_le<double>(os, p[l.bias + i]);
  }
}

Mlp load_checkpoint(const std::filesystem::path& path, std::uint64_t* schema_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptFileError("missing checkpoint: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw CorruptFileError("not a checkpoint: " + path.string());
  if (get_le<std::uint32_t>(is, path) != kCheckpointVersion)
    throw CorruptFileError("unsupported checkpoint version: " + path.string());
  const auto hash = get_le<std::uint64_t>(is, path);
  if (schema_hash) *schema_hash = hash;
  MlpShape s;
  s.inputs = static_cast<int>(get_le<std::uint32_t>(is, path));
  s.hidden_layers = static_cast<int>(get_le<std::uint32_t>(is, path));
  s.hidden_width = static_cast<int>(get_le<std::uint32_t>(is, path));
  s.actions = static_cast<int>(get_le<std::uint32_t>(is, path));
  Mlp net;
  try {
    net = Mlp(s);
  } catch (const ContractError&) {
    throw CorruptFileError("invalid network shape in checkpoint: " + path.string());
  }
  if (get_le<std::uint32_t>(is, path) != net.layers().size())
    throw CorruptFileError("layer count mismatch in checkpoint: " + path.string());
  auto p = net.params();
  for (const Mlp::Layer& l : net.layers()) {
    const auto out = get_le<std::uint32_t>(is, path);
    const auto in = get_le<std::uint32_t>(is, path);
    if (static_cast<int>(out) != l.out || static_cast<int>(in) != l.in)
      throw CorruptFileError("layer shape mismatch in checkpoint: " + path.string());
    for (std::size_t i = 0; i < static_cast<std::size_t>(l.in) * l.out; ++i) p[l.weights + i] = get_le<double>(is, path);
    for (std::size_t i = 0; i < static_cast<std::size_t>(l.out); ++i) p[l.bias + i] = get_le<double>(is, path);
  }
  return net;
}

}  // namespace scobot
