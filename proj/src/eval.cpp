#include "scobot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scobot/common.hpp"

namespace scobot {

double center_divergence_score(const BBox& p, const BBox& g) {
  const double diag = std::hypot(g.width(), g.height());
  if (!(diag > 0.0)) throw ContractError("center_divergence_score: degenerate ground-truth box");
  const double d = std::hypot(p.cx() - g.cx(), p.cy() - g.cy());
  return std::max(0.0, 1.0 - d / diag);
}

MatchResult match(std::span<const LabeledDetection> dets, std::span<const GroundTruthObject> gts,
                  double threshold) {
  MatchResult m;
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[static_cast<std::size_t>(a)].det.confidence > dets[static_cast<std::size_t>(b)].det.confidence;
  });
  std::vector<bool> taken(gts.size(), false);
  std::vector<bool> matched(dets.size(), false);
  for (int d : order) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double s = center_divergence_score(dets[static_cast<std::size_t>(d)].det.box, gts[g].box);
      if (s >= threshold && (best < 0 || s > best_score)) {
        best = static_cast<int>(g);
        best_score = s;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      matched[static_cast<std::size_t>(d)] = true;
      m.pairs.emplace_back(d, best);
    }
  }
  for (std::size_t d = 0; d < dets.size(); ++d)
    if (!matched[d]) m.unmatched_detections.push_back(static_cast<int>(d));
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!taken[g]) m.unmatched_ground_truths.push_back(static_cast<int>(g));
  return m;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)),
      counts_((classes_.size() + 1) * (classes_.size() + 1), 0) {}

std::size_t ConfusionMatrix::index(int row, int col) const {
  const int n = size() + 1;
  if (row < 0 || col < 0 || row >= n || col >= n) throw ContractError("ConfusionMatrix: index out of range");
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(n) + static_cast<std::size_t>(col);
}

void ConfusionMatrix::add(int row, int col, long n) {
  if (row == not_an_object() && col == not_detected())
    throw ContractError("ConfusionMatrix: (not_an_object, not_detected) is structurally zero");
  counts_[index(row, col)] += n;
}

int ConfusionMatrix::class_index(std::string_view label) const {
  for (std::size_t i = 0; i < classes_.size(); ++i)
    if (classes_[i] == label) return static_cast<int>(i);
  throw ContractError("label '" + std::string(label) + "' is not in the class vocabulary");
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  if (o.classes_ != classes_) throw ContractError("ConfusionMatrix: class vocabularies differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  return *this;
}

std::string ConfusionMatrix::to_text() const {
  std::vector<std::string> rows = classes_, cols = classes_;
  rows.push_back("not_an_object");
  cols.push_back("not_detected");
  std::size_t w = 0;
  for (const auto& s : rows) w = std::max(w, s.size());
  for (const auto& s : cols) w = std::max(w, s.size());
  w += 2;
  auto pad = [w](const std::string& s) { return std::string(w - std::min(w, s.size()), ' ') + s; };
  std::ostringstream os;
  os << pad("gt \\ pred");
  for (const auto& c : cols) os << pad(c);
  os << '\n';
  for (int r = 0; r <= size(); ++r) {
    os << pad(rows[static_cast<std::size_t>(r)]);
    for (int c = 0; c <= size(); ++c) os << pad(std::to_string(at(r, c)));
    os << '\n';
  }
  return os.str();
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream os;
  os << "ground_truth";
  for (const auto& c : classes_) os << ',' << c;
  os << ",not_detected\n";
  for (int r = 0; r <= size(); ++r) {
    os << (r < size() ? classes_[static_cast<std::size_t>(r)] : std::string("not_an_object"));
    for (int c = 0; c <= size(); ++c) os << ',' << at(r, c);
    os << '\n';
  }
  return os.str();
}

ConfusionMatrix confusion(const MatchResult& m, std::span<const LabeledDetection> dets,
                          std::span<const GroundTruthObject> gts, const std::vector<std::string>& classes) {
  ConfusionMatrix cm(classes);
  for (const auto& [d, g] : m.pairs)
    cm.add(cm.class_index(gts[static_cast<std::size_t>(g)].cls),
           cm.class_index(dets[static_cast<std::size_t>(d)].label));
  for (int d : m.unmatched_detections)
    cm.add(cm.not_an_object(), cm.class_index(dets[static_cast<std::size_t>(d)].label));
  for (int g : m.unmatched_ground_truths)
    cm.add(cm.class_index(gts[static_cast<std::size_t>(g)].cls), cm.not_detected());
  return cm;
}

namespace {

Prf make_prf(long correct, long detections, long truths) {
  Prf p;
  p.precision = detections > 0 ? static_cast<double>(correct) / static_cast<double>(detections) : 0.0;
  p.recall = truths > 0 ? static_cast<double>(correct) / static_cast<double>(truths) : 0.0;
  p.f = p.precision + p.recall > 0.0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

}  // namespace

Prf summarize(const ConfusionMatrix& cm) {
  long correct = 0, detections = 0, truths = 0;
  const int n = cm.size();
  for (int i = 0; i < n; ++i) correct += cm.at(i, i);
  for (int r = 0; r <= n; ++r)
    for (int c = 0; c < n; ++c) detections += cm.at(r, c);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c <= n; ++c) truths += cm.at(r, c);
  return make_prf(correct, detections, truths);
}

Prf summarize_class(const ConfusionMatrix& cm, int cls) {
  long detections = 0, truths = 0;
  for (int r = 0; r <= cm.size(); ++r) detections += cm.at(r, cls);
  for (int c = 0; c <= cm.size(); ++c) truths += cm.at(cls, c);
  return make_prf(cm.at(cls, cls), detections, truths);
}

ConfusionMatrix evaluate_detection(GameId game, const VisionModel& model,
                                   std::span<const AnnotatedFrame> frames) {
  const auto& classes = object_classes(game);
  std::vector<ConfusionMatrix> per_frame(frames.size(), ConfusionMatrix(classes));
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(frames.size()); ++i) {
    const AnnotatedFrame& af = frames[static_cast<std::size_t>(i)];
    const auto dets = detect_objects(af.frame, game, model);
    per_frame[static_cast<std::size_t>(i)] = confusion(match(dets, af.objects), dets, af.objects, classes);
  }
  ConfusionMatrix total(classes);
  for (const auto& cm : per_frame) total += cm;
  return total;
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t base, int episodes) {
  if (episodes < 1) throw ContractError("evaluation needs at least one episode");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < episodes; ++i) seeds.push_back(derive_seed(base, static_cast<std::uint64_t>(i)));
  return seeds;
}

AgentScore score_of(std::vector<double> rewards) {
  AgentScore s;
  s.rewards = std::move(rewards);
  const double n = static_cast<double>(s.rewards.size());
  for (double r : s.rewards) s.mean += r / n;
  if (s.rewards.size() > 1) {
    double ss = 0.0;
    for (double r : s.rewards) ss += (r - s.mean) * (r - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

AgentScore evaluate_agent(const PipelineSpec& spec, const Selector& selector,
                          std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ContractError("evaluation needs at least one episode");
  std::vector<double> rewards;
  for (std::uint64_t seed : seeds) {
    ConceptEnv env(spec);
    env.reset(seed);
    double total = 0.0;
    while (!env.done()) total += env.step(selector(env.observation(), env.state())).reward;
    rewards.push_back(total);
  }
  return score_of(std::move(rewards));
}

AgentScore evaluate_agent(const PipelineSpec& spec, const Mlp& net, std::span<const std::uint64_t> seeds) {
  return evaluate_agent(
      spec, [&net](const ConceptVector& x, const GameState&) { return argmax(forward(net, x.values).logits); },
      seeds);
}

AgentScore evaluate_agent(const PipelineSpec& spec, const RuleSet& rules, std::span<const std::uint64_t> seeds) {
  return evaluate_agent(
      spec, [&rules](const ConceptVector& x, const GameState&) { return rule_inference(rules, x); }, seeds);
}

}  // namespace scobot
