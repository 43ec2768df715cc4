#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scobot/mlp.hpp"
#include "scobot/pipeline.hpp"
#include "scobot/rules.hpp"

namespace scobot {

inline constexpr double kMatchThreshold = 0.5;

/// max(0, 1 - |center(p) - center(g)| / diag(g)).
double center_divergence_score(const BBox& p, const BBox& g);

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (detection, ground truth)
  std::vector<int> unmatched_detections;
  std::vector<int> unmatched_ground_truths;
};

/// Detections in descending confidence (ties: index) each take their
/// best-scoring free ground truth (ties: index) among scores >= threshold.
MatchResult match(std::span<const LabeledDetection> dets, std::span<const GroundTruthObject> gts,
                  double threshold = kMatchThreshold);

/// Rows: ground-truth classes, then not_an_object (unmatched detections,
/// counted under their predicted class). Columns: predicted classes, then
/// not_detected (unmatched ground truths, counted under their true class).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);

  const std::vector<std::string>& classes() const { return classes_; }
  int size() const { return static_cast<int>(classes_.size()); }
  int not_an_object() const { return size(); }  // row index
  int not_detected() const { return size(); }   // column index

  long at(int row, int col) const { return counts_[index(row, col)]; }
  void add(int row, int col, long n = 1);
  int class_index(std::string_view label) const;  // throws for labels outside the vocabulary

  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;

  std::string to_text() const;
  std::string to_csv() const;

 private:
  std::size_t index(int row, int col) const;

  std::vector<std::string> classes_;
  std::vector<long> counts_;
};

ConfusionMatrix confusion(const MatchResult& m, std::span<const LabeledDetection> dets,
                          std::span<const GroundTruthObject> gts, const std::vector<std::string>& classes);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Micro scores: precision over all detections, recall over all ground truths.
Prf summarize(const ConfusionMatrix& cm);

/// Per-object scores of one class: precision among detections predicted as
/// that class, recall among its ground truths.
Prf summarize_class(const ConfusionMatrix& cm, int cls);

/// Confusion matrix of the vision model over annotated frames.
ConfusionMatrix evaluate_detection(GameId game, const VisionModel& model,
                                   std::span<const AnnotatedFrame> frames);

struct AgentScore {
  std::vector<double> rewards;  // one per episode
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

/// Picks an action from the concept vector (and, for scripted baselines, the state).
using Selector = std::function<Action(const ConceptVector&, const GameState&)>;

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t base, int episodes);

AgentScore evaluate_agent(const PipelineSpec& spec, const Selector& selector,
                          std::span<const std::uint64_t> seeds);
AgentScore evaluate_agent(const PipelineSpec& spec, const Mlp& net, std::span<const std::uint64_t> seeds);
AgentScore evaluate_agent(const PipelineSpec& spec, const RuleSet& rules,
                          std::span<const std::uint64_t> seeds);

AgentScore score_of(std::vector<double> rewards);

}  // namespace scobot
