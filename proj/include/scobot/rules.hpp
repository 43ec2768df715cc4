#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scobot/env.hpp"
#include "scobot/kernels.hpp"
#include "scobot/mlp.hpp"
#include "scobot/pipeline.hpp"
#include "scobot/relations.hpp"
#include "scobot/tree.hpp"

namespace scobot {

using Term = kernels::PremiseTerm;

struct Rule {
  std::vector<Term> premise;  // conjunction
  Action conclusion = 0;
  double confidence = 0.0;

  bool operator==(const Rule&) const = default;
};

/// IF-THEN rules over concept features, sorted by descending confidence.
class RuleSet {
 public:
  RuleSet(ConceptSchema schema, std::vector<std::string> actions, std::vector<Rule> rules,
          Action default_action);

  const ConceptSchema& schema() const { return schema_; }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<Rule>& rules() const { return rules_; }
  Action default_action() const { return default_action_; }

  std::string rule_text(const Rule& r) const;

  /// Header lines (format, schema hash, default action) then one rule per line;
  /// the parser skips lines starting with '#'.
  ///
  ///   IF (DISTANCE(player1,ball1) > 0.5200) AND (SPEED(ball1) <= 0.0110) THEN UP [conf=0.9312]
  std::string to_text() const;
  static RuleSet parse(std::string_view text, const ConceptSchema& schema,
                       const std::vector<std::string>& actions);

  bool operator==(const RuleSet& o) const {
    return schema_.hash() == o.schema_.hash() && actions_ == o.actions_ && rules_ == o.rules_ &&
           default_action_ == o.default_action_;
  }

 private:
  ConceptSchema schema_;
  std::vector<std::string> actions_;
  std::vector<Rule> rules_;
  Action default_action_;
};

void save_rules(const RuleSet& rs, const std::filesystem::path& path);
RuleSet load_rules(const std::filesystem::path& path, const ConceptSchema& schema,
                   const std::vector<std::string>& actions);

/// Conclusion of the first (highest-confidence) satisfied rule, else the default.
Action rule_inference(const RuleSet& rs, std::span<const double> x);
Action rule_inference(const RuleSet& rs, const ConceptVector& x);

/// Greedy teacher labels, row-major input matrix.
std::vector<int> teacher_labels(const Mlp& net, std::span<const double> x, int dim);

/// Fraction of rows where the rule set agrees with the teacher's greedy action.
double fidelity(const RuleSet& rs, const Mlp& net, std::span<const double> x);

struct DistillationSet {
  int dim = 0;
  std::vector<double> x;  // row-major states
  std::vector<int> labels;  // teacher's greedy action per state

  std::size_t size() const { return labels.size(); }
};

/// States visited by the teacher acting greedily except for a uniformly
/// random action with probability `eps`; labels always come from the teacher.
DistillationSet collect_distillation_set(const Mlp& net, const PipelineSpec& spec, std::size_t n, double eps,
                                         std::uint64_t seed);

struct ExtractOptions {
  int mu = kDefaultMu;
  std::size_t clause_cap = 512;  // substituted clauses per hidden-layer rule
};

struct ExtractionReport {
  int hidden_rules = 0;     // rules read off the hidden-layer trees
  int input_rules = 0;      // rules read off the input tree
  int substituted = 0;      // input-level clauses produced by substitution
  int dropped_blowup = 0;   // hidden-layer rules dropped at the cap
  int dropped_empty = 0;    // contradictory or unsupported premises
  std::vector<std::string> warnings;
};

/// Teacher labels -> one tree per hidden layer and one on the inputs ->
/// hidden terms rewritten as input clauses -> pooled, deduplicated rules
/// with empirical confidences. `x` is row-major with schema.size() columns.
RuleSet extract_rules(const Mlp& net, std::span<const double> x, const ConceptSchema& schema,
                      const std::vector<std::string>& actions, const ExtractOptions& opts = {},
                      ExtractionReport* report = nullptr);

}  // namespace scobot
