#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "scobot/rules.hpp"
#include "teachers.hpp"

using namespace scobot;
namespace fs = std::filesystem;

namespace {

const ConceptSchema& schema() {
  static const ConceptSchema s = pruned_schema(GameId::Paddles);
  return s;
}

const std::vector<std::string>& actions() { return action_names(GameId::Paddles); }

bool holds(const Rule& r, std::span<const double> x) {
  for (const Term& t : r.premise) {
    const double v = x[static_cast<std::size_t>(t.feature)];
    if (t.greater ? !(v > t.threshold) : !(v <= t.threshold)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("rule inference takes the first satisfied rule, else the default") {
  const std::vector<Rule> rules{{{{0, true, 0.5}}, 1, 0.9}, {{{1, false, 0.3}}, 2, 0.6}};
  const RuleSet rs(schema(), actions(), rules, 0);
  std::vector<double> x(7, 0.0);
  x[0] = 0.7;
  x[1] = 0.9;
  CHECK(rule_inference(rs, x) == 1);  // only the first holds
  x[1] = 0.1;
  CHECK(rule_inference(rs, x) == 1);  // both hold, 0.9 wins
  x[0] = 0.2;
  CHECK(rule_inference(rs, x) == 2);
  x[1] = 0.5;
  CHECK(rule_inference(rs, x) == 0);
  CHECK(rule_inference(rs, x) == rule_inference(rs, x));

  const ConceptVector cv{x, schema().hash()};
  CHECK(rule_inference(rs, cv) == 0);
  CHECK_THROWS_AS(rule_inference(rs, ConceptVector{x, 1}), ContractError);
  CHECK_THROWS_AS(rule_inference(rs, std::vector<double>{1.0}), ContractError);
}

TEST_CASE("rule set validation") {
  CHECK_THROWS_AS(RuleSet(schema(), actions(), {{{{0, true, 0.5}}, 1, 0.5}, {{{0, true, 0.6}}, 1, 0.7}}, 0),
                  ContractError);
  CHECK_THROWS_AS(RuleSet(schema(), actions(), {{{}, 1, 0.5}}, 0), ContractError);
  CHECK_THROWS_AS(RuleSet(schema(), actions(), {{{{9, true, 0.5}}, 1, 0.5}}, 0), ContractError);
  CHECK_THROWS_AS(RuleSet(schema(), actions(), {}, 3), ContractError);
}

TEST_CASE("rule text round trip") {
  Rng r(1);
  std::vector<Rule> rules;
  double conf = 1.0;
  for (int i = 0; i < 30; ++i) {
    Rule rule;
    for (int t = 0; t <= r.below(3); ++t) rule.premise.push_back({r.below(7), r.bernoulli(0.5), r.normal() / 3});
    rule.conclusion = r.below(3);
    conf *= r.uniform(0.9, 1.0);
    rule.confidence = conf;
    rules.push_back(rule);
  }
  const RuleSet rs(schema(), actions(), rules, 2);
  const std::string text = rs.to_text();
  CHECK(RuleSet::parse(text, schema(), actions()) == rs);
  CHECK(RuleSet::parse("# comment\n" + text, schema(), actions()) == rs);
  CHECK(text.find("IF (") != std::string::npos);
  CHECK_THROWS_AS(RuleSet::parse(text, full_schema(GameId::Paddles), actions()), ContractError);
  CHECK_THROWS_AS(RuleSet::parse("nonsense", schema(), actions()), ContractError);

  const fs::path dir = fs::temp_directory_path() / "scobot_test_rules";
  save_rules(rs, dir / "nested" / "rules.txt");
  CHECK(load_rules(dir / "nested" / "rules.txt", schema(), actions()) == rs);
  {
    std::ofstream os(dir / "bad.txt");
    os << text << "IF (WHAT(player1) > 1) THEN UP [conf=0.5]\n";
  }
  CHECK_THROWS_AS(load_rules(dir / "bad.txt", schema(), actions()), CorruptFileError);
  CHECK_THROWS_AS(load_rules(dir / "absent.txt", schema(), actions()), CorruptFileError);
  fs::remove_all(dir);
}

TEST_CASE("threshold teacher is distilled exactly") {
  Rng r(2);
  const Mlp net = teachers::threshold_net(7);
  const std::vector<double> x = teachers::uniform_rows(r, 5000, 7);
  ExtractionReport report;
  const RuleSet rs = extract_rules(net, x, schema(), actions(), {}, &report);
  CHECK(fidelity(rs, net, x) == 1.0);
  CHECK(report.dropped_blowup == 0);
  CHECK(report.hidden_rules > 0);
  CHECK(report.input_rules > 0);

  // One hidden layer: every hidden term is replaced by input terms only once,
  // so all surviving premises are over input features.
  for (const Rule& rule : rs.rules())
    for (const Term& t : rule.premise) CHECK(t.feature < schema().size());

  // Held-out states stay almost exact; only the narrow band around the cut can differ.
  const std::vector<double> fresh = teachers::uniform_rows(r, 5000, 7);
  CHECK(fidelity(rs, net, fresh) >= 0.99);
}

TEST_CASE("confidences are empirical and rules are sorted") {
  Rng r(3);
  // A teacher with a noisier decision: random weights over all inputs.
  Mlp net({7, 2, 8, 3});
  for (auto& p : net.params()) p = r.uniform(-1, 1);
  const std::vector<double> x = teachers::uniform_rows(r, 3000, 7);
  const RuleSet rs = extract_rules(net, x, schema(), actions());
  const std::vector<int> y = teacher_labels(net, x, 7);
  REQUIRE_FALSE(rs.rules().empty());
  std::set<std::vector<std::tuple<int, bool, double>>> seen;
  for (std::size_t k = 0; k < rs.rules().size(); ++k) {
    const Rule& rule = rs.rules()[k];
    long matched = 0, agreed = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (holds(rule, std::span(&x[i * 7], 7))) {
        ++matched;
        agreed += y[i] == rule.conclusion;
      }
    REQUIRE(matched > 0);
    CHECK(rule.confidence == doctest::Approx(static_cast<double>(agreed) / matched).epsilon(1e-9));
    if (k > 0) CHECK(rs.rules()[k - 1].confidence >= rule.confidence);
    std::vector<std::tuple<int, bool, double>> key;
    for (const Term& t : rule.premise) key.emplace_back(t.feature, t.greater, t.threshold);
    CHECK(seen.insert(key).second);
  }

  // Default is the teacher's majority label; the default-only set scores its frequency.
  std::vector<long> counts(3, 0);
  for (int l : y) ++counts[static_cast<std::size_t>(l)];
  const int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  CHECK(rs.default_action() == majority);
  const RuleSet bare(schema(), actions(), {}, majority);
  const double base = fidelity(bare, net, x);
  CHECK(base == doctest::Approx(static_cast<double>(counts[static_cast<std::size_t>(majority)]) / y.size()));
  CHECK(fidelity(rs, net, x) >= base);
  CHECK(extract_rules(net, x, schema(), actions()) == rs);
}

TEST_CASE("teacher labels are greedy") {
  const Mlp net = teachers::threshold_net(7);
  std::vector<double> x(14, 0.0);
  x[0] = 0.9;
  x[7] = 0.1;
  CHECK(teacher_labels(net, x, 7) == std::vector<int>{1, 0});
  CHECK_THROWS_AS(extract_rules(net, std::vector<double>{}, schema(), actions()), ContractError);
  CHECK_THROWS_AS(extract_rules(teachers::threshold_net(6), std::vector<double>(12, 0.0), schema(), actions()),
                  ContractError);
}

TEST_CASE("distillation set collection") {
  PipelineSpec spec;
  const Mlp net = Mlp::initialized({schema().size(), 2, kHiddenWidth, 3}, 4);
  const DistillationSet greedy = collect_distillation_set(net, spec, 400, 0.0, 5);
  CHECK(greedy.size() == 400);
  CHECK(greedy.dim == 7);
  CHECK(teacher_labels(net, greedy.x, 7) == greedy.labels);

  // Replaying the greedy teacher from the same seed visits the same states.
  ConceptEnv env(spec);
  env.reset(derive_seed(5, 100));
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::equal(env.observation().values.begin(), env.observation().values.end(), greedy.x.begin() + static_cast<long>(i * 7)));
    env.step(greedy.labels[i]);
  }

  const DistillationSet random = collect_distillation_set(net, spec, 400, 1.0, 5);
  CHECK(teacher_labels(net, random.x, 7) == random.labels);
  CHECK(collect_distillation_set(net, spec, 400, 1.0, 5).x == random.x);
  CHECK_THROWS_AS(collect_distillation_set(net, spec, 10, 1.5, 5), ContractError);
}
