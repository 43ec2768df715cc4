#include "scobot/rules.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "scobot/common.hpp"

namespace scobot {

namespace {

constexpr std::string_view kRulesHeader = "SCOBOT-RULES 1";

}  // namespace

RuleSet::RuleSet(ConceptSchema schema, std::vector<std::string> actions, std::vector<Rule> rules,
                 Action default_action)
    : schema_(std::move(schema)),
      actions_(std::move(actions)),
      rules_(std::move(rules)),
      default_action_(default_action) {
  const int n_actions = static_cast<int>(actions_.size());
  if (default_action_ < 0 || default_action_ >= n_actions)
    throw ContractError("RuleSet: default action out of range");
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.premise.empty()) throw ContractError("RuleSet: empty premise");
    if (r.conclusion < 0 || r.conclusion >= n_actions) throw ContractError("RuleSet: conclusion out of range");
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) throw ContractError("RuleSet: confidence outside [0,1]");
    for (const Term& t : r.premise)
      if (t.feature < 0 || t.feature >= schema_.size()) throw ContractError("RuleSet: feature out of range");
    if (i > 0 && rules_[i - 1].confidence < r.confidence)
      throw ContractError("RuleSet: rules not sorted by descending confidence");
  }
}

std::string RuleSet::rule_text(const Rule& r) const {
  std::string s = "IF ";
  for (std::size_t i = 0; i < r.premise.size(); ++i) {
    const Term& t = r.premise[i];
    if (i > 0) s += " AND ";
    s += '(' + schema_.feature_name(t.feature) + (t.greater ? " > " : " <= ") + format_exact(t.threshold) + ')';
  }
  s += " THEN " + actions_[static_cast<std::size_t>(r.conclusion)] + " [conf=" + format_exact(r.confidence) + ']';
  return s;
}

std::string RuleSet::to_text() const {
  std::string s(kRulesHeader);
  s += "\nSCHEMA " + hex64(schema_.hash()) + "\nDEFAULT " + actions_[static_cast<std::size_t>(default_action_)] + '\n';
  for (const Rule& r : rules_) s += rule_text(r) + '\n';
  return s;
}

namespace {

int find_action(const std::vector<std::string>& actions, std::string_view name) {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == name) return static_cast<int>(i);
  throw ContractError("unknown action '" + std::string(name) + "'");
}

Term parse_term(std::string_view s, const ConceptSchema& schema) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ContractError("malformed term '" + std::string(s) + "'");
  s = s.substr(1, s.size() - 2);
  Term t;
  std::size_t op = s.rfind(" > ");
  std::size_t op_len = 3;
  t.greater = true;
  if (op == std::string_view::npos) {
    op = s.rfind(" <= ");
    op_len = 4;
    t.greater = false;
  }
  if (op == std::string_view::npos) throw ContractError("term without comparator '" + std::string(s) + "'");
  const std::string_view name = s.substr(0, op);
  t.feature = schema.feature_index(name);
  if (t.feature < 0) throw ContractError("unknown feature '" + std::string(name) + "'");
  t.threshold = parse_double(s.substr(op + op_len));
  return t;
}

Rule parse_rule(std::string_view line, const ConceptSchema& schema, const std::vector<std::string>& actions) {
  if (!line.starts_with("IF ")) throw ContractError("rule line must start with IF: '" + std::string(line) + "'");
  const std::size_t then = line.rfind(" THEN ");
  const std::size_t conf = line.rfind(" [conf=");
  if (then == std::string_view::npos || conf == std::string_view::npos || conf < then || line.back() != ']')
    throw ContractError("malformed rule '" + std::string(line) + "'");
  Rule r;
  std::string_view premise = line.substr(3, then - 3);
  while (true) {
    const std::size_t sep = premise.find(") AND (");
    if (sep == std::string_view::npos) {
      r.premise.push_back(parse_term(premise, schema));
      break;
    }
    r.premise.push_back(parse_term(premise.substr(0, sep + 1), schema));
    premise = premise.substr(sep + 6);
  }
  r.conclusion = find_action(actions, line.substr(then + 6, conf - then - 6));
  r.confidence = parse_double(line.substr(conf + 7, line.size() - conf - 8));
  return r;
}

}  // namespace

RuleSet RuleSet::parse(std::string_view text, const ConceptSchema& schema,
                       const std::vector<std::string>& actions) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line))
    if (!trim(line).empty() && !line.starts_with('#')) lines.push_back(line);
  if (lines.size() < 3 || lines[0] != kRulesHeader) throw ContractError("not a rule file");
  if (lines[1] != "SCHEMA " + hex64(schema.hash()))
    throw ContractError("rule file was written for a different concept schema");
  if (!lines[2].starts_with("DEFAULT ")) throw ContractError("missing DEFAULT line");
  const Action def = find_action(actions, std::string_view(lines[2]).substr(8));
  std::vector<Rule> rules;
  for (std::size_t i = 3; i < lines.size(); ++i) rules.push_back(parse_rule(lines[i], schema, actions));
  return RuleSet(schema, actions, std::move(rules), def);
}

void save_rules(const RuleSet& rs, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CorruptFileError("cannot write rules: " + path.string());
  os << rs.to_text();
}

RuleSet load_rules(const std::filesystem::path& path, const ConceptSchema& schema,
                   const std::vector<std::string>& actions) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptFileError("missing rule file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return RuleSet::parse(ss.str(), schema, actions);
  } catch (const ContractError& e) {
    throw CorruptFileError(path.string() + ": " + e.what());
  }
}

Action rule_inference(const RuleSet& rs, std::span<const double> x) {
  if (static_cast<int>(x.size()) != rs.schema().size()) throw ContractError("rule_inference: dimension mismatch");
  for (const Rule& r : rs.rules())
    if (kernels::satisfies(x, r.premise)) return r.conclusion;
  return rs.default_action();
}

Action rule_inference(const RuleSet& rs, const ConceptVector& x) {
  if (x.schema_hash != rs.schema().hash()) throw ContractError("rule_inference: schema mismatch");
  return rule_inference(rs, std::span<const double>(x.values));
}

std::vector<int> teacher_labels(const Mlp& net, std::span<const double> x, int dim) {
  const long n = static_cast<long>(x.size()) / dim;
  std::vector<int> y(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] = argmax(forward(net, x.subspan(static_cast<std::size_t>(i) * dim, dim)).logits);
  return y;
}

double fidelity(const RuleSet& rs, const Mlp& net, std::span<const double> x) {
  const int dim = rs.schema().size();
  if (x.empty()) throw ContractError("fidelity: empty data");
  const auto y = teacher_labels(net, x, dim);
  long agree = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (rule_inference(rs, x.subspan(i * dim, dim)) == y[i]) ++agree;
  return static_cast<double>(agree) / static_cast<double>(y.size());
}

DistillationSet collect_distillation_set(const Mlp& net, const PipelineSpec& spec, std::size_t n, double eps,
                                         std::uint64_t seed) {
  if (n < 1) throw ContractError("collect_distillation_set: n must be positive");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ContractError("collect_distillation_set: eps must lie in [0, 1]");
  ConceptEnv env(spec);
  DistillationSet ds;
  ds.dim = env.schema().size();
  Rng rng(derive_seed(seed, 1));
  std::uint64_t episode = 0;
  env.reset(derive_seed(seed, 100 + episode++));
  while (ds.size() < n) {
    const auto& obs = env.observation().values;
    const int teacher = argmax(forward(net, obs).logits);
    ds.x.insert(ds.x.end(), obs.begin(), obs.end());
    ds.labels.push_back(teacher);
    const Action a = rng.bernoulli(eps) ? rng.below(env.action_count()) : teacher;
    if (env.step(a).done) env.reset(derive_seed(seed, 100 + episode++));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

namespace {

using PremiseKey = std::vector<std::tuple<int, bool, double>>;

PremiseKey key_of(const std::vector<Term>& p) {
  PremiseKey k;
  for (const Term& t : p) k.emplace_back(t.feature, t.greater, t.threshold);
  return k;
}

// Tightest bound per feature and side; nullopt when the bounds contradict.
std::optional<std::vector<Term>> normalize(const std::vector<Term>& premise, int dim) {
  std::vector<std::optional<double>> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
  for (const Term& t : premise) {
    auto& b = t.greater ? lo[static_cast<std::size_t>(t.feature)] : hi[static_cast<std::size_t>(t.feature)];
    b = !b ? t.threshold : (t.greater ? std::max(*b, t.threshold) : std::min(*b, t.threshold));
  }
  std::vector<Term> out;
  for (int f = 0; f < dim; ++f) {
    const auto& l = lo[static_cast<std::size_t>(f)];
    const auto& h = hi[static_cast<std::size_t>(f)];
    if (l && h && *h <= *l) return std::nullopt;
    if (l) out.push_back({f, true, *l});
    if (h) out.push_back({f, false, *h});
  }
  return out;
}

struct Candidate {
  std::vector<Term> premise;
  int conclusion;
};

}  // namespace

RuleSet extract_rules(const Mlp& net, std::span<const double> x, const ConceptSchema& schema,
                      const std::vector<std::string>& actions, const ExtractOptions& opts,
                      ExtractionReport* report) {
  const int dim = schema.size();
  const int n_actions = static_cast<int>(actions.size());
  if (dim != net.shape().inputs || n_actions != net.shape().actions)
    throw ContractError("extract_rules: network does not match schema or action set");
  if (x.empty() || x.size() % static_cast<std::size_t>(dim) != 0)
    throw ContractError("extract_rules: input matrix is empty or ragged");
  ExtractionReport rep;
  const std::size_t n = x.size() / static_cast<std::size_t>(dim);

  const std::vector<int> y = teacher_labels(net, x, dim);

  // Hidden activations per layer, row-major.
  const int depth = net.trunk_depth();
  const int width = net.shape().hidden_width;
  std::vector<std::vector<double>> acts(static_cast<std::size_t>(depth),
                                        std::vector<double>(n * static_cast<std::size_t>(width)));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const auto f = forward(net, x.subspan(static_cast<std::size_t>(i) * dim, dim));
    for (int h = 0; h < depth; ++h)
      std::copy(f.hidden[static_cast<std::size_t>(h)].begin(), f.hidden[static_cast<std::size_t>(h)].end(),
                acts[static_cast<std::size_t>(h)].begin() + static_cast<std::ptrdiff_t>(i) * width);
  }

  std::vector<Candidate> candidates;

  const DecisionTree input_tree = induce_tree(x, dim, y, n_actions, opts.mu);
  for (const TreePath& p : input_tree.paths()) {
    candidates.push_back({p.premise, p.label});
    ++rep.input_rules;
  }

  // Input-level clauses equivalent to a hidden term, cached per term.
  std::map<std::tuple<int, int, bool, double>, std::vector<std::vector<Term>>> clause_cache;
  auto clauses_for = [&](int layer, const Term& t) -> const std::vector<std::vector<Term>>& {
    const auto key = std::make_tuple(layer, t.feature, t.greater, t.threshold);
    auto it = clause_cache.find(key);
    if (it != clause_cache.end()) return it->second;
    const auto& a = acts[static_cast<std::size_t>(layer)];
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = a[i * static_cast<std::size_t>(width) + static_cast<std::size_t>(t.feature)];
      truth[i] = (t.greater ? v > t.threshold : v <= t.threshold) ? 1 : 0;
    }
    std::vector<std::vector<Term>> clauses;
    for (const TreePath& p : induce_tree(x, dim, truth, 2, opts.mu).paths())
      if (p.label == 1) clauses.push_back(p.premise);
    return clause_cache.emplace(key, std::move(clauses)).first->second;
  };

  for (int h = 0; h < depth; ++h) {
    const DecisionTree tree = induce_tree(acts[static_cast<std::size_t>(h)], width, y, n_actions, opts.mu);
    long blown_here = 0;
    for (const TreePath& p : tree.paths()) {
      ++rep.hidden_rules;
      std::vector<const std::vector<std::vector<Term>>*> options;
      std::size_t product = 1;
      bool blown = false;
      for (const Term& t : p.premise) {
        const auto& c = clauses_for(h, t);
        options.push_back(&c);
        if (c.empty()) {
          product = 0;
          break;
        }
        if (product > opts.clause_cap / c.size() || product * c.size() > opts.clause_cap) {
          blown = true;
          break;
        }
        product *= c.size();
      }
      if (product == 0) {
        ++rep.dropped_empty;
        continue;
      }
      if (blown) {
        ++rep.dropped_blowup;
        ++blown_here;
        continue;
      }
      // Cross product of the replacement clauses.
      std::vector<std::size_t> idx(options.size(), 0);
      while (true) {
        std::vector<Term> premise;
        for (std::size_t k = 0; k < options.size(); ++k) {
          const auto& c = (*options[k])[idx[k]];
          premise.insert(premise.end(), c.begin(), c.end());
        }
        candidates.push_back({std::move(premise), p.label});
        ++rep.substituted;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == options[k]->size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    if (blown_here)
      rep.warnings.push_back("layer " + std::to_string(h) + ": " + std::to_string(blown_here) +
                             " rules exceed the clause cap of " + std::to_string(opts.clause_cap) + " and were dropped");
  }

  // Pool: canonical premises, exact duplicates merged.
  std::vector<Candidate> pooled;
  std::map<std::pair<PremiseKey, int>, std::size_t> seen;
  for (Candidate& c : candidates) {
    auto norm = normalize(c.premise, dim);
    if (!norm || norm->empty()) {
      ++rep.dropped_empty;
      continue;
    }
    auto k = std::make_pair(key_of(*norm), c.conclusion);
    if (seen.contains(k)) continue;
    seen.emplace(std::move(k), pooled.size());
    pooled.push_back({std::move(*norm), c.conclusion});
  }

  std::vector<std::vector<Term>> premises;
  std::vector<int> conclusions;
  for (const Candidate& c : pooled) {
    premises.push_back(c.premise);
    conclusions.push_back(c.conclusion);
  }
  const auto support = kernels::rule_support(x, dim, y, premises, conclusions);

  // Same premise, different conclusions: the more confident one survives.
  std::map<PremiseKey, std::size_t> by_premise;
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (support[i].matched == 0) {
      ++rep.dropped_empty;
      continue;
    }
    Rule r{pooled[i].premise, pooled[i].conclusion,
           static_cast<double>(support[i].agreed) / static_cast<double>(support[i].matched)};
    const PremiseKey k = key_of(r.premise);
    auto it = by_premise.find(k);
    if (it == by_premise.end()) {
      by_premise.emplace(k, rules.size());
      rules.push_back(std::move(r));
    } else if (r.confidence > rules[it->second].confidence) {
      rules[it->second] = std::move(r);
    }
  }
  std::stable_sort(rules.begin(), rules.end(),
                   [](const Rule& a, const Rule& b) { return a.confidence > b.confidence; });

  std::vector<long> counts(static_cast<std::size_t>(n_actions), 0);
  for (int l : y) ++counts[static_cast<std::size_t>(l)];
  const Action def = static_cast<Action>(std::max_element(counts.begin(), counts.end()) - counts.begin());

  if (report) *report = std::move(rep);
  return RuleSet(schema, actions, std::move(rules), def);
}

}  // namespace scobot
