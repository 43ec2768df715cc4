#include "scobot/commands.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "scobot/data.hpp"
#include "scobot/eval.hpp"
#include "scobot/mlp.hpp"
#include "scobot/ppo.hpp"
#include "scobot/rules.hpp"

namespace scobot {

namespace fs = std::filesystem;

MissingArtifactError::MissingArtifactError(const fs::path& path, std::string_view producer)
    : std::runtime_error("missing " + path.string() + "; run `scobot " + std::string(producer) + "` first") {}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"gen-data", "fit-vision",    "eval-vision",  "train-ppo",
                                                 "distill",  "eval-agent", "inspect-rules"};
  return names;
}

namespace {

void require(const fs::path& p, std::string_view producer) {
  if (!fs::exists(p)) throw MissingArtifactError(p, producer);
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os || !(os << text)) throw CorruptFileError("cannot write " + p.string());
}

std::string fmt(double v) { return format_exact(v); }

std::shared_ptr<const VisionModel> load_vision(const ArtifactPaths& paths, const RunConfig& cfg) {
  require(paths.background(), "fit-vision");
  require(paths.centroids(), "fit-vision");
  auto m = std::make_shared<VisionModel>();
  m->background = load_background(paths.background());
  m->centroids = load_centroids(paths.centroids());
  m->params = cfg.vision_params();
  return m;
}

PipelineSpec pipeline_for(const ArtifactPaths& paths, const RunConfig& cfg) {
  PipelineSpec spec = cfg.pipeline();
  if (spec.extractor == ExtractorKind::Vision) spec.vision = load_vision(paths, cfg);
  return spec;
}

Mlp load_policy(const ArtifactPaths& paths, const ConceptSchema& schema) {
  require(paths.checkpoint(), "train-ppo");
  std::uint64_t hash = 0;
  Mlp net = load_checkpoint(paths.checkpoint(), &hash);
  if (hash != schema.hash())
    throw ContractError("checkpoint " + paths.checkpoint().string() +
                        " was trained on a different concept schema; rerun `scobot train-ppo`");
  return net;
}

std::vector<AnnotatedFrame> all_frames(const std::vector<Sequence>& seqs) {
  std::vector<AnnotatedFrame> out;
  for (const Sequence& s : seqs)
    for (const AnnotatedFrame& f : s.frames) out.push_back(f);
  return out;
}

int gen_data(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  const DatasetManifest m = generate_dataset(cfg.game(), cfg.split_sizes(), static_cast<std::uint64_t>(cfg.get_long("seed")),
                                             paths.data_dir(), static_cast<int>(cfg.get_long("data_gap")));
  out << "wrote " << paths.manifest().string() << ": " << m.sizes.train << '/' << m.sizes.val << '/' << m.sizes.test
      << " sequences of " << m.sequence_length << " frames\n";
  return kExitOk;
}

int fit_vision(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  require(paths.manifest(), "gen-data");
  const DatasetManifest m = load_manifest(paths.manifest());
  if (m.game != cfg.game()) throw ContractError("dataset was generated for another game; rerun `scobot gen-data`");
  const VisionParams params = cfg.vision_params();

  const std::vector<Frame> calibration = calibration_frames(m, paths.data_dir(), params.calibration_frames);
  // Only the first frame of each validation sequence is used.
  std::vector<AnnotatedFrame> refs;
  for (const Sequence& s : load_split(m, paths.data_dir(), Split::Val)) refs.push_back(s.frames.front());

  const VisionModel model = fit_vision_model(m.game, calibration, refs, params,
                                             static_cast<std::uint64_t>(cfg.get_long("seed")),
                                             static_cast<int>(cfg.get_long("knn")));
  fs::create_directories(paths.background().parent_path());
  save_background(model.background, paths.background());
  save_centroids(model.centroids, paths.centroids());
  out << "wrote " << paths.background().string() << " and " << paths.centroids().string() << '\n';
  for (int i = 0; i < model.centroids.k(); ++i)
    out << "  centroid " << i << ": " << *model.centroids.labels[static_cast<std::size_t>(i)] << '\n';
  return kExitOk;
}

int eval_vision(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  require(paths.manifest(), "gen-data");
  const auto model = load_vision(paths, cfg);
  const DatasetManifest m = load_manifest(paths.manifest());
  const auto frames = all_frames(load_split(m, paths.data_dir(), Split::Test));
  const ConfusionMatrix cm = evaluate_detection(m.game, *model, frames);
  const Prf p = summarize(cm);
  std::ostringstream rep;
  rep << "game " << game_name(m.game) << ", " << frames.size() << " test frames\n\n" << cm.to_text() << '\n';
  rep << "class,precision,recall,f\n";
  for (int c = 0; c < cm.size(); ++c) {
    const Prf q = summarize_class(cm, c);
    rep << cm.classes()[static_cast<std::size_t>(c)] << ',' << fmt(q.precision) << ',' << fmt(q.recall) << ','
        << fmt(q.f) << '\n';
  }
  rep << "micro," << fmt(p.precision) << ',' << fmt(p.recall) << ',' << fmt(p.f) << '\n';
  write_text(paths.vision_report(), rep.str());
  write_text(paths.confusion_csv(), cm.to_csv());
  out << rep.str();
  return kExitOk;
}

int train_ppo(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  const PipelineSpec spec = pipeline_for(paths, cfg);
  const PpoConfig pc = cfg.ppo();
  const TrainResult r = train(spec, pc, [&out](const EvalPoint& p) {
    out << "frame " << p.frame << ": evaluation reward " << fmt(p.mean) << " +- " << fmt(p.std) << '\n';
  });
  fs::create_directories(paths.checkpoint().parent_path());
  save_checkpoint(r.net, make_schema(spec.game, spec.schema).hash(), paths.checkpoint());
  write_text(paths.reward_log(), eval_log_csv(r.log));
  std::string episodes = "episode,reward\n";
  for (std::size_t i = 0; i < r.episode_rewards.size(); ++i)
    episodes += std::to_string(i) + ',' + fmt(r.episode_rewards[i]) + '\n';
  write_text(paths.episode_log(), episodes);
  out << "wrote " << paths.checkpoint().string() << " after " << r.frames << " frames\n";
  return kExitOk;
}

int distill(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out, std::ostream& err) {
  const PipelineSpec spec = pipeline_for(paths, cfg);
  const ConceptSchema schema = make_schema(spec.game, spec.schema);
  const Mlp net = load_policy(paths, schema);
  const auto seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  const double eps = cfg.get_double("distill_eps");
  const DistillationSet train_set =
      collect_distillation_set(net, spec, static_cast<std::size_t>(cfg.get_long("distill_samples")), eps, derive_seed(seed, 31));
  const DistillationSet holdout =
      collect_distillation_set(net, spec, static_cast<std::size_t>(cfg.get_long("holdout_samples")), eps, derive_seed(seed, 32));
  ExtractionReport rep;
  const RuleSet rs = extract_rules(net, train_set.x, schema, action_names(spec.game), cfg.extract_options(), &rep);
  for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
  save_rules(rs, paths.rules());
  std::ostringstream fr;
  fr << "rules," << rs.rules().size() << '\n'
     << "hidden_layer_rules," << rep.hidden_rules << '\n'
     << "input_tree_rules," << rep.input_rules << '\n'
     << "substituted_clauses," << rep.substituted << '\n'
     << "dropped_at_cap," << rep.dropped_blowup << '\n'
     << "fidelity_train," << fmt(fidelity(rs, net, train_set.x)) << '\n'
     << "fidelity_holdout," << fmt(fidelity(rs, net, holdout.x)) << '\n';
  write_text(paths.fidelity_report(), fr.str());
  out << "wrote " << paths.rules().string() << '\n' << fr.str();
  return kExitOk;
}

int eval_agent(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  const PipelineSpec spec = pipeline_for(paths, cfg);
  const ConceptSchema schema = make_schema(spec.game, spec.schema);
  const std::string sel = cfg.get("selector");
  if (sel != "neural" && sel != "rules" && sel != "both")
    throw ContractError("selector must be neural, rules or both");
  const auto seeds = evaluation_seeds(static_cast<std::uint64_t>(cfg.get_long("eval_seed")),
                                      static_cast<int>(cfg.get_long("eval_episodes")));
  std::ostringstream csv;
  csv << "selector,row,seed,reward,std\n";
  auto emit = [&](const std::string& name, const AgentScore& s) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      csv << name << ",episode," << seeds[i] << ',' << fmt(s.rewards[i]) << ",\n";
    csv << name << ",summary,," << fmt(s.mean) << ',' << fmt(s.std) << '\n';
  };
  if (sel != "rules") emit("neural", evaluate_agent(spec, load_policy(paths, schema), seeds));
  if (sel != "neural") {
    require(paths.rules(), "distill");
    emit("rules", evaluate_agent(spec, load_rules(paths.rules(), schema, action_names(spec.game)), seeds));
  }
  write_text(paths.agent_report(), csv.str());
  out << csv.str();
  return kExitOk;
}

int inspect_rules(const RunConfig& cfg, const ArtifactPaths& paths, std::ostream& out) {
  require(paths.rules(), "distill");
  const PipelineSpec spec = cfg.pipeline();
  const ConceptSchema schema = make_schema(spec.game, spec.schema);
  const RuleSet rs = load_rules(paths.rules(), schema, action_names(spec.game));
  std::istringstream features(schema.to_text());
  std::string line;
  out << "# concept features\n";
  while (std::getline(features, line)) out << "#   " << line << '\n';
  out << "# " << rs.rules().size() << " rules, highest confidence first\n" << rs.to_text();
  return kExitOk;
}

}  // namespace

int run_command(std::string_view command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ArtifactPaths paths{cfg.work_dir()};
  try {
    if (command == "gen-data") return gen_data(cfg, paths, out);
    if (command == "fit-vision") return fit_vision(cfg, paths, out);
    if (command == "eval-vision") return eval_vision(cfg, paths, out);
    if (command == "train-ppo") return train_ppo(cfg, paths, out);
    if (command == "distill") return distill(cfg, paths, out, err);
    if (command == "eval-agent") return eval_agent(cfg, paths, out);
    if (command == "inspect-rules") return inspect_rules(cfg, paths, out);
    err << "unknown command '" << command << "'\n";
    return kExitUsage;
  } catch (const MissingArtifactError& e) {
    err << "error: " << e.what() << '\n';
    return kExitMissingArtifact;
  } catch (const CorruptFileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitMissingArtifact;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace scobot
