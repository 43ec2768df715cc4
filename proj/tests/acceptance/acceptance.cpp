// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_pipeline.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "scobot/data.hpp"
#include "scobot/eval.hpp"
#include "scobot/ppo.hpp"
#include "scobot/rules.hpp"
#include "teachers.hpp"

using namespace scobot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Default-size dataset kept in memory: only what the vision stage reads.
struct VisionData {
  std::vector<Frame> calibration;
  std::vector<AnnotatedFrame> references;
  std::vector<AnnotatedFrame> test;
};

VisionData default_vision_data(GameId game, std::uint64_t seed) {
  const SplitSizes sizes;
  const VisionParams params;
  const int n = sizes.train, take = std::min(n, params.calibration_frames);
  std::set<int> picks;
  for (int i = 0; i < take; ++i) picks.insert(static_cast<int>(static_cast<long>(i) * n / take));
  VisionData d;
  generate_sequences(game, sizes, seed, [&](Split s, int index, const Sequence& seq) {
    if (s == Split::Train && picks.count(index)) d.calibration.push_back(seq.frames.front().frame);
    if (s == Split::Val) d.references.push_back(seq.frames.front());
    if (s == Split::Test)
      for (const auto& f : seq.frames) d.test.push_back(f);
  });
  return d;
}

class Context {
 public:
  explicit Context(fs::path work) : work_(std::move(work)) {}

  const fs::path& work() const { return work_; }

  const VisionData& data(GameId g) {
    auto& slot = data_[static_cast<int>(g)];
    if (!slot) slot = std::make_unique<VisionData>(default_vision_data(g, 0));
    return *slot;
  }

  std::shared_ptr<const VisionModel> model(GameId g) {
    auto& slot = models_[static_cast<int>(g)];
    if (!slot) {
      const VisionData& d = data(g);
      slot = std::make_shared<VisionModel>(fit_vision_model(g, d.calibration, d.references, VisionParams{}, 0));
    }
    return slot;
  }

  // Ground-truth extractor, pruned schema, two hidden layers, 1M frames.
  const Mlp& paddles_teacher() {
    if (!teacher_) {
      PpoConfig cfg;
      cfg.envs = 8;
      cfg.total_frames = 1'000'000;
      teacher_ = std::make_unique<Mlp>(train(PipelineSpec{}, cfg).net);
    }
    return *teacher_;
  }

  void drop_vision_data() {
    for (auto& d : data_) d.reset();
  }

 private:
  fs::path work_;
  std::unique_ptr<VisionData> data_[3];
  std::shared_ptr<const VisionModel> models_[3];
  std::unique_ptr<Mlp> teacher_;
};

const std::vector<std::uint64_t>& eval_seeds() {
  static const std::vector<std::uint64_t> s = evaluation_seeds(1000, 5);
  return s;
}

// ---------------------------------------------------------------------------

Outcome vision_oracles(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng r(101);
  int blob_bad = 0, match_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Mask m = oracle::random_mask(r);
    const Frame f(m.width, m.height, {40, 80, 120});
    const int min_area = 1 + r.below(6);
    if (!oracle::blobs_agree(detect_blobs(m, f, min_area), oracle::flood_fill(m, min_area), m.width, m.height,
                             min_area))
      ++blob_bad;
  }
  std::vector<LabeledDetection> dets;
  std::vector<GroundTruthObject> gts;
  for (int i = 0; i < 1000; ++i) {
    oracle::random_instance(r, dets, gts);
    auto got = match(dets, gts).pairs, want = oracle::exhaustive_match(dets, gts, kMatchThreshold);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) ++match_bad;
  }
  const double secs = seconds_since(t0);
  return {blob_bad == 0 && match_bad == 0 && secs < 10.0,
          "blob mismatches " + std::to_string(blob_bad) + "/1000, match mismatches " + std::to_string(match_bad) +
              "/1000, " + num(secs, 2) + " s (limit 10 s)"};
}

Outcome region_filters(Context&) {
  long total = 0, agree = 0;
  auto run = [&](GameId g, const std::vector<double>& edges, bool (*keeps)(const BBox&)) {
    const RegionFilterRule rule{g};
    std::vector<Detection> dets;
    for (const BBox& b : oracle::boundary_boxes(edges)) {
      ++total;
      agree += rule.keep(b) == keeps(b);
      dets.push_back({b, 1.0, {}});
    }
    // The list filter must keep exactly the predicate's boxes, in order.
    std::vector<Detection> want;
    for (const Detection& d : dets)
      if (keeps(d.box)) want.push_back(d);
    ++total;
    agree += region_filter(dets, rule) == want;
  };
  run(GameId::Brawl, {0.148, 0.859}, oracle::brawl_keeps);
  run(GameId::Paddles, {0.164, 0.031}, oracle::paddles_keeps);
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " boundary checks agree"};
}

Outcome detection_quality(Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  double f[3];
  for (GameId g : {GameId::Paddles, GameId::Brawl, GameId::Slalom}) {
    const auto model = ctx.model(g);
    f[static_cast<int>(g)] = summarize(evaluate_detection(g, *model, ctx.data(g).test)).f;
  }
  ctx.drop_vision_data();
  const double fp = f[static_cast<int>(GameId::Paddles)], fb = f[static_cast<int>(GameId::Brawl)],
               fs_ = f[static_cast<int>(GameId::Slalom)];
  const double secs = seconds_since(t0);
  return {fp >= 0.95 && fb >= 0.95 && fs_ < std::min(fp, fb) && secs < 300.0,
          "F paddles " + num(fp, 4) + ", brawl " + num(fb, 4) + ", slalom " + num(fs_, 4) + ", " + num(secs, 1) +
              " s (limit 300 s)"};
}

Outcome gradients(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng r(404);
  const auto specs = gradcheck::component_specs();
  double worst[3] = {0, 0, 0};
  for (int layers : {1, 2})
    for (int b = 0; b < 100; ++b) {
      const int inputs = 3 + r.below(7), actions = 2 + r.below(5);
      const Mlp net = gradcheck::random_net({inputs, layers, kHiddenWidth, actions}, r);
      const auto batch = gradcheck::random_batch(net, 1 + r.below(8), r);
      const LossSpec& spec = specs[static_cast<std::size_t>(b) % specs.size()];
      worst[layers] = std::max(worst[layers], gradcheck::max_relative_error(net, batch, spec));
    }
  const double secs = seconds_since(t0);
  return {worst[1] <= 1e-4 && worst[2] <= 1e-4 && secs < 60.0,
          "max relative error 1 layer " + num(worst[1] * 1e6, 3) + "e-6, 2 layers " + num(worst[2] * 1e6, 3) +
              "e-6 (limit 1e-4), " + num(secs, 1) + " s (limit 60 s)"};
}

Outcome learning_signal(Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineSpec spec;
  const AgentScore trained = evaluate_agent(spec, ctx.paddles_teacher(), eval_seeds());
  Rng rng(505);
  const AgentScore random =
      evaluate_agent(spec, [&](const ConceptVector&, const GameState&) { return rng.below(3); }, eval_seeds());
  const double secs = seconds_since(t0);
  return {trained.mean > 10.0 && random.mean < -15.0 && secs < 1800.0,
          "PPO after 1M frames " + num(trained.mean, 1) + " +- " + num(trained.std, 1) + " (need > 10), random " +
              num(random.mean, 1) + " (need < -15), " + num(secs, 0) + " s"};
}

Outcome extractor_ordering(Context& ctx) {
  PipelineSpec gt;
  gt.game = GameId::Brawl;
  PipelineSpec vision = gt;
  vision.extractor = ExtractorKind::Vision;
  vision.vision = ctx.model(GameId::Brawl);
  ctx.drop_vision_data();

  double sum_gt = 0, sum_vision = 0;
  std::string per_seed;
  for (std::uint64_t seed : {0, 1, 2}) {
    PpoConfig cfg;
    cfg.envs = 8;
    cfg.total_frames = 1'000'000;
    cfg.seed = seed;
    const double a = evaluate_agent(gt, train(gt, cfg).net, eval_seeds()).mean;
    const double b = evaluate_agent(vision, train(vision, cfg).net, eval_seeds()).mean;
    sum_gt += a;
    sum_vision += b;
    per_seed += (per_seed.empty() ? "" : ", ") + num(a, 1) + "/" + num(b, 1);
  }
  const double mg = sum_gt / 3, mv = sum_vision / 3;
  return {mg >= mv, "Brawl mean reward ground truth " + num(mg, 2) + " vs vision " + num(mv, 2) +
                        " (per seed gt/vision: " + per_seed + ")"};
}

Outcome distillation(Context& ctx) {
  Rng r(707);
  const ConceptSchema schema = pruned_schema(GameId::Paddles);
  const auto& actions = action_names(GameId::Paddles);

  const Mlp threshold = teachers::threshold_net(schema.size());
  const std::vector<double> x = teachers::uniform_rows(r, 5000, schema.size());
  const double exact = fidelity(extract_rules(threshold, x, schema, actions), threshold, x);

  // Same protocol as the distill command with seed 0.
  const PipelineSpec spec;
  const Mlp& net = ctx.paddles_teacher();
  const DistillationSet train_set = collect_distillation_set(net, spec, 50'000, 0.25, derive_seed(0, 31));
  const DistillationSet holdout = collect_distillation_set(net, spec, 5'000, 0.25, derive_seed(0, 32));
  const RuleSet rs = extract_rules(net, train_set.x, schema, actions);
  const double held = fidelity(rs, net, holdout.x);
  const double neural = evaluate_agent(spec, net, eval_seeds()).mean;
  const double rules = evaluate_agent(spec, rs, eval_seeds()).mean;
  return {exact == 1.0 && held >= 0.85 && std::abs(neural - rules) <= 5.0,
          "threshold teacher fidelity " + num(exact, 4) + "; Paddles held-out fidelity " + num(held, 4) + " (" +
              std::to_string(rs.rules().size()) + " rules), reward neural " + num(neural, 1) + " vs rules " +
              num(rules, 1)};
}

Outcome metric_arithmetic(Context&) {
  Rng r(808);
  int exact = 0;
  for (int i = 0; i < 50; ++i) {
    const ConfusionMatrix cm = oracle::random_confusion(r);
    const Prf a = summarize(cm), b = oracle::spreadsheet_prf(cm);
    exact += a.precision == b.precision && a.recall == b.recall && a.f == b.f;
  }
  ConfusionMatrix hand({"player", "ball"});
  hand.add(0, 0, 5);
  hand.add(1, 1, 3);
  hand.add(0, 1, 1);
  hand.add(hand.not_an_object(), 1, 1);
  hand.add(0, hand.not_detected(), 1);
  const Prf h = summarize(hand);
  const bool hand_ok = std::abs(h.precision - 0.8) <= 1e-12 && std::abs(h.recall - 0.8) <= 1e-12 &&
                       std::abs(h.f - 0.8) <= 1e-12;
  return {exact == 50 && hand_ok, std::to_string(exact) + "/50 matrices exact; hand example (" + num(h.precision, 4) +
                                      ", " + num(h.recall, 4) + ", " + num(h.f, 4) + ")"};
}

Outcome determinism(Context& ctx) {
  const fs::path root = ctx.work() / "cli";
  fs::remove_all(root);
  std::string failures;
  auto pipeline = [&](const fs::path& cfg, const std::vector<std::string>& stages, const std::string& extra) {
    for (const std::string& stage : stages) {
      const cli::Run run = cli::run(SCOBOT_CLI, cfg, stage, extra);
      if (run.code != 0) failures += " " + stage + " exited " + std::to_string(run.code) + ";";
    }
  };
  std::vector<std::map<std::string, std::string>> snaps[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path cfg = root / ("run" + std::to_string(k) + ".cfg");
    cli::write_file(cfg, cli::small_config(root / ("run" + std::to_string(k))));
    pipeline(cfg, cli::stages(), "");
    snaps[k].push_back(cli::snapshot(root / ("run" + std::to_string(k))));
    // Policy stages again through the vision extractor.
    pipeline(cfg, {"train-ppo", "distill", "eval-agent"}, "--set extractor=vision");
    snaps[k].push_back(cli::snapshot(root / ("run" + std::to_string(k))));
  }
  long files = 0, differing = 0;
  for (std::size_t p = 0; p < snaps[0].size(); ++p) {
    const auto &a = snaps[0][p], &b = snaps[1][p];
    if (a.size() != b.size()) ++differing;
    for (const auto& [name, bytes] : a) {
      ++files;
      auto it = b.find(name);
      if (it == b.end() || it->second != bytes) {
        ++differing;
        failures += " " + name + " differs;";
      }
    }
  }
  fs::remove_all(root);
  return {failures.empty() && differing == 0,
          std::to_string(files) + " artifacts compared over two passes, " + std::to_string(differing) + " differ" +
              (failures.empty() ? "" : ":" + failures.substr(0, 200))};
}

Outcome dataset_contract(Context& ctx) {
  const fs::path dir = ctx.work() / "dataset";
  fs::remove_all(dir);
  generate_dataset(GameId::Paddles, SplitSizes{}, 0, dir);
  const DatasetManifest m = load_manifest(dir / "manifest.txt");
  std::string bad;
  if (!(m.sizes == SplitSizes{2048, 128, 128})) bad += " split sizes;";
  if (m.sequence_length != 4) bad += " sequence length;";
  if (m.gap < 16) bad += " gap;";
  if (m.frame_width != 128 || m.frame_height != 128) bad += " frame size;";
  long min_boundary = 1L << 40, records = 0;
  const auto frame_bytes = static_cast<std::uintmax_t>(m.frame_width) * m.frame_height * 3;
  for (Split s : kSplits) {
    if (static_cast<int>(m.split(s).size()) != m.sizes.of(s)) bad += " sequence count;";
    long last = -1;
    for (const auto& seq : m.split(s)) {
      if (seq.size() != 4) bad += " frames per sequence;";
      for (std::size_t f = 1; f < seq.size(); ++f)
        if (seq[f].timestep - seq[f - 1].timestep != 1) bad += " in-sequence step;";
      if (last >= 0) min_boundary = std::min(min_boundary, seq.front().timestep - last);
      last = seq.back().timestep;
      for (const FrameRecord& rec : seq) {
        ++records;
        if (fs::file_size(dir / rec.frame_file) != frame_bytes) bad += " frame file size;";
      }
    }
  }
  if (min_boundary < 17) bad += " sequence gap;";
  long on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    on_disk += e.is_regular_file() && e.path().extension() == ".rgb";
  if (on_disk != records) bad += " file count;";
  const auto sample = read_sequence(m, dir, Split::Test, 0);
  if (sample.frames.front().frame.width != 128) bad += " loaded frame;";
  fs::remove_all(dir);
  return {bad.empty(), "splits " + std::to_string(m.sizes.train) + "/" + std::to_string(m.sizes.val) + "/" +
                           std::to_string(m.sizes.test) + ", " + std::to_string(records) +
                           " frames of 128x128, smallest boundary step " + std::to_string(min_boundary) +
                           (bad.empty() ? "" : ", violations:" + bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria = {
      {"vision oracle suite", vision_oracles},
      {"region filters", region_filters},
      {"detection quality", detection_quality},
      {"gradient correctness", gradients},
      {"learning signal", learning_signal},
      {"extractor ordering", extractor_ordering},
      {"distillation fidelity", distillation},
      {"metric arithmetic", metric_arithmetic},
      {"determinism", determinism},
      {"dataset contract", dataset_contract},
  };

  fs::create_directories(work);
  Context ctx(work);
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << number << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << "  [" << num(seconds_since(t0), 1) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
