#include "scobot/pipeline.hpp"

#include "scobot/eval.hpp"

namespace scobot {

std::string_view extractor_name(ExtractorKind k) {
  return k == ExtractorKind::GroundTruth ? "ground_truth" : "vision";
}

ExtractorKind parse_extractor(std::string_view s) {
  if (s == "ground_truth") return ExtractorKind::GroundTruth;
  if (s == "vision") return ExtractorKind::Vision;
  throw ContractError("extractor must be 'ground_truth' or 'vision', got '" + std::string(s) + "'");
}

std::vector<LabeledDetection> detect_objects(const Frame& frame, GameId game, const VisionModel& model) {
  std::vector<LabeledDetection> out;
  for (Detection& d : localize(frame, model.background, game, model.params)) {
    std::string label = classify(d.encoding, model.centroids);
    out.push_back({std::move(d), std::move(label)});
  }
  return out;
}

std::vector<LabeledDetection> extract_objects(const GameState& state, const PipelineSpec& spec) {
  if (spec.extractor == ExtractorKind::Vision) {
    if (!spec.vision) throw ContractError("vision extractor selected without a fitted vision model");
    return detect_objects(render(state), spec.game, *spec.vision);
  }
  std::vector<LabeledDetection> out;
  for (const GroundTruthObject& g : ground_truth(state)) out.push_back({Detection{g.box, 1.0, {}}, g.cls});
  return out;
}

ConceptEnv::ConceptEnv(PipelineSpec spec)
    : spec_(std::move(spec)), schema_(make_schema(spec_.game, spec_.schema)) {
  if (spec_.extractor == ExtractorKind::Vision && !spec_.vision)
    throw ContractError("vision extractor selected without a fitted vision model");
}

const ConceptVector& ConceptEnv::reset(std::uint64_t seed) {
  state_ = scobot::reset(spec_.game, seed, spec_.env);
  tracker_ = TrackerState{};
  observe();
  return obs_;
}

StepResult ConceptEnv::step(Action action) {
  const StepResult r = scobot::step(state_, action);
  if (!r.done) observe();
  return r;
}

void ConceptEnv::observe() {
  const auto dets = extract_objects(state_, spec_);
  tracker_ = update(tracker_, dets, spec_.tracker);
  obs_ = compute_concepts(assign_slots(tracker_.tracks, schema_.slots()), schema_);
}

VisionModel fit_vision_model(GameId game, std::span<const Frame> calibration,
                             std::span<const AnnotatedFrame> references, const VisionParams& params,
                             std::uint64_t seed, int k_nn) {
  if (calibration.empty()) throw ContractError("fit_vision_model: no calibration frames");
  VisionModel model;
  model.params = params;
  const std::size_t n_cal = std::min(calibration.size(), static_cast<std::size_t>(params.calibration_frames));
  model.background = build_background(calibration.first(n_cal));

  std::vector<std::vector<double>> encodings;
  std::vector<LabeledEncoding> refs;
  for (const AnnotatedFrame& af : references) {
    std::vector<LabeledDetection> dets;
    for (Detection& d : localize(af.frame, model.background, game, params)) dets.push_back({std::move(d), ""});
    for (const LabeledDetection& d : dets) encodings.push_back(d.det.encoding);
    const MatchResult m = match(dets, af.objects);
    for (const auto& [di, gi] : m.pairs)
      refs.push_back({dets[static_cast<std::size_t>(di)].det.encoding, af.objects[static_cast<std::size_t>(gi)].cls});
  }
  const int k = static_cast<int>(object_classes(game).size());
  if (static_cast<int>(encodings.size()) < k)
    throw ContractError("fit_vision_model: fewer detections than object classes");
  KMeansResult km = fit_kmeans(encodings, k, seed);
  model.centroids = label_centroids(std::move(km.centroids), refs, k_nn);
  return model;
}

}  // namespace scobot
