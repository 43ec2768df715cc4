#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "scobot/classify.hpp"
#include "scobot/env.hpp"
#include "scobot/relations.hpp"
#include "scobot/track.hpp"
#include "scobot/vision.hpp"

namespace scobot {

enum class ExtractorKind { GroundTruth, Vision };

std::string_view extractor_name(ExtractorKind k);
ExtractorKind parse_extractor(std::string_view s);  // "ground_truth" | "vision"

/// Fitted localizer + classifier.
struct VisionModel {
  BackgroundModel background;
  CentroidSet centroids;
  VisionParams params;
};

struct PipelineSpec {
  GameId game = GameId::Paddles;
  ExtractorKind extractor = ExtractorKind::GroundTruth;
  SchemaKind schema = SchemaKind::Pruned;
  TrackerConfig tracker;
  EnvOptions env;
  std::shared_ptr<const VisionModel> vision;  // required for ExtractorKind::Vision
};

/// Labeled objects of one frame, from annotations or from pixels.
std::vector<LabeledDetection> extract_objects(const GameState& state, const PipelineSpec& spec);

/// A game seen through the extractor, tracker and relation extractor:
/// observations are concept vectors.
class ConceptEnv {
 public:
  explicit ConceptEnv(PipelineSpec spec);

  const ConceptVector& reset(std::uint64_t seed);
  StepResult step(Action action);

  const ConceptVector& observation() const { return obs_; }
  const GameState& state() const { return state_; }
  const ConceptSchema& schema() const { return schema_; }
  const PipelineSpec& spec() const { return spec_; }
  int action_count() const { return scobot::action_count(spec_.game); }
  bool done() const { return state_.done; }

 private:
  void observe();

  PipelineSpec spec_;
  ConceptSchema schema_;
  GameState state_;
  TrackerState tracker_;
  ConceptVector obs_;
};

/// One annotated frame used for fitting or evaluating the vision stage.
struct AnnotatedFrame {
  Frame frame;
  std::vector<GroundTruthObject> objects;
};

/// Background from the first `params.calibration_frames` calibration frames;
/// k-means (k = number of classes) and k-NN naming on the reference frames,
/// whose detections are named after the ground truth they match.
VisionModel fit_vision_model(GameId game, std::span<const Frame> calibration,
                             std::span<const AnnotatedFrame> references, const VisionParams& params,
                             std::uint64_t seed, int k_nn = 24);

/// Localized and classified detections of one frame.
std::vector<LabeledDetection> detect_objects(const Frame& frame, GameId game, const VisionModel& model);

}  // namespace scobot
