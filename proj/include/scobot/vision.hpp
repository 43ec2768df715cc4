#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "scobot/common.hpp"
#include "scobot/env.hpp"

namespace scobot {

/// Length of the handcrafted appearance encoding returned by encode_patch.
inline constexpr int kEncodingDim = 11;

struct BackgroundModel {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  bool operator==(const BackgroundModel&) const = default;
};

struct Detection {
  BBox box;
  double confidence = 0.0;
  std::vector<double> encoding;

  bool operator==(const Detection&) const = default;
};

struct LabeledDetection {
  Detection det;
  std::string label;

  bool operator==(const LabeledDetection&) const = default;
};

struct VisionParams {
  double tau = 0.1;       // fraction of the maximum channel distance
  int min_area = 4;       // pixels
  int calibration_frames = 100;
};

/// Per-pixel channelwise mode of the frames.
BackgroundModel build_background(std::span<const Frame> frames);

void save_background(const BackgroundModel& bg, const std::filesystem::path& path);
BackgroundModel load_background(const std::filesystem::path& path);

/// Foreground iff the channelwise L-infinity distance exceeds tau * 255.
Mask foreground_mask(const Frame& frame, const BackgroundModel& bg, double tau);

/// 8-connected components of at least `min_area` pixels, sorted by (y_min, x_min).
std::vector<Detection> detect_blobs(const Mask& mask, const Frame& frame, int min_area);

/// Mean RGB, RGB standard deviation, 3-bin hue histogram, width and height;
/// every entry lies in [0, 1].
std::vector<double> encode_patch(const Frame& frame, const BBox& box);

/// Keeps detections inside the region where moving objects appear.
struct RegionFilterRule {
  GameId game = GameId::Slalom;
  bool keep(const BBox& b) const;
};

std::vector<Detection> region_filter(std::span<const Detection> dets, const RegionFilterRule& rule);

/// mask -> blobs -> region filter, the localization half of the extractor.
std::vector<Detection> localize(const Frame& frame, const BackgroundModel& bg, GameId game,
                                const VisionParams& params);

}  // namespace scobot
