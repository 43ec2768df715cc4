#pragma once

#include <deque>
#include <span>
#include <string>
#include <vector>

#include "scobot/vision.hpp"

namespace scobot {

struct Point2 {
  double x = 0, y = 0;
  bool operator==(const Point2&) const = default;
};

struct Track {
  int id = 0;
  std::string label;
  std::deque<Point2> history;  // newest last
  BBox last_box;
  int age = 0;  // frames since creation
  bool missed = false;

  Point2 center() const { return history.back(); }
  bool operator==(const Track&) const = default;
};

struct TrackerConfig {
  double d_max = 0.15;  // normalized gate distance
  int history = 4;      // H
};

struct TrackerState {
  std::vector<Track> tracks;  // ascending id
  int next_id = 0;
  long frame = 0;

  bool operator==(const TrackerState&) const = default;
};

/// Per-class greedy centroid matching. A detection may only take its nearest
/// track (within d_max); competing detections are served closest first and
/// losers open new tracks. Tracks left without a detection are dropped.
TrackerState update(const TrackerState& ts, std::span<const LabeledDetection> dets,
                    const TrackerConfig& cfg = {});

}  // namespace scobot
