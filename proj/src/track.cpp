#include "scobot/track.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace scobot {

TrackerState update(const TrackerState& ts, std::span<const LabeledDetection> dets,
                    const TrackerConfig& cfg) {
  const int nd = static_cast<int>(dets.size());
  const int nt = static_cast<int>(ts.tracks.size());
  std::vector<int> det_track(nd, -1);

  // Candidate pairs: each detection against its nearest same-class track.
  std::vector<std::tuple<double, int, int>> pairs;  // (distance, track, detection)
  for (int d = 0; d < nd; ++d) {
    const double cx = dets[d].det.box.cx(), cy = dets[d].det.box.cy();
    int best = -1;
    double best_dist = 0.0;
    for (int t = 0; t < nt; ++t) {
      const Track& tr = ts.tracks[t];
      if (tr.label != dets[d].label) continue;
      const double dist = std::hypot(cx - tr.center().x, cy - tr.center().y);
      if (best < 0 || dist < best_dist) {
        best = t;
        best_dist = dist;
      }
    }
    if (best >= 0 && best_dist <= cfg.d_max) pairs.emplace_back(best_dist, best, d);
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<bool> track_taken(nt, false);
  for (const auto& [dist, t, d] : pairs) {
    if (track_taken[t]) continue;
    track_taken[t] = true;
    det_track[d] = t;
  }

  TrackerState next;
  next.frame = ts.frame + 1;
  next.next_id = ts.next_id;
  for (int d = 0; d < nd; ++d) {
    const Point2 c{dets[d].det.box.cx(), dets[d].det.box.cy()};
    Track tr;
    if (det_track[d] >= 0) {
      tr = ts.tracks[det_track[d]];
      tr.history.push_back(c);
      while (static_cast<int>(tr.history.size()) > cfg.history) tr.history.pop_front();
      ++tr.age;
    } else {
      tr.id = next.next_id++;
      tr.label = dets[d].label;
      tr.history.push_back(c);
      tr.age = 0;
    }
    tr.last_box = dets[d].det.box;
    tr.missed = false;
    next.tracks.push_back(std::move(tr));
  }
  std::sort(next.tracks.begin(), next.tracks.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  return next;
}

}  // namespace scobot
