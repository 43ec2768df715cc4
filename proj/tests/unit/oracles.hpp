#pragma once

// Brute-force references shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <utility>
#include <vector>

#include "scobot/common.hpp"
#include "scobot/env.hpp"
#include "scobot/eval.hpp"
#include "scobot/vision.hpp"

namespace oracle {

struct Component {
  int x0, y0, x1, y1;  // inclusive pixel bounds
  int area;
};

/// Breadth-first 8-connected flood fill, components of at least min_area
/// pixels, ordered by (y0, x0).
inline std::vector<Component> flood_fill(const scobot::Mask& m, int min_area) {
  std::vector<int> seen(m.bits.size(), 0);
  std::vector<Component> out;
  for (int sy = 0; sy < m.height; ++sy)
    for (int sx = 0; sx < m.width; ++sx) {
      const std::size_t s = static_cast<std::size_t>(sy) * m.width + sx;
      if (!m.bits[s] || seen[s]) continue;
      Component c{sx, sy, sx, sy, 0};
      std::vector<std::pair<int, int>> queue{{sx, sy}};
      seen[s] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto [x, y] = queue[head];
        ++c.area;
        c.x0 = std::min(c.x0, x);
        c.y0 = std::min(c.y0, y);
        c.x1 = std::max(c.x1, x);
        c.y1 = std::max(c.y1, y);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * m.width + nx;
            if (m.bits[n] && !seen[n]) {
              seen[n] = 1;
              queue.push_back({nx, ny});
            }
          }
      }
      if (c.area >= min_area) out.push_back(c);
    }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    return std::tie(a.y0, a.x0) < std::tie(b.y0, b.x0);
  });
  return out;
}

/// True when detect_blobs output equals the flood-fill components exactly.
inline bool blobs_agree(const std::vector<scobot::Detection>& dets, const std::vector<Component>& comps,
                        int width, int height, int min_area) {
  if (dets.size() != comps.size()) return false;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto& c = comps[i];
    const scobot::BBox want{static_cast<double>(c.x0) / width, static_cast<double>(c.y0) / height,
                            static_cast<double>(c.x1 + 1) / width, static_cast<double>(c.y1 + 1) / height};
    if (!(dets[i].box == want)) return false;
    if (dets[i].confidence != std::min(1.0, c.area / (2.0 * min_area))) return false;
  }
  return true;
}

inline scobot::Mask random_mask(scobot::Rng& r, int max_side = 32) {
  scobot::Mask m(1 + r.below(max_side), 1 + r.below(max_side));
  const double density = r.uniform(0.05, 0.6);
  for (auto& b : m.bits) b = r.bernoulli(density) ? 1 : 0;
  return m;
}

/// Region predicates written out from the filter table.
inline bool brawl_keeps(const scobot::BBox& b) { return b.y_min > 0.148 && b.y_max < 0.859; }
inline bool paddles_keeps(const scobot::BBox& b) { return b.y_max > 0.164 && b.y_min > 0.031; }

/// Boxes whose edges sit on, just below and just above each boundary value.
inline std::vector<scobot::BBox> boundary_boxes(std::vector<double> edges) {
  std::vector<double> ys = {0.0, 0.5, 1.0};
  for (double e : edges)
    for (double d : {0.0, 1e-12, 1e-9, 1e-6, 1e-3})
      for (double s : {-1.0, 1.0}) ys.push_back(std::clamp(e + s * d, 0.0, 1.0));
  for (double e : edges) {
    ys.push_back(std::nextafter(e, 0.0));
    ys.push_back(std::nextafter(e, 1.0));
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<scobot::BBox> out;
  for (double lo : ys)
    for (double hi : ys)
      if (lo < hi) out.push_back({0.4, lo, 0.6, hi});
  return out;
}

/// Exhaustive matcher: enumerate every partial one-to-one assignment with
/// admissible scores and keep the one that is lexicographically best when
/// detections are ranked by (confidence desc, index asc) and each compares
/// (score desc, ground-truth index asc), unmatched last.
inline std::vector<std::pair<int, int>> exhaustive_match(const std::vector<scobot::LabeledDetection>& dets,
                                                         const std::vector<scobot::GroundTruthObject>& gts,
                                                         double threshold) {
  const int nd = static_cast<int>(dets.size()), ng = static_cast<int>(gts.size());
  std::vector<int> rank(static_cast<std::size_t>(nd));
  for (int i = 0; i < nd; ++i) rank[static_cast<std::size_t>(i)] = i;
  std::sort(rank.begin(), rank.end(), [&](int a, int b) {
    const double ca = dets[static_cast<std::size_t>(a)].det.confidence, cb = dets[static_cast<std::size_t>(b)].det.confidence;
    return ca != cb ? ca > cb : a < b;
  });
  auto score = [&](int d, int g) {
    const auto &p = dets[static_cast<std::size_t>(d)].det.box, &q = gts[static_cast<std::size_t>(g)].box;
    const double diag = std::hypot(q.width(), q.height());
    return std::max(0.0, 1.0 - std::hypot(p.cx() - q.cx(), p.cy() - q.cy()) / diag);
  };

  std::vector<int> assign(static_cast<std::size_t>(nd), -1), best;
  std::vector<bool> used(static_cast<std::size_t>(ng), false);
  // key: per ranked detection (score or -1, -gt index)
  auto key_of = [&](const std::vector<int>& a) {
    std::vector<std::pair<double, int>> k;
    for (int d : rank) {
      const int g = a[static_cast<std::size_t>(d)];
      k.push_back(g < 0 ? std::make_pair(-1.0, 0) : std::make_pair(score(d, g), -g));
    }
    return k;
  };
  std::vector<std::pair<double, int>> best_key;
  std::function<void(int)> rec = [&](int d) {
    if (d == nd) {
      auto k = key_of(assign);
      if (best.empty() || k > best_key) {
        best = assign;
        best_key = std::move(k);
      }
      return;
    }
    rec(d + 1);  // leave d unmatched
    for (int g = 0; g < ng; ++g) {
      if (used[static_cast<std::size_t>(g)] || score(d, g) < threshold) continue;
      used[static_cast<std::size_t>(g)] = true;
      assign[static_cast<std::size_t>(d)] = g;
      rec(d + 1);
      assign[static_cast<std::size_t>(d)] = -1;
      used[static_cast<std::size_t>(g)] = false;
    }
  };
  rec(0);
  std::vector<std::pair<int, int>> pairs;
  for (int d : rank)
    if (best[static_cast<std::size_t>(d)] >= 0) pairs.emplace_back(d, best[static_cast<std::size_t>(d)]);
  return pairs;
}

/// Small random instance on a coarse grid so that ties in confidence and
/// score are common.
inline void random_instance(scobot::Rng& r, std::vector<scobot::LabeledDetection>& dets,
                            std::vector<scobot::GroundTruthObject>& gts) {
  dets.clear();
  gts.clear();
  const int nd = r.below(5), ng = r.below(5);
  auto box = [&] {
    const double x = r.below(8) / 16.0, y = r.below(8) / 16.0;
    const double w = (1 + r.below(3)) / 16.0, h = (1 + r.below(3)) / 16.0;
    return scobot::BBox{x, y, x + w, y + h};
  };
  for (int i = 0; i < nd; ++i) dets.push_back({{box(), r.below(3) / 2.0, {}}, "player"});
  for (int i = 0; i < ng; ++i) gts.push_back({"player", box()});
}

/// Micro scores recomputed cell by cell from the matrix layout.
inline scobot::Prf spreadsheet_prf(const scobot::ConfusionMatrix& cm) {
  const int n = cm.size();
  long trace = 0, all_cells = 0, nd_column = 0, nao_row = 0;
  for (int r = 0; r <= n; ++r)
    for (int c = 0; c <= n; ++c) {
      const long v = cm.at(r, c);
      all_cells += v;
      if (r == c && r < n) trace += v;
      if (c == n) nd_column += v;
      if (r == n) nao_row += v;
    }
  // Drop the not_detected column for precision, the not_an_object row for recall.
  const long detected = all_cells - nd_column;
  const long truths = all_cells - nao_row;
  scobot::Prf p;
  p.precision = detected ? static_cast<double>(trace) / static_cast<double>(detected) : 0.0;
  p.recall = truths ? static_cast<double>(trace) / static_cast<double>(truths) : 0.0;
  p.f = p.precision + p.recall > 0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

inline scobot::ConfusionMatrix random_confusion(scobot::Rng& r) {
  std::vector<std::string> classes;
  const int n = 1 + r.below(5);
  for (int i = 0; i < n; ++i) classes.push_back("c" + std::to_string(i));
  scobot::ConfusionMatrix cm(classes);
  for (int row = 0; row <= n; ++row)
    for (int col = 0; col <= n; ++col)
      if (!(row == n && col == n)) cm.add(row, col, r.below(50));
  return cm;
}

}  // namespace oracle
