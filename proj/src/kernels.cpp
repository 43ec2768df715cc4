#include "scobot/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace scobot::kernels {

namespace {

void check_stack(std::span<const Frame* const> frames) {
  if (frames.empty()) throw ContractError("background_mode: empty frame stack");
  for (const Frame* f : frames)
    if (f->width != frames[0]->width || f->height != frames[0]->height)
      throw ContractError("background_mode: frame dimensions differ");
}

std::uint8_t mode_at(std::span<const Frame* const> frames, std::size_t byte) {
  std::array<int, 256> counts{};
  for (const Frame* f : frames) ++counts[f->rgb[byte]];
  int best = 0;
  for (int v = 1; v < 256; ++v)
    if (counts[static_cast<std::size_t>(v)] > counts[static_cast<std::size_t>(best)]) best = v;
  return static_cast<std::uint8_t>(best);
}

inline bool is_foreground(const std::uint8_t* px, const std::uint8_t* bg, double threshold) {
  int d = 0;
  for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(int(px[c]) - int(bg[c])));
  return d > threshold;
}

inline int nearest_row(const double* p, std::span<const double> centroids, int dim,
                       double& best_d) {
  const int k = static_cast<int>(centroids.size()) / dim;
  int best = 0;
  best_d = 0.0;
  for (int j = 0; j < k; ++j) {
    const double* c = centroids.data() + static_cast<std::size_t>(j) * dim;
    double d = 0.0;
    for (int t = 0; t < dim; ++t) {
      const double e = p[t] - c[t];
      d += e * e;
    }
    if (j == 0 || d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double split_info(long nl, long nr) {
  const double n = static_cast<double>(nl + nr);
  const double pl = nl / n, pr = nr / n;
  return -(pl * std::log2(pl) + pr * std::log2(pr));
}

// t[c] = c * log2(c), so that n * entropy = t[n] - sum of t[count].
std::vector<double> xlogx_table(std::size_t n) {
  std::vector<double> t(n + 1, 0.0);
  for (std::size_t c = 2; c <= n; ++c) t[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));
  return t;
}

FeatureSplit split_feature(std::span<const double> features, int dim, std::span<const int> labels,
                           int classes, std::span<const int> rows, int feature, std::span<const double> xlogx) {
  FeatureSplit best;
  best.feature = feature;
  const long n = static_cast<long>(rows.size());
  if (n < 2) return best;

  std::vector<std::pair<double, int>> col(rows.size());
  std::vector<long> total(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    col[i] = {features[static_cast<std::size_t>(r) * dim + feature], labels[static_cast<std::size_t>(r)]};
    ++total[static_cast<std::size_t>(col[i].second)];
  }
  double parent_sum = 0.0;
  for (long c : total) parent_sum += xlogx[static_cast<std::size_t>(c)];
  const double parent = (xlogx[static_cast<std::size_t>(n)] - parent_sum) / static_cast<double>(n);
  if (parent <= 1e-12) return best;
  std::sort(col.begin(), col.end());

  std::vector<long> left(static_cast<std::size_t>(classes), 0), right = total;
  double left_sum = 0.0, right_sum = parent_sum;
  for (long i = 0; i + 1 < n; ++i) {
    const auto y = static_cast<std::size_t>(col[static_cast<std::size_t>(i)].second);
    left_sum += xlogx[static_cast<std::size_t>(left[y] + 1)] - xlogx[static_cast<std::size_t>(left[y])];
    right_sum += xlogx[static_cast<std::size_t>(right[y] - 1)] - xlogx[static_cast<std::size_t>(right[y])];
    ++left[y];
    --right[y];
    const double lo = col[static_cast<std::size_t>(i)].first;
    const double hi = col[static_cast<std::size_t>(i + 1)].first;
    if (!(lo < hi)) continue;
    const long nl = i + 1, nr = n - nl;
    const double h = (xlogx[static_cast<std::size_t>(nl)] - left_sum + xlogx[static_cast<std::size_t>(nr)] - right_sum) /
                     static_cast<double>(n);
    const double gain = parent - h;
    if (gain > best.gain + 1e-12) {
      best.gain = gain;
      best.gain_ratio = gain / split_info(nl, nr);
      best.lower = lo;
      best.upper = hi;
    }
  }
  return best;
}

SupportCount support_one(std::span<const double> features, int dim, std::span<const int> labels,
                         const std::vector<PremiseTerm>& premise, int conclusion) {
  SupportCount sc;
  const std::size_t n = labels.size();
  for (std::size_t r = 0; r < n; ++r) {
    if (!satisfies(features.subspan(r * dim, static_cast<std::size_t>(dim)), premise)) continue;
    ++sc.matched;
    if (labels[r] == conclusion) ++sc.agreed;
  }
  return sc;
}

}  // namespace

double entropy_bits(std::span<const long> counts, long n) {
  if (n <= 0) return 0.0;
  double h = 0.0;
  for (long c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

// ---------------------------------------------------------------------------
// OpenMP implementations
// ---------------------------------------------------------------------------

void background_mode(std::span<const Frame* const> frames, std::vector<std::uint8_t>& out) {
  check_stack(frames);
  const long bytes = static_cast<long>(frames[0]->rgb.size());
  out.assign(static_cast<std::size_t>(bytes), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < bytes; ++i) out[static_cast<std::size_t>(i)] = mode_at(frames, static_cast<std::size_t>(i));
}

void foreground_mask(const Frame& frame, std::span<const std::uint8_t> background,
                     double threshold, Mask& mask) {
  mask = Mask(frame.width, frame.height);
  const long pixels = static_cast<long>(frame.width) * frame.height;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < pixels; ++i)
    mask.bits[static_cast<std::size_t>(i)] =
        is_foreground(&frame.rgb[3 * static_cast<std::size_t>(i)],
                      &background[3 * static_cast<std::size_t>(i)], threshold);
}

void nearest_centroid(std::span<const double> points, std::span<const double> centroids,
                      int dim, std::vector<int>& assignment, std::vector<double>& dist2) {
  const long n = static_cast<long>(points.size()) / dim;
  assignment.assign(static_cast<std::size_t>(n), 0);
  dist2.assign(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double d = 0.0;
    assignment[static_cast<std::size_t>(i)] =
        nearest_row(points.data() + static_cast<std::size_t>(i) * dim, centroids, dim, d);
    dist2[static_cast<std::size_t>(i)] = d;
  }
}

std::vector<FeatureSplit> best_splits(std::span<const double> features, int dim,
                                      std::span<const int> labels, int classes,
                                      std::span<const int> rows) {
  std::vector<FeatureSplit> out(static_cast<std::size_t>(dim));
  const auto xlogx = xlogx_table(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < dim; ++f)
    out[static_cast<std::size_t>(f)] = split_feature(features, dim, labels, classes, rows, f, xlogx);
  return out;
}

std::vector<SupportCount> rule_support(std::span<const double> features, int dim,
                                       std::span<const int> labels,
                                       std::span<const std::vector<PremiseTerm>> premises,
                                       std::span<const int> conclusions) {
  const long m = static_cast<long>(premises.size());
  std::vector<SupportCount> out(premises.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i)
    out[static_cast<std::size_t>(i)] =
        support_one(features, dim, labels, premises[static_cast<std::size_t>(i)],
                    conclusions[static_cast<std::size_t>(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// Serial references
// ---------------------------------------------------------------------------

namespace serial {

void background_mode(std::span<const Frame* const> frames, std::vector<std::uint8_t>& out) {
  check_stack(frames);
  out.assign(frames[0]->rgb.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Sort the samples and take the longest run; the first longest run is
    // the lowest value.
    std::vector<std::uint8_t> v;
    v.reserve(frames.size());
    for (const Frame* f : frames) v.push_back(f->rgb[i]);
    std::sort(v.begin(), v.end());
    std::size_t best_len = 0, run = 0;
    std::uint8_t best = v[0];
    for (std::size_t j = 0; j < v.size(); ++j) {
      run = (j > 0 && v[j] == v[j - 1]) ? run + 1 : 1;
      if (run > best_len) {
        best_len = run;
        best = v[j];
      }
    }
    out[i] = best;
  }
}

void foreground_mask(const Frame& frame, std::span<const std::uint8_t> background,
                     double threshold, Mask& mask) {
  mask = Mask(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
      mask.set(x, y, is_foreground(&frame.rgb[3 * i], &background[3 * i], threshold));
    }
}

void nearest_centroid(std::span<const double> points, std::span<const double> centroids,
                      int dim, std::vector<int>& assignment, std::vector<double>& dist2) {
  const std::size_t n = points.size() / static_cast<std::size_t>(dim);
  assignment.assign(n, 0);
  dist2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    assignment[i] = nearest_row(points.data() + i * dim, centroids, dim, dist2[i]);
}

std::vector<FeatureSplit> best_splits(std::span<const double> features, int dim,
                                      std::span<const int> labels, int classes,
                                      std::span<const int> rows) {
  std::vector<FeatureSplit> out;
  const auto xlogx = xlogx_table(rows.size());
  for (int f = 0; f < dim; ++f)
    out.push_back(split_feature(features, dim, labels, classes, rows, f, xlogx));
  return out;
}

std::vector<SupportCount> rule_support(std::span<const double> features, int dim,
                                       std::span<const int> labels,
                                       std::span<const std::vector<PremiseTerm>> premises,
                                       std::span<const int> conclusions) {
  std::vector<SupportCount> out;
  for (std::size_t i = 0; i < premises.size(); ++i)
    out.push_back(support_one(features, dim, labels, premises[i], conclusions[i]));
  return out;
}

}  // namespace serial

}  // namespace scobot::kernels
