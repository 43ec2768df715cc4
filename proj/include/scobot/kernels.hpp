#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP implementation in
// scobot::kernels and a plain serial reference in scobot::kernels::serial.
// Both produce bit-identical results for any thread count; the reference
// exists for tests and for bench_kernels.

#include <cstdint>
#include <span>
#include <vector>

#include "scobot/common.hpp"

namespace scobot::kernels {

/// Channelwise per-pixel mode over a stack of equally sized frames; ties go
/// to the lowest channel value. `out` receives width*height*3 bytes.
void background_mode(std::span<const Frame* const> frames, std::vector<std::uint8_t>& out);

/// mask = 1 where the channelwise L-infinity distance to `background`
/// exceeds `threshold` (in channel units).
void foreground_mask(const Frame& frame, std::span<const std::uint8_t> background,
                     double threshold, Mask& mask);

/// For each row of `points` (n x dim, row-major) the index of the nearest
/// row of `centroids` (k x dim) by squared Euclidean distance; ties go to
/// the lower index.
void nearest_centroid(std::span<const double> points, std::span<const double> centroids,
                      int dim, std::vector<int>& assignment, std::vector<double>& dist2);

/// Best binary threshold split of one node for every feature.
struct FeatureSplit {
  int feature = -1;
  double gain = 0.0;       // information gain in bits
  double gain_ratio = 0.0; // gain / split information
  double lower = 0.0;      // largest value routed left
  double upper = 0.0;      // smallest value routed right
  bool operator==(const FeatureSplit&) const = default;
};

/// `features` is row-major n_total x dim; `rows` selects the node's samples;
/// `labels` holds a class id in [0, classes) per sample. For each feature
/// returns the threshold with maximal information gain (ties: lowest
/// threshold); features with no admissible split report gain 0.
std::vector<FeatureSplit> best_splits(std::span<const double> features, int dim,
                                      std::span<const int> labels, int classes,
                                      std::span<const int> rows);

/// A conjunction of threshold tests on row-major feature vectors.
struct PremiseTerm {
  int feature = 0;
  bool greater = false;  // true: x > threshold, false: x <= threshold
  double threshold = 0.0;
  bool operator==(const PremiseTerm&) const = default;
};

struct SupportCount {
  long matched = 0;  // rows satisfying the premise
  long agreed = 0;   // of those, rows whose label equals the conclusion
  bool operator==(const SupportCount&) const = default;
};

std::vector<SupportCount> rule_support(std::span<const double> features, int dim,
                                       std::span<const int> labels,
                                       std::span<const std::vector<PremiseTerm>> premises,
                                       std::span<const int> conclusions);

inline bool satisfies(std::span<const double> row, std::span<const PremiseTerm> premise) {
  for (const PremiseTerm& t : premise) {
    const double v = row[static_cast<std::size_t>(t.feature)];
    if (t.greater ? !(v > t.threshold) : !(v <= t.threshold)) return false;
  }
  return true;
}

namespace serial {

void background_mode(std::span<const Frame* const> frames, std::vector<std::uint8_t>& out);
void foreground_mask(const Frame& frame, std::span<const std::uint8_t> background,
                     double threshold, Mask& mask);
void nearest_centroid(std::span<const double> points, std::span<const double> centroids,
                      int dim, std::vector<int>& assignment, std::vector<double>& dist2);
std::vector<FeatureSplit> best_splits(std::span<const double> features, int dim,
                                      std::span<const int> labels, int classes,
                                      std::span<const int> rows);
std::vector<SupportCount> rule_support(std::span<const double> features, int dim,
                                       std::span<const int> labels,
                                       std::span<const std::vector<PremiseTerm>> premises,
                                       std::span<const int> conclusions);

}  // namespace serial

/// Shannon entropy in bits of a class histogram with total `n`.
double entropy_bits(std::span<const long> counts, long n);

}  // namespace scobot::kernels
