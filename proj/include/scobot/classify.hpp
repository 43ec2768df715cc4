#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scobot {

/// k-means centroids with optional descriptive labels.
struct CentroidSet {
  std::vector<std::vector<double>> centroids;
  std::vector<std::optional<std::string>> labels;

  int k() const { return static_cast<int>(centroids.size()); }
  int dim() const { return centroids.empty() ? 0 : static_cast<int>(centroids[0].size()); }
  bool labeled() const;

  bool operator==(const CentroidSet&) const = default;
};

struct KMeansResult {
  CentroidSet centroids;
  std::vector<int> assignment;
  std::vector<double> inertia_history;  // after each assignment step
  int iterations = 0;
};

inline constexpr int kKMeansMaxIterations = 300;

/// Lloyd's algorithm from k distinct seeded samples; stops at an assignment
/// fixpoint or after `max_iterations`.
KMeansResult fit_kmeans(std::span<const std::vector<double>> encodings, int k, std::uint64_t seed,
                        int max_iterations = kKMeansMaxIterations);

double inertia(std::span<const std::vector<double>> encodings, const CentroidSet& cs);

struct LabeledEncoding {
  std::vector<double> encoding;
  std::string label;
};

/// Names every centroid by a uniform majority vote among its `k_nn` nearest
/// references; ties go to the smallest mean distance, then the label text.
CentroidSet label_centroids(CentroidSet cs, std::span<const LabeledEncoding> refs, int k_nn = 24);

/// Label of the nearest centroid; ties go to the lower centroid index.
const std::string& classify(std::span<const double> encoding, const CentroidSet& cs);

void save_centroids(const CentroidSet& cs, const std::filesystem::path& path);
CentroidSet load_centroids(const std::filesystem::path& path);

}  // namespace scobot
