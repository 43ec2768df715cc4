#include "scobot/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "scobot/common.hpp"
#include "scobot/kernels.hpp"

namespace scobot {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    d += e * e;
  }
  return d;
}

std::vector<double> flatten(std::span<const std::vector<double>> rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

}  // namespace

bool CentroidSet::labeled() const {
  return !labels.empty() &&
         std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
}

KMeansResult fit_kmeans(std::span<const std::vector<double>> encodings, int k, std::uint64_t seed,
                        int max_iterations) {
  if (k < 1) throw ContractError("fit_kmeans: k must be >= 1");
  const int n = static_cast<int>(encodings.size());
  if (n < k) throw ContractError("fit_kmeans: fewer points than clusters");
  const int dim = static_cast<int>(encodings[0].size());
  for (const auto& e : encodings)
    if (static_cast<int>(e.size()) != dim) throw ContractError("fit_kmeans: ragged encodings");

  // Greedy k-means++ seeding: each new center is the best of a few
  // D^2-weighted sample candidates.
  Rng rng(seed);
  std::vector<int> idx{rng.below(n)};
  std::vector<double> closest(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    closest[static_cast<std::size_t>(i)] = dist2(encodings[static_cast<std::size_t>(i)], encodings[static_cast<std::size_t>(idx[0])]);
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  while (static_cast<int>(idx.size()) < k) {
    const double total = std::accumulate(closest.begin(), closest.end(), 0.0);
    int best = -1;
    double best_pot = 0.0;
    std::vector<double> best_closest;
    for (int t = 0; t < trials; ++t) {
      int cand = -1;
      if (total > 0.0) {
        double u = rng.uniform() * total;
        for (int i = 0; i < n; ++i) {
          u -= closest[static_cast<std::size_t>(i)];
          if (u < 0.0 && closest[static_cast<std::size_t>(i)] > 0.0) {
            cand = i;
            break;
          }
        }
      }
      if (cand < 0)  // all mass on chosen points or rounding: first unchosen sample
        for (int i = 0; i < n && cand < 0; ++i)
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) cand = i;
      std::vector<double> next(closest);
      for (int i = 0; i < n; ++i)
        next[static_cast<std::size_t>(i)] =
            std::min(next[static_cast<std::size_t>(i)], dist2(encodings[static_cast<std::size_t>(i)], encodings[static_cast<std::size_t>(cand)]));
      const double pot = std::accumulate(next.begin(), next.end(), 0.0);
      if (best < 0 || pot < best_pot) {
        best = cand;
        best_pot = pot;
        best_closest = std::move(next);
      }
    }
    idx.push_back(best);
    closest = std::move(best_closest);
  }

  KMeansResult res;
  std::vector<double> centers;
  for (int i = 0; i < k; ++i) {
    const auto& e = encodings[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    centers.insert(centers.end(), e.begin(), e.end());
  }
  const std::vector<double> points = flatten(encodings);

  std::vector<int> assignment, previous;
  std::vector<double> d2;
  for (int it = 0; it < max_iterations; ++it) {
    kernels::nearest_centroid(points, centers, dim, assignment, d2);

    // Empty clusters take the point farthest from its own centroid.
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int a : assignment) ++count[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) continue;
      int far = -1;
      for (int i = 0; i < n; ++i)
        if (count[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])] > 1 &&
            (far < 0 || d2[static_cast<std::size_t>(i)] > d2[static_cast<std::size_t>(far)]))
          far = i;
      if (far < 0) break;
      --count[static_cast<std::size_t>(assignment[static_cast<std::size_t>(far)])];
      assignment[static_cast<std::size_t>(far)] = c;
      count[static_cast<std::size_t>(c)] = 1;
      d2[static_cast<std::size_t>(far)] = 0.0;
      std::copy(encodings[static_cast<std::size_t>(far)].begin(), encodings[static_cast<std::size_t>(far)].end(),
                centers.begin() + static_cast<long>(c) * dim);
    }

    res.inertia_history.push_back(std::accumulate(d2.begin(), d2.end(), 0.0));
    res.iterations = it + 1;
    if (assignment == previous) break;
    previous = assignment;

    std::fill(centers.begin(), centers.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const int c = assignment[static_cast<std::size_t>(i)];
      for (int t = 0; t < dim; ++t)
        centers[static_cast<std::size_t>(c) * dim + t] += encodings[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
    for (int c = 0; c < k; ++c)
      for (int t = 0; t < dim; ++t) centers[static_cast<std::size_t>(c) * dim + t] /= count[static_cast<std::size_t>(c)];
  }

  res.assignment = assignment;
  for (int c = 0; c < k; ++c)
    res.centroids.centroids.emplace_back(centers.begin() + static_cast<long>(c) * dim,
                                         centers.begin() + static_cast<long>(c + 1) * dim);
  res.centroids.labels.assign(static_cast<std::size_t>(k), std::nullopt);
  return res;
}

double inertia(std::span<const std::vector<double>> encodings, const CentroidSet& cs) {
  double total = 0.0;
  for (const auto& e : encodings) {
    double best = -1.0;
    for (const auto& c : cs.centroids) {
      const double d = dist2(e, c);
      if (best < 0 || d < best) best = d;
    }
    total += best;
  }
  return total;
}

CentroidSet label_centroids(CentroidSet cs, std::span<const LabeledEncoding> refs, int k_nn) {
  if (k_nn < 1 || static_cast<int>(refs.size()) < k_nn)
    throw ContractError("label_centroids: fewer references than k_nn");
  cs.labels.assign(cs.centroids.size(), std::nullopt);
  for (std::size_t c = 0; c < cs.centroids.size(); ++c) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t r = 0; r < refs.size(); ++r)
      d.emplace_back(std::sqrt(dist2(cs.centroids[c], refs[r].encoding)), r);
    std::partial_sort(d.begin(), d.begin() + k_nn, d.end());

    std::map<std::string, std::pair<int, double>> votes;  // label -> (count, distance sum)
    for (int i = 0; i < k_nn; ++i) {
      auto& v = votes[refs[d[static_cast<std::size_t>(i)].second].label];
      ++v.first;
      v.second += d[static_cast<std::size_t>(i)].first;
    }
    const std::string* best = nullptr;
    int best_count = -1;
    double best_mean = 0.0;
    for (const auto& [label, v] : votes) {
      const double mean = v.second / v.first;
      if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
        best = &label;
        best_count = v.first;
        best_mean = mean;
      }
    }
    cs.labels[c] = *best;
  }
  return cs;
}

const std::string& classify(std::span<const double> encoding, const CentroidSet& cs) {
  if (!cs.labeled()) throw ContractError("classify: centroid set is not labeled");
  if (static_cast<int>(encoding.size()) != cs.dim())
    throw ContractError("classify: encoding dimension mismatch");
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t c = 0; c < cs.centroids.size(); ++c) {
    const double d = dist2(encoding, cs.centroids[c]);
    if (c == 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return *cs.labels[best];
}

void save_centroids(const CentroidSet& cs, const std::filesystem::path& path) {
  if (!cs.labeled()) throw ContractError("save_centroids: centroid set is not labeled");
  std::ofstream os(path);
  if (!os) throw CorruptFileError("cannot write centroids: " + path.string());
  for (std::size_t c = 0; c < cs.centroids.size(); ++c) {
    os << *cs.labels[c];
    for (double v : cs.centroids[c]) os << ' ' << format_exact(v, 6);
    os << '\n';
  }
}

CentroidSet load_centroids(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw CorruptFileError("missing centroids: " + path.string());
  CentroidSet cs;
  std::string line;
  while (std::getline(is, line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < 2) throw CorruptFileError("malformed centroid line in " + path.string());
    std::vector<double> v;
    try {
      for (std::size_t i = 1; i < tok.size(); ++i) v.push_back(parse_double(tok[i]));
    } catch (const ContractError&) {
      throw CorruptFileError("malformed centroid value in " + path.string());
    }
    if (!cs.centroids.empty() && v.size() != cs.centroids[0].size())
      throw CorruptFileError("ragged centroid table in " + path.string());
    cs.labels.emplace_back(tok[0]);
    cs.centroids.push_back(std::move(v));
  }
  if (cs.centroids.empty()) throw CorruptFileError("empty centroid table: " + path.string());
  return cs;
}

}  // namespace scobot
