#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cforge/matrix.hpp"

namespace cforge {

enum class Metric { kCosine, kEuclidean };
enum class Linkage { kSingle, kAverage, kComplete };

const char* to_string(Metric metric);
const char* to_string(Linkage linkage);
Metric parse_metric(const std::string& name);
Linkage parse_linkage(const std::string& name);

// Cosine distance is 1 - cos(u, v), clamped to [0, 2]. Throws kDegenerateInput
// on a zero vector.
double distance(std::span<const double> u, std::span<const double> v, Metric metric);

// Condensed upper triangle of the pairwise distance matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  static DistanceMatrix compute(const Matrix& vectors, Metric metric, std::size_t threads = 1);

  std::size_t size() const noexcept { return n_; }
  std::size_t pair_count() const noexcept { return values_.size(); }

  double at(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return values_[index(i, j)];
  }
  std::span<const double> condensed() const noexcept { return values_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return n_ * i - i * (i + 1) / 2 + j - i - 1; }

  std::size_t n_ = 0;
  std::vector<double> values_;
};

inline constexpr std::size_t kDefaultSampleCap = 2'000'000;

struct DistanceStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

// Exact over all unordered pairs when there are at most `sample_cap` of them,
// otherwise over `sample_cap` uniformly drawn pairs. Throws kDegenerateInput on
// fewer than two vectors.
DistanceStats pairwise_distance_stats(const Matrix& vectors, Metric metric,
                                      std::size_t sample_cap = kDefaultSampleCap,
                                      std::uint64_t seed = 0);

// Same contract, reading from an already computed matrix. Draws the same
// sample as the overload above for equal (n, sample_cap, seed).
DistanceStats pairwise_distance_stats(const DistanceMatrix& distances,
                                      std::size_t sample_cap = kDefaultSampleCap,
                                      std::uint64_t seed = 0);

// tau = mean - nu * std. A negative tau means no merge can happen.
double derive_threshold(const DistanceStats& stats, double nu);

// Hard clustering with contiguous ids, numbered by first appearance.
struct ClusterAssignment {
  std::vector<std::size_t> labels;
  std::size_t k = 0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

// Renumbers labels 0..k-1 in order of first appearance.
ClusterAssignment canonical_assignment(std::span<const std::size_t> labels);

ClusterAssignment singleton_assignment(std::size_t n);

inline constexpr std::size_t kDefaultMaxIter = 100;

struct KMeansResult {
  ClusterAssignment assignment;
  Matrix centroids;                 // row c is the centroid of canonical cluster c
  std::vector<double> objective;    // sum of squared distances after each iteration
  std::size_t iterations = 0;
};

// Lloyd iterations from k-means++ seeding under the euclidean objective. k is
// clamped to the number of vectors. Throws kDegenerateInput on empty input and
// kParameter when k or max_iter is zero.
KMeansResult kmeans(const Matrix& vectors, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = kDefaultMaxIter, std::size_t threads = 1);

struct Merge {
  std::size_t left = 0;   // slot of the surviving cluster (the lower index)
  std::size_t right = 0;  // slot absorbed into `left`
  double distance = 0.0;
};

struct Dendrogram {
  std::vector<Merge> merges;
  ClusterAssignment assignment;
};

// Bottom-up merging of the closest pair while its linkage distance is <= tau.
// A merged cluster keeps the lower slot; ties go to the lexicographically
// smallest (slot, slot) pair. Average linkage is UPGMA.
Dendrogram agglomerate(const DistanceMatrix& distances, Linkage linkage, double tau);

ClusterAssignment agglomerative(const Matrix& vectors, Metric metric, Linkage linkage, double tau,
                                std::size_t threads = 1);

}  // namespace cforge
