#include <algorithm>
#include <cmath>
#include <limits>

#include "cforge/clustering.hpp"
#include "cforge/error.hpp"
#include "cforge/parallel.hpp"
#include "cforge/random.hpp"

namespace cforge {

const char* to_string(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "euclidean";
}

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::kSingle: return "single";
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
  }
  return "average";
}

Metric parse_metric(const std::string& name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw Error(ErrorKind::kParameter, "unknown metric: " + name);
}

Linkage parse_linkage(const std::string& name) {
  if (name == "single") return Linkage::kSingle;
  if (name == "average" || name == "avg") return Linkage::kAverage;
  if (name == "complete") return Linkage::kComplete;
  throw Error(ErrorKind::kParameter, "unknown linkage: " + name);
}

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double euclidean(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double cosine_from(double uv, double norm_u, double norm_v) {
  return std::clamp(1.0 - uv / (norm_u * norm_v), 0.0, 2.0);
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    norms[i] = std::sqrt(dot(m.row(i), m.row(i)));
    if (norms[i] == 0.0) {
      throw Error(ErrorKind::kDegenerateInput,
                  "cosine distance undefined for zero vector at row " + std::to_string(i));
    }
  }
  return norms;
}

DistanceStats summarize(const std::vector<double>& values) {
  DistanceStats stats;
  stats.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
  stats.std = std::sqrt(sq / static_cast<double>(values.size()));
  return stats;
}

// Pair sequence shared by both stats overloads.
template <typename PairDistance>
DistanceStats sampled_stats(std::size_t n, std::size_t sample_cap, std::uint64_t seed,
                            PairDistance&& pair_distance) {
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(sample_cap);
  for (std::size_t s = 0; s < sample_cap; ++s) {
    const std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;
    values.push_back(pair_distance(std::min(i, j), std::max(i, j)));
  }
  return summarize(values);
}

std::size_t pairs_of(std::size_t n) { return n * (n - 1) / 2; }

}  // namespace

double distance(std::span<const double> u, std::span<const double> v, Metric metric) {
  if (u.size() != v.size()) throw Error(ErrorKind::kConsistency, "vector dimensions differ");
  if (metric == Metric::kEuclidean) return euclidean(u, v);
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) {
    throw Error(ErrorKind::kDegenerateInput, "cosine distance undefined for a zero vector");
  }
  return cosine_from(dot(u, v), nu, nv);
}

DistanceMatrix DistanceMatrix::compute(const Matrix& vectors, Metric metric, std::size_t threads) {
  DistanceMatrix dm;
  dm.n_ = vectors.rows();
  dm.values_.assign(dm.n_ < 2 ? 0 : pairs_of(dm.n_), 0.0);
  std::vector<double> norms;
  if (metric == Metric::kCosine) norms = row_norms(vectors);
  parallel_for(dm.n_, threads, [&](std::size_t i) {
    auto ui = vectors.row(i);
    for (std::size_t j = i + 1; j < dm.n_; ++j) {
      dm.values_[dm.index(i, j)] = metric == Metric::kCosine
                                       ? cosine_from(dot(ui, vectors.row(j)), norms[i], norms[j])
                                       : euclidean(ui, vectors.row(j));
    }
  });
  return dm;
}

DistanceStats pairwise_distance_stats(const Matrix& vectors, Metric metric, std::size_t sample_cap,
                                      std::uint64_t seed) {
  const std::size_t n = vectors.rows();
  if (n < 2) throw Error(ErrorKind::kDegenerateInput, "distance statistics need at least 2 vectors");
  std::vector<double> norms;
  if (metric == Metric::kCosine) norms = row_norms(vectors);
  auto pair_distance = [&](std::size_t i, std::size_t j) {
    return metric == Metric::kCosine ? cosine_from(dot(vectors.row(i), vectors.row(j)), norms[i], norms[j])
                                     : euclidean(vectors.row(i), vectors.row(j));
  };
  if (pairs_of(n) > sample_cap) return sampled_stats(n, sample_cap, seed, pair_distance);
  std::vector<double> values;
  values.reserve(pairs_of(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) values.push_back(pair_distance(i, j));
  }
  return summarize(values);
}

DistanceStats pairwise_distance_stats(const DistanceMatrix& distances, std::size_t sample_cap,
                                      std::uint64_t seed) {
  const std::size_t n = distances.size();
  if (n < 2) throw Error(ErrorKind::kDegenerateInput, "distance statistics need at least 2 vectors");
  if (distances.pair_count() > sample_cap) {
    return sampled_stats(n, sample_cap, seed,
                         [&](std::size_t i, std::size_t j) { return distances.at(i, j); });
  }
  const auto values = distances.condensed();
  return summarize({values.begin(), values.end()});
}

double derive_threshold(const DistanceStats& stats, double nu) {
  if (!(stats.std >= 0.0)) throw Error(ErrorKind::kParameter, "standard deviation must be >= 0");
  return stats.mean - nu * stats.std;
}

ClusterAssignment canonical_assignment(std::span<const std::size_t> labels) {
  ClusterAssignment out;
  out.labels.resize(labels.size());
  std::vector<std::size_t> remap;
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= remap.size()) remap.resize(labels[i] + 1, kUnset);
    if (remap[labels[i]] == kUnset) remap[labels[i]] = out.k++;
    out.labels[i] = remap[labels[i]];
  }
  return out;
}

ClusterAssignment singleton_assignment(std::size_t n) {
  ClusterAssignment out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = i;
  out.k = n;
  return out;
}

}  // namespace cforge
