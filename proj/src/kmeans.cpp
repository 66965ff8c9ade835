#include <algorithm>
#include <limits>

#include "cforge/clustering.hpp"
#include "cforge/error.hpp"
#include "cforge/parallel.hpp"
#include "cforge/random.hpp"

namespace cforge {

namespace {

double squared_distance(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

Matrix plus_plus_seeds(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centers;
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    chosen[pick] = true;
    centers.append_row(x.row(pick));
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(x.row(i), x.row(pick)));
      total += nearest[i];
    }
    if (total == 0.0) {
      // Every point coincides with a center already; take the first unused row.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      continue;
    }
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      cumulative += nearest[i];
      if (nearest[i] > 0.0 && cumulative > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) {
      // Rounding left the target past the last bucket.
      for (std::size_t i = n; i-- > 0;) {
        if (nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
  }
  return centers;
}

void update_centroids(const Matrix& x, const std::vector<std::size_t>& labels, Matrix& centers,
                      std::vector<std::size_t>& sizes) {
  std::fill(sizes.begin(), sizes.end(), 0);
  Matrix sums(centers.rows(), centers.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto dst = sums.row(labels[i]);
    auto src = x.row(i);
    for (std::size_t d = 0; d < src.size(); ++d) dst[d] += src[d];
    ++sizes[labels[i]];
  }
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    if (sizes[c] == 0) continue;
    auto dst = centers.row(c);
    auto src = sums.row(c);
    for (std::size_t d = 0; d < dst.size(); ++d) dst[d] = src[d] / static_cast<double>(sizes[c]);
  }
}

}  // namespace

KMeansResult kmeans(const Matrix& vectors, std::size_t k, std::uint64_t seed, std::size_t max_iter,
                    std::size_t threads) {
  const std::size_t n = vectors.rows();
  if (n == 0) throw Error(ErrorKind::kDegenerateInput, "k-means on empty input");
  if (k == 0) throw Error(ErrorKind::kParameter, "k must be >= 1");
  if (max_iter == 0) throw Error(ErrorKind::kParameter, "max_iter must be >= 1");

  KMeansResult result;
  if (k >= n) {
    result.assignment = singleton_assignment(n);
    result.centroids = vectors;
    result.objective = {0.0};
    return result;
  }

  Rng rng(seed);
  Matrix centers = plus_plus_seeds(vectors, k, rng);
  std::vector<std::size_t> labels(n, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> next(n);
  std::vector<std::size_t> sizes(k);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    parallel_for(n, threads, [&](std::size_t i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(vectors.row(i), centers.row(c));
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      next[i] = arg;
    });
    if (next == labels) break;
    labels = next;
    result.iterations = iter + 1;
    update_centroids(vectors, labels, centers, sizes);

    // Empty clusters take the point farthest from its centroid, drawn from a
    // cluster that keeps at least one member.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      double worst = -1.0;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) continue;
        const double d = squared_distance(vectors.row(i), centers.row(labels[i]));
        if (d > worst) {
          worst = d;
          arg = i;
        }
      }
      labels[arg] = c;
      update_centroids(vectors, labels, centers, sizes);
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) objective += squared_distance(vectors.row(i), centers.row(labels[i]));
    result.objective.push_back(objective);
  }

  result.assignment = canonical_assignment(labels);
  result.centroids = Matrix(k, vectors.cols());
  for (std::size_t i = 0; i < n; ++i) {
    auto src = centers.row(labels[i]);
    auto dst = result.centroids.row(result.assignment.labels[i]);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return result;
}

}  // namespace cforge
