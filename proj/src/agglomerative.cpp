#include <algorithm>
#include <limits>
#include <numeric>

#include "cforge/clustering.hpp"
#include "cforge/error.hpp"

namespace cforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Working copy of the condensed matrix, indexed by cluster slot.
class SlotDistances {
 public:
  SlotDistances(std::size_t n, std::span<const double> condensed)
      : n_(n), values_(condensed.begin(), condensed.end()) {}

  double get(std::size_t i, std::size_t j) const { return values_[index(std::min(i, j), std::max(i, j))]; }
  void set(std::size_t i, std::size_t j, double d) { values_[index(std::min(i, j), std::max(i, j))] = d; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return n_ * i - i * (i + 1) / 2 + j - i - 1; }

  std::size_t n_;
  std::vector<double> values_;
};

double lance_williams(Linkage linkage, double d_ki, double d_kj, double size_i, double size_j) {
  switch (linkage) {
    case Linkage::kSingle: return std::min(d_ki, d_kj);
    case Linkage::kComplete: return std::max(d_ki, d_kj);
    case Linkage::kAverage: return (size_i * d_ki + size_j * d_kj) / (size_i + size_j);
  }
  return kInf;
}

}  // namespace

Dendrogram agglomerate(const DistanceMatrix& distances, Linkage linkage, double tau) {
  const std::size_t n = distances.size();
  Dendrogram out;
  if (n == 0) return out;

  SlotDistances d(n, distances.condensed());
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  // Nearest active neighbour with a higher slot; smallest slot on ties.
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nn_dist(n, kInf);
  auto rescan = [&](std::size_t i) {
    nn[i] = n;
    nn_dist[i] = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const double dij = d.get(i, j);
      if (dij < nn_dist[i] || nn[i] == n) {
        nn_dist[i] = dij;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (active[s] && nn[s] != n && (i == n || nn_dist[s] < nn_dist[i])) i = s;
    }
    if (i == n || !(nn_dist[i] <= tau)) break;
    const std::size_t j = nn[i];
    out.merges.push_back({i, j, nn_dist[i]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      d.set(k, i, lance_williams(linkage, d.get(k, i), d.get(k, j), size[i], size[j]));
    }
    active[j] = false;
    size[i] += size[j];
    parent[j] = i;

    for (std::size_t k = 0; k < j; ++k) {
      if (!active[k] || k == i) continue;
      if (nn[k] == i || nn[k] == j) {
        rescan(k);
      } else if (k < i) {
        const double dki = d.get(k, i);
        if (dki < nn_dist[k] || (dki == nn_dist[k] && i < nn[k])) {
          nn_dist[k] = dki;
          nn[k] = i;
        }
      }
    }
    rescan(i);
  }

  std::vector<std::size_t> root(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t r = s;
    while (parent[r] != r) r = parent[r];
    root[s] = r;
  }
  out.assignment = canonical_assignment(root);
  return out;
}

ClusterAssignment agglomerative(const Matrix& vectors, Metric metric, Linkage linkage, double tau,
                                std::size_t threads) {
  if (vectors.rows() == 0) throw Error(ErrorKind::kDegenerateInput, "agglomerative clustering on empty input");
  return agglomerate(DistanceMatrix::compute(vectors, metric, threads), linkage, tau).assignment;
}

}  // namespace cforge
