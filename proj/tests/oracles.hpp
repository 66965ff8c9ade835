#pragma once

// Reference implementations written straight from the metric and clustering
// definitions, with no shared code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cforge/clustering.hpp"
#include "cforge/partitions.hpp"

namespace oracle {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline std::size_t shared_clusters(const cforge::WordClustering& c, const std::string& a, const std::string& b) {
  std::size_t n = 0;
  for (const auto& cluster : c.clusters) {
    const bool has_a = std::find(cluster.begin(), cluster.end(), a) != cluster.end();
    const bool has_b = std::find(cluster.begin(), cluster.end(), b) != cluster.end();
    if (has_a && has_b) ++n;
  }
  return n;
}

// Extended BCubed over the lemma set of `gold`, pair by pair.
inline PRF extended_bcubed(const cforge::WordClustering& pred, const cforge::WordClustering& gold) {
  std::vector<std::string> lemmas;
  for (const auto& cluster : gold.clusters) lemmas.insert(lemmas.end(), cluster.begin(), cluster.end());
  std::sort(lemmas.begin(), lemmas.end());
  lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());

  double p_total = 0.0, r_total = 0.0;
  for (const auto& e : lemmas) {
    double p_sum = 0.0, r_sum = 0.0;
    std::size_t p_pairs = 0, r_pairs = 0;
    for (const auto& other : lemmas) {
      const auto c = static_cast<double>(shared_clusters(pred, e, other));
      const auto l = static_cast<double>(shared_clusters(gold, e, other));
      if (c > 0) {
        p_sum += std::min(c, l) / c;
        ++p_pairs;
      }
      if (l > 0) {
        r_sum += std::min(c, l) / l;
        ++r_pairs;
      }
    }
    p_total += p_sum / static_cast<double>(p_pairs);
    r_total += r_sum / static_cast<double>(r_pairs);
  }
  const double n = static_cast<double>(lemmas.size());
  return {p_total / n, r_total / n, f1(p_total / n, r_total / n)};
}

// Classic BCubed on two hard labelings.
inline PRF classic_bcubed(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
  const std::size_t n = pred.size();
  double p = 0.0, r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double same_pred = 0, same_gold = 0, same_both = 0;
    for (std::size_t j = 0; j < n; ++j) {
      same_pred += pred[i] == pred[j];
      same_gold += gold[i] == gold[j];
      same_both += pred[i] == pred[j] && gold[i] == gold[j];
    }
    p += same_both / same_pred;
    r += same_both / same_gold;
  }
  p /= static_cast<double>(n);
  r /= static_cast<double>(n);
  return {p, r, f1(p, r)};
}

struct OracleMerge {
  std::size_t left;
  std::size_t right;
  double distance;
};

struct OracleDendrogram {
  std::vector<OracleMerge> merges;
  std::vector<std::size_t> labels;  // canonical: numbered by first appearance
};

// Recomputes every inter-cluster linkage from the raw point distances at each
// step. Clusters are named by their smallest member.
inline OracleDendrogram exhaustive_dendrogram(const std::vector<std::vector<double>>& d, cforge::Linkage linkage,
                                              double tau) {
  const std::size_t n = d.size();
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};

  auto link = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (auto i : a) {
      for (auto j : b) {
        lo = std::min(lo, d[i][j]);
        hi = std::max(hi, d[i][j]);
        sum += d[i][j];
      }
    }
    switch (linkage) {
      case cforge::Linkage::kSingle: return lo;
      case cforge::Linkage::kComplete: return hi;
      case cforge::Linkage::kAverage: return sum / static_cast<double>(a.size() * b.size());
    }
    return sum;
  };

  OracleDendrogram out;
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (clusters[i].empty()) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (clusters[j].empty()) continue;
        const double v = link(clusters[i], clusters[j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || !(best <= tau)) break;
    out.merges.push_back({bi, bj, best});
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters[bj].clear();
  }

  std::vector<std::size_t> owner(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (auto i : clusters[c]) owner[i] = c;
  }
  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t i = 0; i < n; ++i) {
    out.labels.push_back(renumber.emplace(owner[i], renumber.size()).first->second);
  }
  return out;
}

inline double kmeans_objective(const std::vector<std::vector<double>>& points, const std::vector<std::size_t>& labels,
                               const std::vector<std::vector<double>>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < points[i].size(); ++k) {
      const double diff = points[i][k] - centroids[labels[i]][k];
      total += diff * diff;
    }
  }
  return total;
}

}  // namespace oracle
