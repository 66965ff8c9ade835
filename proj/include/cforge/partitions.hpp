#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cforge/clustering.hpp"

namespace cforge {

// Ŝ: one local clustering per lemma, indexed like Corpus::lemmas(); the
// labels of lemma w follow the order of Corpus::lemma_range(w).
struct SensePartition {
  std::vector<ClusterAssignment> per_lemma;

  std::size_t total_parts() const {
    std::size_t total = 0;
    for (const auto& a : per_lemma) total += a.k;
    return total;
  }

  friend bool operator==(const SensePartition&, const SensePartition&) = default;
};

// Ĉ: one global cluster id per corpus occurrence (corpus order), ids 0..p-1.
struct ConceptPartition {
  std::vector<std::size_t> labels;
  std::size_t p = 0;

  friend bool operator==(const ConceptPartition&, const ConceptPartition&) = default;
};

// Ĉ^W or C^W: a soft clustering of lemmas. Cluster i lists its lemmas sorted
// and without repeats; identical clusters may appear more than once.
struct WordClustering {
  std::vector<std::vector<std::string>> clusters;

  friend bool operator==(const WordClustering&, const WordClustering&) = default;
};

}  // namespace cforge
