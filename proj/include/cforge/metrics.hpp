#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cforge/corpus.hpp"
#include "cforge/partitions.hpp"

namespace cforge {

struct BCubedScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  double beta = 1.0;
};

// (1 + b^2) * P * R / (b^2 * P + R), or 0 when P = R = 0. Throws kParameter
// when beta <= 0.
double f_beta(double precision, double recall, double beta = 1.0);

// MP and MR of one lemma pair. A value is absent when the pair shares no
// cluster in the corresponding clustering (f for MP, g for MR). Shared
// clusters are counted with multiplicity.
struct MultiplicityScores {
  std::optional<double> mp;
  std::optional<double> mr;
};

MultiplicityScores multiplicity_scores(const std::string& w1, const std::string& w2,
                                       const WordClustering& pred, const WordClustering& gold);

// Extended BCubed between two soft clusterings of the same lexicon. With
// `restrict`, both clusterings are projected onto that lemma set and the
// averages run over it. Throws kConsistency on a lexicon mismatch.
BCubedScore bcubed_ci(const WordClustering& pred, const WordClustering& gold, double beta = 1.0,
                      const std::optional<std::set<std::string>>& restrict = std::nullopt);

// Classic item-level BCubed between two hard partitions given as label vectors.
BCubedScore bcubed_partition(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                             double beta = 1.0);

struct WsiScores {
  double precision = 0.0;  // macro average over lemmas
  double recall = 0.0;
  double f_beta = 0.0;     // macro average of per-lemma F
  std::map<std::string, BCubedScore> per_lemma;
};

// Per-lemma BCubed of Ĉ against the gold partition on O^w, macro-averaged.
// Only annotated occurrences (and, if given, those in `occurrence_subset`)
// are scored; lemmas left with no occurrence are skipped.
WsiScores bcubed_wsi(const ConceptPartition& pred, const GoldClusterings& gold, const Corpus& corpus,
                     double beta = 1.0, const std::set<std::string>* occurrence_subset = nullptr);

// Spearman correlation with average ranks for ties; absent when fewer than
// two lemmas or when either side is constant. Throws kConsistency when the key
// sets differ.
std::optional<double> spearman_rho(const std::map<std::string, std::size_t>& pred_counts,
                                   const std::map<std::string, std::size_t>& gold_counts);

// Distinct predicted concepts per lemma over its scored occurrences.
std::map<std::string, std::size_t> predicted_sense_counts(
    const ConceptPartition& pred, const Corpus& corpus, const std::set<std::string>* occurrence_subset = nullptr);

// Distinct gold concepts per lemma over its scored occurrences.
std::map<std::string, std::size_t> gold_sense_counts(
    const GoldClusterings& gold, const Corpus& corpus, const std::set<std::string>* occurrence_subset = nullptr);

// Gold C^W restricted to the given concepts (all when absent), ordered by concept id.
WordClustering gold_word_clustering(const GoldClusterings& gold,
                                    const std::set<std::string>* concepts = nullptr);

// Lemmas realizing at least one concept of the split.
std::set<std::string> split_lemmas(const GoldClusterings& gold, const SplitSpec& split);

// Ĉ^W derived from the occurrences in `occurrence_ids` only, ordered by concept id.
WordClustering word_clustering_on_occurrences(const ConceptPartition& pred, const Corpus& corpus,
                                              const std::set<std::string>& occurrence_ids);

// CI scores on a split: Ĉ restricted to the split's occurrences against the
// gold C^W of the split's concepts.
BCubedScore bcubed_ci_on_split(const ConceptPartition& pred, const Corpus& corpus, const GoldClusterings& gold,
                               const SplitSpec& split, double beta = 1.0);

}  // namespace cforge
