#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cforge/clustering.hpp"
#include "cforge/corpus.hpp"
#include "cforge/embedding_store.hpp"
#include "cforge/matrix.hpp"
#include "cforge/partitions.hpp"

namespace cforge {

enum class Algorithm { kKMeans, kAgglomerative, kIdentity };
enum class Mode { kLocalOnly, kGlobalOnly, kBilevel };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& name);

// Settings for one clustering level. Local k-means reads `k`, global k-means
// reads `pi` (k = round(pi * |W|)); agglomerative reads `nu` and `linkage`.
struct LevelConfig {
  Algorithm algorithm = Algorithm::kAgglomerative;
  std::size_t k = 2;
  double pi = 1.2;
  double nu = 0.0;
  Linkage linkage = Linkage::kAverage;

  friend bool operator==(const LevelConfig&, const LevelConfig&) = default;
};

// Grammar: "identity" | "kmeans:k=<int>" | "kmeans:pi=<real>[%]" |
//          "agglo:<single|average|avg|complete>:nu=<real>"
LevelConfig parse_level(const std::string& text);
std::string format_level(const LevelConfig& level, bool global);

struct PipelineConfig {
  Mode mode = Mode::kBilevel;
  LevelConfig local;
  LevelConfig global;
  Metric metric = Metric::kCosine;  // agglomerative distance; k-means is always euclidean
  std::uint64_t seed = 0;
  std::size_t sample_cap = kDefaultSampleCap;
  std::size_t max_iter = kDefaultMaxIter;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Throws kParameter on an inconsistent configuration.
void validate(const PipelineConfig& config);

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);
std::string describe(const PipelineConfig& config);

// Stable string for a local step; equal keys give equal local clusterings.
std::string local_cache_key(const PipelineConfig& config);

struct Centroids {
  Matrix rows;
  std::vector<std::pair<std::size_t, std::size_t>> provenance;  // row -> (lemma, local cluster)
};

struct InductionResult {
  SensePartition senses;
  ConceptPartition concepts;
  WordClustering words;
};

// Clusters each lemma's occurrence vectors independently.
SensePartition run_local(const Corpus& corpus, const EmbeddingStore& store, const PipelineConfig& config,
                         std::size_t threads = 1);
SensePartition run_local(const Corpus& corpus, const Matrix& occurrence_vectors,
                         const PipelineConfig& config, std::size_t threads = 1);

// One row per local cluster: the 64-bit mean of its member vectors.
Centroids aggregate_centroids(const Corpus& corpus, const Matrix& occurrence_vectors,
                              const SensePartition& senses);
Centroids aggregate_centroids(const Corpus& corpus, const EmbeddingStore& store,
                              const SensePartition& senses);

// Clusters the centroids; each occurrence inherits its local cluster's label.
ConceptPartition run_global(const Corpus& corpus, const Centroids& centroids, const SensePartition& senses,
                            const PipelineConfig& config, std::size_t threads = 1);

// Global k-means cluster count round(pi * |W|) clamped to [1, num_centroids].
std::size_t global_kmeans_k(double pi, std::size_t num_lemmas, std::size_t num_centroids);

InductionResult run_bilevel(const Corpus& corpus, const EmbeddingStore& store, const PipelineConfig& config,
                            std::size_t threads = 1);
InductionResult run_bilevel(const Corpus& corpus, const Matrix& occurrence_vectors,
                            const PipelineConfig& config, std::size_t threads = 1);

// Identity local step, then the global step on raw occurrence vectors.
InductionResult run_global_only(const Corpus& corpus, const EmbeddingStore& store,
                                const PipelineConfig& config, std::size_t threads = 1);
InductionResult run_global_only(const Corpus& corpus, const Matrix& occurrence_vectors,
                                const PipelineConfig& config, std::size_t threads = 1);

// Local clusters become concepts unchanged (pure WSI).
InductionResult run_local_only(const Corpus& corpus, const Matrix& occurrence_vectors,
                               const PipelineConfig& config, std::size_t threads = 1);

// Dispatches on config.mode.
InductionResult run_pipeline(const Corpus& corpus, const Matrix& occurrence_vectors,
                             const PipelineConfig& config, std::size_t threads = 1);

// Concept partition with one concept per local cluster.
ConceptPartition concepts_from_senses(const Corpus& corpus, const SensePartition& senses);

WordClustering derive_word_clustering(const ConceptPartition& concepts, const Corpus& corpus);

WordClustering baseline_lemmas(const Corpus& corpus);

// One singleton per distinct gold concept of each lemma. Throws
// kMissingAnnotation when an occurrence has no gold concept.
WordClustering baseline_oracle_wsi(const Corpus& corpus, const GoldClusterings& gold);

// Checks constraints 1-4 linking Ŝ and Ĉ; returns one message per violation.
std::vector<std::string> check_constraints(const Corpus& corpus, const SensePartition& senses,
                                           const ConceptPartition& concepts);

}  // namespace cforge
