#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cforge/corpus.hpp"
#include "cforge/metrics.hpp"
#include "cforge/partitions.hpp"
#include "cforge/pipeline.hpp"

namespace cforge {

// {"concepts":[{"id":k,"lemmas":[...],"occurrences":[...]}],
//  "senses":[{"lemma":w,"parts":[[occ ids]...]}], "config":{...}, "seed":n}
nlohmann::json clusters_to_json(const Corpus& corpus, const InductionResult& result,
                                const nlohmann::json& config, std::uint64_t seed);

// Clustering artifact aligned to a corpus. Occurrences the corpus does not
// know are dropped and concept ids renumbered; a corpus occurrence missing
// from the artifact is a kConsistency error.
struct ClusterArtifact {
  InductionResult result;
  nlohmann::json config;
  std::uint64_t seed = 0;
};

ClusterArtifact clusters_from_json(const nlohmann::json& j, const Corpus& corpus);

struct MetricsReport {
  std::string split;
  std::string system;
  BCubedScore ci;
  std::optional<double> wsi_f1;
  std::optional<double> rho;
  std::size_t n_clusters = 0;
};

// {split, system, P, R, F1, wsi_f1, rho, n_clusters}; absent values are null.
nlohmann::json to_json(const MetricsReport& report);

nlohmann::json to_json(const StatsReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// FNV-1a 64 of a file's bytes as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace cforge
