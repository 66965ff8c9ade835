#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cforge/corpus.hpp"
#include "cforge/matrix.hpp"
#include "cforge/metrics.hpp"
#include "cforge/pipeline.hpp"

namespace cforge {

struct SweepEntry {
  PipelineConfig config;
  std::string objective;  // "ci_f1" or "wsi_f1"
  double score = 0.0;
  BCubedScore ci;                 // on the dev concepts
  std::optional<double> wsi_f1;   // local-only configs
  std::size_t num_concepts = 0;
};

struct SweepResult {
  PipelineConfig best;
  std::size_t best_index = 0;
  std::vector<SweepEntry> leaderboard;  // grid order
};

// Scores every config on the dev split and keeps the first maximum. CI systems
// are scored by Extended BCubed F1 on the dev concepts, local-only systems by
// WSI F1 on the dev occurrences of lemmas with at least two dev concepts.
// Local clusterings are computed once per distinct local step. Throws
// kParameter on an empty grid.
SweepResult sweep(const Corpus& corpus, const Matrix& occurrence_vectors, const GoldClusterings& gold,
                  const SplitSpec& dev, const std::vector<PipelineConfig>& grid, std::size_t threads = 1);

// Expands a level spec whose numeric option may be a range:
// "agglo:average:nu=8..-4/0.5", "kmeans:k=2..10", "kmeans:pi=0.4..4/0.2".
// Values follow the range from its start, so "8..-4" counts down.
std::vector<LevelConfig> expand_level_specs(const std::string& text);

// Grid file: an object or array of objects
//   {"mode": "bilevel", "local": [specs], "global": [specs], "metric": "cosine"}
// expanded as the cross product of local and global specs.
std::vector<PipelineConfig> grid_from_json(const nlohmann::json& j, std::uint64_t seed);

// Hyperparameter ranges explored for one system: local k in 2..10, global pi
// in 40%..400% (step 20%), nu from 8 down to -4 (step 0.5), single/average/
// complete linkage shared by both levels. Under the first-maximum rule, equal
// scores resolve to the larger nu.
std::vector<PipelineConfig> default_grid(Mode mode, Algorithm local, Algorithm global, std::uint64_t seed);

nlohmann::json to_json(const SweepResult& result);

}  // namespace cforge
