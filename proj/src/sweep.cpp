#include "cforge/sweep.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "cforge/error.hpp"

namespace cforge {

using nlohmann::json;

namespace {

std::set<std::string> polysemous_dev_occurrences(const Corpus& corpus, const GoldClusterings& gold,
                                                 const SplitSpec& dev) {
  const auto counts = gold_sense_counts(gold, corpus, &dev.occurrence_ids);
  std::set<std::string> out;
  for (const auto& occ_id : dev.occurrence_ids) {
    auto index = corpus.find_occurrence(occ_id);
    if (!index) continue;
    auto it = counts.find(corpus.lemmas()[corpus.occurrences()[*index].lemma]);
    if (it != counts.end() && it->second >= 2) out.insert(occ_id);
  }
  return out;
}

std::vector<double> numeric_range(const std::string& text, double default_step) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {};
  const auto slash = text.find('/', dots);
  auto number = [&](const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error(ErrorKind::kParameter, "bad range '" + text + "'");
    }
    return v;
  };
  const double lo = number(text.substr(0, dots));
  const double hi = number(text.substr(dots + 2, slash == std::string::npos ? std::string::npos : slash - dots - 2));
  const double step = slash == std::string::npos ? default_step : number(text.substr(slash + 1));
  if (!(step > 0.0)) throw Error(ErrorKind::kParameter, "bad range '" + text + "'");
  // A range whose end lies below its start counts down.
  const double direction = hi < lo ? -1.0 : 1.0;
  std::vector<double> values;
  const auto steps = static_cast<std::size_t>(std::floor(std::abs(hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    values.push_back(std::round((lo + direction * static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return values;
}

}  // namespace

SweepResult sweep(const Corpus& corpus, const Matrix& occurrence_vectors, const GoldClusterings& gold,
                  const SplitSpec& dev, const std::vector<PipelineConfig>& grid, std::size_t threads) {
  if (grid.empty()) throw Error(ErrorKind::kParameter, "empty hyperparameter grid");
  for (const auto& config : grid) validate(config);

  std::map<std::string, SensePartition> local_cache;
  std::optional<std::set<std::string>> wsi_subset;
  SweepResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PipelineConfig config = grid[i];
    if (config.mode == Mode::kGlobalOnly) config.local = LevelConfig{Algorithm::kIdentity};

    const auto key = local_cache_key(config);
    auto cached = local_cache.find(key);
    if (cached == local_cache.end()) {
      cached = local_cache.emplace(key, run_local(corpus, occurrence_vectors, config, threads)).first;
    }
    const SensePartition& senses = cached->second;

    InductionResult run;
    run.senses = senses;
    if (config.mode == Mode::kLocalOnly) {
      run.concepts = concepts_from_senses(corpus, senses);
    } else {
      const auto centroids = aggregate_centroids(corpus, occurrence_vectors, senses);
      run.concepts = run_global(corpus, centroids, senses, config, threads);
    }
    run.words = derive_word_clustering(run.concepts, corpus);

    SweepEntry entry;
    entry.config = config;
    entry.num_concepts = run.concepts.p;
    entry.ci = bcubed_ci_on_split(run.concepts, corpus, gold, dev);
    if (config.mode == Mode::kLocalOnly) {
      if (!wsi_subset) wsi_subset = polysemous_dev_occurrences(corpus, gold, dev);
      entry.objective = "wsi_f1";
      entry.wsi_f1 = bcubed_wsi(run.concepts, gold, corpus, 1.0, &*wsi_subset).f_beta;
      entry.score = *entry.wsi_f1;
    } else {
      entry.objective = "ci_f1";
      entry.score = entry.ci.f_beta;
    }
    if (i == 0 || entry.score > result.leaderboard[result.best_index].score) result.best_index = i;
    result.leaderboard.push_back(std::move(entry));
  }
  result.best = result.leaderboard[result.best_index].config;
  return result;
}

std::vector<LevelConfig> expand_level_specs(const std::string& text) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos || text.find("..", eq) == std::string::npos) return {parse_level(text)};
  const auto head = text.substr(0, eq + 1);
  const auto key_start = text.rfind(':', eq);
  const auto key = text.substr(key_start + 1, eq - key_start - 1);
  std::vector<LevelConfig> out;
  for (double v : numeric_range(text.substr(eq + 1), key == "pi" ? 0.2 : key == "nu" ? 0.5 : 1.0)) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.push_back(parse_level(head + std::string(buf, end)));
  }
  return out;
}

std::vector<PipelineConfig> grid_from_json(const json& j, std::uint64_t seed) {
  if (j.is_array()) {
    std::vector<PipelineConfig> grid;
    for (const auto& block : j) {
      auto part = grid_from_json(block, seed);
      grid.insert(grid.end(), part.begin(), part.end());
    }
    return grid;
  }
  try {
    PipelineConfig base;
    base.mode = parse_mode(j.value("mode", std::string{"bilevel"}));
    base.metric = parse_metric(j.value("metric", std::string{"cosine"}));
    base.seed = j.value("seed", seed);
    base.sample_cap = j.value("sample_cap", kDefaultSampleCap);
    base.max_iter = j.value("max_iter", kDefaultMaxIter);
    auto specs = [&](const char* field, const char* fallback) {
      std::vector<LevelConfig> levels;
      if (!j.contains(field)) return expand_level_specs(fallback);
      for (const auto& s : j.at(field)) {
        auto part = expand_level_specs(s.get<std::string>());
        levels.insert(levels.end(), part.begin(), part.end());
      }
      return levels;
    };
    const auto locals = base.mode == Mode::kGlobalOnly ? std::vector<LevelConfig>{LevelConfig{Algorithm::kIdentity}}
                                                       : specs("local", "agglo:average:nu=0");
    const auto globals = base.mode == Mode::kLocalOnly ? std::vector<LevelConfig>{LevelConfig{}}
                                                       : specs("global", "agglo:average:nu=0");
    std::vector<PipelineConfig> grid;
    for (const auto& local : locals) {
      for (const auto& global : globals) {
        PipelineConfig config = base;
        config.local = local;
        config.global = global;
        grid.push_back(config);
      }
    }
    return grid;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad grid: ") + e.what());
  }
}

std::vector<PipelineConfig> default_grid(Mode mode, Algorithm local, Algorithm global, std::uint64_t seed) {
  const auto kmeans_local = expand_level_specs("kmeans:k=2..10");
  const auto kmeans_global = expand_level_specs("kmeans:pi=0.4..4/0.2");
  std::vector<PipelineConfig> grid;
  for (const char* linkage : {"single", "average", "complete"}) {
    const auto agglo = expand_level_specs(std::string("agglo:") + linkage + ":nu=8..-4/0.5");
    const auto& locals = mode == Mode::kGlobalOnly ? std::vector<LevelConfig>{LevelConfig{Algorithm::kIdentity}}
                         : local == Algorithm::kKMeans ? kmeans_local
                                                       : agglo;
    const auto& globals = mode == Mode::kLocalOnly ? std::vector<LevelConfig>{LevelConfig{}}
                          : global == Algorithm::kKMeans ? kmeans_global
                                                         : agglo;
    for (const auto& l : locals) {
      for (const auto& g : globals) {
        PipelineConfig config;
        config.mode = mode;
        config.local = l;
        config.global = g;
        config.seed = seed;
        grid.push_back(config);
      }
    }
    // Linkage only matters for agglomerative levels.
    const bool uses_linkage = (mode != Mode::kGlobalOnly && local == Algorithm::kAgglomerative) ||
                              (mode != Mode::kLocalOnly && global == Algorithm::kAgglomerative);
    if (!uses_linkage) break;
  }
  return grid;
}

json to_json(const SweepResult& result) {
  json board = json::array();
  for (const auto& e : result.leaderboard) {
    json row = {{"config", to_json(e.config)},
                {"objective", e.objective},
                {"score", e.score},
                {"ci", {{"P", e.ci.precision}, {"R", e.ci.recall}, {"F1", e.ci.f_beta}}},
                {"n_clusters", e.num_concepts}};
    row["wsi_f1"] = e.wsi_f1 ? json(*e.wsi_f1) : json(nullptr);
    board.push_back(std::move(row));
  }
  return {{"best", to_json(result.best)}, {"best_index", result.best_index}, {"leaderboard", board}};
}

}  // namespace cforge
