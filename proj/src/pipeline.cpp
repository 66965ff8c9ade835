#include "cforge/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cforge/error.hpp"
#include "cforge/parallel.hpp"
#include "cforge/random.hpp"

namespace cforge {

using nlohmann::json;

namespace {

// Seed streams: 0 for the global step, lemma index + 1 for local steps.
constexpr std::uint64_t kGlobalStream = 0;

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_number(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::kParameter, "bad number '" + text + "' in " + context);
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

Matrix gather_rows(const Matrix& source, std::size_t begin, std::size_t end) {
  Matrix out(end - begin, source.cols());
  for (std::size_t i = begin; i < end; ++i) {
    auto src = source.row(i);
    std::copy(src.begin(), src.end(), out.row(i - begin).begin());
  }
  return out;
}

ClusterAssignment cluster_level(const Matrix& x, const LevelConfig& level, std::size_t kmeans_k,
                                const PipelineConfig& config, std::uint64_t seed, std::size_t threads) {
  const std::size_t n = x.rows();
  if (level.algorithm == Algorithm::kIdentity || n == 1) return singleton_assignment(n);
  if (level.algorithm == Algorithm::kKMeans) {
    return kmeans(x, kmeans_k, seed, config.max_iter, threads).assignment;
  }
  const auto distances = DistanceMatrix::compute(x, config.metric, threads);
  const auto stats = pairwise_distance_stats(distances, config.sample_cap, seed);
  return agglomerate(distances, level.linkage, derive_threshold(stats, level.nu)).assignment;
}

void check_vectors(const Corpus& corpus, const Matrix& vectors) {
  if (vectors.rows() != corpus.num_occurrences()) {
    throw Error(ErrorKind::kConsistency, "expected " + std::to_string(corpus.num_occurrences()) +
                                             " occurrence vectors, got " + std::to_string(vectors.rows()));
  }
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kLocalOnly: return "local";
    case Mode::kGlobalOnly: return "global";
    case Mode::kBilevel: return "bilevel";
  }
  return "bilevel";
}

Mode parse_mode(const std::string& name) {
  if (name == "local" || name == "local-only") return Mode::kLocalOnly;
  if (name == "global" || name == "global-only") return Mode::kGlobalOnly;
  if (name == "bilevel" || name == "bi-level") return Mode::kBilevel;
  throw Error(ErrorKind::kParameter, "unknown mode: " + name);
}

LevelConfig parse_level(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw Error(ErrorKind::kParameter, "empty algorithm spec");
  LevelConfig level;
  const auto& name = parts[0];
  if (name == "identity") {
    if (parts.size() != 1) throw Error(ErrorKind::kParameter, "identity takes no options: " + text);
    level.algorithm = Algorithm::kIdentity;
    return level;
  }
  if (name == "kmeans") {
    level.algorithm = Algorithm::kKMeans;
  } else if (name == "agglo" || name == "agglomerative") {
    level.algorithm = Algorithm::kAgglomerative;
  } else {
    throw Error(ErrorKind::kParameter, "unknown algorithm in '" + text + "'");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& part = parts[i];
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      if (level.algorithm != Algorithm::kAgglomerative) {
        throw Error(ErrorKind::kParameter, "unexpected option '" + part + "' in '" + text + "'");
      }
      level.linkage = parse_linkage(part);
      continue;
    }
    const auto key = part.substr(0, eq);
    auto value = part.substr(eq + 1);
    if (key == "k" && level.algorithm == Algorithm::kKMeans) {
      const double k = parse_number(value, text);
      if (k < 1 || k != std::floor(k)) throw Error(ErrorKind::kParameter, "k must be a positive integer");
      level.k = static_cast<std::size_t>(k);
    } else if (key == "pi" && level.algorithm == Algorithm::kKMeans) {
      const bool percent = !value.empty() && value.back() == '%';
      if (percent) value.pop_back();
      level.pi = parse_number(value, text) / (percent ? 100.0 : 1.0);
    } else if (key == "nu" && level.algorithm == Algorithm::kAgglomerative) {
      level.nu = parse_number(value, text);
    } else if (key == "linkage" && level.algorithm == Algorithm::kAgglomerative) {
      level.linkage = parse_linkage(value);
    } else {
      throw Error(ErrorKind::kParameter, "unexpected option '" + part + "' in '" + text + "'");
    }
  }
  return level;
}

std::string format_level(const LevelConfig& level, bool global) {
  switch (level.algorithm) {
    case Algorithm::kIdentity: return "identity";
    case Algorithm::kKMeans:
      return global ? "kmeans:pi=" + format_number(level.pi) : "kmeans:k=" + std::to_string(level.k);
    case Algorithm::kAgglomerative:
      return std::string("agglo:") + to_string(level.linkage) + ":nu=" + format_number(level.nu);
  }
  return "identity";
}

void validate(const PipelineConfig& config) {
  auto check_level = [](const LevelConfig& level, const char* which) {
    if (level.algorithm == Algorithm::kKMeans && level.k == 0) {
      throw Error(ErrorKind::kParameter, std::string(which) + " k must be >= 1");
    }
    if (!std::isfinite(level.nu)) throw Error(ErrorKind::kParameter, std::string(which) + " nu must be finite");
  };
  check_level(config.local, "local");
  check_level(config.global, "global");
  if (config.max_iter == 0) throw Error(ErrorKind::kParameter, "max_iter must be >= 1");
  if (config.sample_cap == 0) throw Error(ErrorKind::kParameter, "sample_cap must be >= 1");
  if (config.mode == Mode::kLocalOnly && config.local.algorithm == Algorithm::kIdentity) {
    throw Error(ErrorKind::kParameter, "identity local step is only valid with a global step");
  }
  if (config.mode != Mode::kLocalOnly) {
    if (config.global.algorithm == Algorithm::kIdentity) {
      throw Error(ErrorKind::kParameter, "global step cannot be identity");
    }
    if (config.global.algorithm == Algorithm::kKMeans && !(config.global.pi > 0.0)) {
      throw Error(ErrorKind::kParameter, "pi must be > 0");
    }
  }
}

json to_json(const PipelineConfig& config) {
  json j = {{"mode", to_string(config.mode)},
            {"metric", to_string(config.metric)},
            {"seed", config.seed},
            {"sample_cap", config.sample_cap},
            {"max_iter", config.max_iter}};
  if (config.mode != Mode::kGlobalOnly) j["local"] = format_level(config.local, false);
  if (config.mode != Mode::kLocalOnly) j["global"] = format_level(config.global, true);
  return j;
}

PipelineConfig config_from_json(const json& j) {
  try {
    PipelineConfig config;
    config.mode = parse_mode(j.value("mode", std::string{"bilevel"}));
    if (j.contains("local")) config.local = parse_level(j.at("local").get<std::string>());
    if (j.contains("global")) config.global = parse_level(j.at("global").get<std::string>());
    if (config.mode == Mode::kGlobalOnly) config.local = LevelConfig{Algorithm::kIdentity};
    config.metric = parse_metric(j.value("metric", std::string{"cosine"}));
    config.seed = j.value("seed", std::uint64_t{0});
    config.sample_cap = j.value("sample_cap", kDefaultSampleCap);
    config.max_iter = j.value("max_iter", kDefaultMaxIter);
    return config;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad pipeline config: ") + e.what());
  }
}

std::string describe(const PipelineConfig& config) {
  std::string out = to_string(config.mode);
  if (config.mode != Mode::kGlobalOnly) out += " local=" + format_level(config.local, false);
  if (config.mode != Mode::kLocalOnly) out += " global=" + format_level(config.global, true);
  return out;
}

std::string local_cache_key(const PipelineConfig& config) {
  return format_level(config.local, false) + "|" + to_string(config.metric) + "|" +
         std::to_string(config.seed) + "|" + std::to_string(config.sample_cap) + "|" +
         std::to_string(config.max_iter);
}

SensePartition run_local(const Corpus& corpus, const Matrix& occurrence_vectors,
                         const PipelineConfig& config, std::size_t threads) {
  check_vectors(corpus, occurrence_vectors);
  SensePartition senses;
  senses.per_lemma.resize(corpus.num_lemmas());
  parallel_for(corpus.num_lemmas(), threads, [&](std::size_t lemma) {
    const auto [begin, end] = corpus.lemma_range(lemma);
    const Matrix x = gather_rows(occurrence_vectors, begin, end);
    senses.per_lemma[lemma] =
        cluster_level(x, config.local, config.local.k, config, mix_seed(config.seed, lemma + 1), 1);
  });
  return senses;
}

SensePartition run_local(const Corpus& corpus, const EmbeddingStore& store, const PipelineConfig& config,
                         std::size_t threads) {
  return run_local(corpus, corpus_vectors(corpus, store), config, threads);
}

Centroids aggregate_centroids(const Corpus& corpus, const Matrix& occurrence_vectors,
                              const SensePartition& senses) {
  check_vectors(corpus, occurrence_vectors);
  Centroids out;
  out.rows = Matrix(senses.total_parts(), occurrence_vectors.cols());
  std::size_t base = 0;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto& local = senses.per_lemma.at(lemma);
    const auto [begin, end] = corpus.lemma_range(lemma);
    std::vector<std::size_t> counts(local.k, 0);
    for (std::size_t o = begin; o < end; ++o) {
      const std::size_t part = local.labels[o - begin];
      auto dst = out.rows.row(base + part);
      auto src = occurrence_vectors.row(o);
      for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
      ++counts[part];
    }
    for (std::size_t part = 0; part < local.k; ++part) {
      auto dst = out.rows.row(base + part);
      for (double& v : dst) v /= static_cast<double>(counts[part]);
      out.provenance.emplace_back(lemma, part);
    }
    base += local.k;
  }
  return out;
}

Centroids aggregate_centroids(const Corpus& corpus, const EmbeddingStore& store,
                              const SensePartition& senses) {
  return aggregate_centroids(corpus, corpus_vectors(corpus, store), senses);
}

std::size_t global_kmeans_k(double pi, std::size_t num_lemmas, std::size_t num_centroids) {
  const double raw = std::round(pi * static_cast<double>(num_lemmas));
  const auto k = raw < 1.0 ? std::size_t{1} : static_cast<std::size_t>(raw);
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(1, num_centroids));
}

ConceptPartition run_global(const Corpus& corpus, const Centroids& centroids, const SensePartition& senses,
                            const PipelineConfig& config, std::size_t threads) {
  if (centroids.rows.rows() == 0) throw Error(ErrorKind::kDegenerateInput, "no centroids to cluster");
  const std::size_t k = global_kmeans_k(config.global.pi, corpus.num_lemmas(), centroids.rows.rows());
  const auto global = cluster_level(centroids.rows, config.global, k, config,
                                    mix_seed(config.seed, kGlobalStream), threads);

  std::vector<std::size_t> first_row(corpus.num_lemmas() + 1, 0);
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    first_row[lemma + 1] = first_row[lemma] + senses.per_lemma.at(lemma).k;
  }
  std::vector<std::size_t> labels(corpus.num_occurrences());
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) {
      labels[o] = global.labels[first_row[lemma] + senses.per_lemma[lemma].labels[o - begin]];
    }
  }
  const auto canonical = canonical_assignment(labels);
  return {canonical.labels, canonical.k};
}

ConceptPartition concepts_from_senses(const Corpus& corpus, const SensePartition& senses) {
  std::vector<std::size_t> labels(corpus.num_occurrences());
  std::size_t base = 0;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) labels[o] = base + senses.per_lemma.at(lemma).labels[o - begin];
    base += senses.per_lemma[lemma].k;
  }
  const auto canonical = canonical_assignment(labels);
  return {canonical.labels, canonical.k};
}

InductionResult run_bilevel(const Corpus& corpus, const Matrix& occurrence_vectors,
                            const PipelineConfig& config, std::size_t threads) {
  InductionResult result;
  result.senses = run_local(corpus, occurrence_vectors, config, threads);
  const auto centroids = aggregate_centroids(corpus, occurrence_vectors, result.senses);
  result.concepts = run_global(corpus, centroids, result.senses, config, threads);
  result.words = derive_word_clustering(result.concepts, corpus);
  return result;
}

InductionResult run_bilevel(const Corpus& corpus, const EmbeddingStore& store, const PipelineConfig& config,
                            std::size_t threads) {
  return run_bilevel(corpus, corpus_vectors(corpus, store), config, threads);
}

InductionResult run_global_only(const Corpus& corpus, const Matrix& occurrence_vectors,
                                const PipelineConfig& config, std::size_t threads) {
  PipelineConfig identity = config;
  identity.local = LevelConfig{Algorithm::kIdentity};
  return run_bilevel(corpus, occurrence_vectors, identity, threads);
}

InductionResult run_global_only(const Corpus& corpus, const EmbeddingStore& store,
                                const PipelineConfig& config, std::size_t threads) {
  return run_global_only(corpus, corpus_vectors(corpus, store), config, threads);
}

InductionResult run_local_only(const Corpus& corpus, const Matrix& occurrence_vectors,
                               const PipelineConfig& config, std::size_t threads) {
  InductionResult result;
  result.senses = run_local(corpus, occurrence_vectors, config, threads);
  result.concepts = concepts_from_senses(corpus, result.senses);
  result.words = derive_word_clustering(result.concepts, corpus);
  return result;
}

InductionResult run_pipeline(const Corpus& corpus, const Matrix& occurrence_vectors,
                             const PipelineConfig& config, std::size_t threads) {
  validate(config);
  switch (config.mode) {
    case Mode::kLocalOnly: return run_local_only(corpus, occurrence_vectors, config, threads);
    case Mode::kGlobalOnly: return run_global_only(corpus, occurrence_vectors, config, threads);
    case Mode::kBilevel: return run_bilevel(corpus, occurrence_vectors, config, threads);
  }
  return {};
}

WordClustering derive_word_clustering(const ConceptPartition& concepts, const Corpus& corpus) {
  if (concepts.labels.size() != corpus.num_occurrences()) {
    throw Error(ErrorKind::kConsistency, "concept partition does not cover the corpus");
  }
  std::vector<std::set<std::size_t>> members(concepts.p);
  for (std::size_t o = 0; o < concepts.labels.size(); ++o) {
    members.at(concepts.labels[o]).insert(corpus.occurrences()[o].lemma);
  }
  WordClustering words;
  words.clusters.reserve(concepts.p);
  for (const auto& lemma_ids : members) {
    auto& cluster = words.clusters.emplace_back();
    for (std::size_t l : lemma_ids) cluster.push_back(corpus.lemmas()[l]);
  }
  return words;
}

WordClustering baseline_lemmas(const Corpus& corpus) {
  WordClustering words;
  for (const auto& lemma : corpus.lemmas()) words.clusters.push_back({lemma});
  return words;
}

WordClustering baseline_oracle_wsi(const Corpus& corpus, const GoldClusterings& gold) {
  WordClustering words;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    std::set<std::string> concepts;
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) {
      const auto& id = corpus.occurrences()[o].id;
      auto it = gold.concept_partition.find(id);
      if (it == gold.concept_partition.end()) {
        throw Error(ErrorKind::kMissingAnnotation, "occurrence without gold concept: " + id);
      }
      concepts.insert(it->second);
    }
    for (std::size_t c = 0; c < concepts.size(); ++c) words.clusters.push_back({corpus.lemmas()[lemma]});
  }
  return words;
}

std::vector<std::string> check_constraints(const Corpus& corpus, const SensePartition& senses,
                                           const ConceptPartition& concepts) {
  std::vector<std::string> violations;
  if (senses.per_lemma.size() != corpus.num_lemmas()) {
    violations.push_back("constraint 1: sense partition has " + std::to_string(senses.per_lemma.size()) +
                         " lemma entries for " + std::to_string(corpus.num_lemmas()) + " lemmas");
    return violations;
  }
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto& local = senses.per_lemma[lemma];
    const auto& name = corpus.lemmas()[lemma];
    if (local.labels.size() != corpus.lemma_size(lemma)) {
      violations.push_back("constraint 2: lemma " + name + " labels " + std::to_string(local.labels.size()) +
                           " of " + std::to_string(corpus.lemma_size(lemma)) + " occurrences");
      continue;
    }
    std::vector<std::size_t> used(local.k, 0);
    for (std::size_t label : local.labels) {
      if (label >= local.k) {
        violations.push_back("constraint 2: lemma " + name + " has label outside 0..k-1");
      } else {
        ++used[label];
      }
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
      violations.push_back("constraint 1: lemma " + name + " has an empty sense");
    }
  }
  if (concepts.labels.size() != corpus.num_occurrences()) {
    violations.push_back("constraint 3: concept partition covers " + std::to_string(concepts.labels.size()) +
                         " of " + std::to_string(corpus.num_occurrences()) + " occurrences");
    return violations;
  }
  std::vector<bool> seen(concepts.p, false);
  for (std::size_t label : concepts.labels) {
    if (label >= concepts.p) {
      violations.push_back("constraint 3: concept label outside 0..p-1");
      return violations;
    }
    seen[label] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    violations.push_back("constraint 3: concept partition has an empty cluster");
  }
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto& local = senses.per_lemma[lemma];
    if (local.labels.size() != corpus.lemma_size(lemma)) continue;
    const auto [begin, end] = corpus.lemma_range(lemma);
    std::map<std::size_t, std::size_t> concept_of_sense;
    for (std::size_t o = begin; o < end; ++o) {
      auto [it, inserted] = concept_of_sense.emplace(local.labels[o - begin], concepts.labels[o]);
      if (!inserted && it->second != concepts.labels[o]) {
        violations.push_back("constraint 4: sense " + std::to_string(it->first) + " of lemma " +
                             corpus.lemmas()[lemma] + " spans several concepts");
        break;
      }
    }
  }
  return violations;
}

}  // namespace cforge
