#include "cforge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cforge/artifacts.hpp"
#include "cforge/concept_embeddings.hpp"
#include "cforge/corpus.hpp"
#include "cforge/embedding_store.hpp"
#include "cforge/error.hpp"
#include "cforge/metrics.hpp"
#include "cforge/parallel.hpp"
#include "cforge/pipeline.hpp"
#include "cforge/sweep.hpp"

namespace cforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::size_t threads = 0;

  std::string store_path;
  std::string gold_path;
  std::string out_path;
  std::size_t min_occ = kDefaultMinOccurrences;
  std::uint64_t seed = 0;
  double dev_fraction = 0.1;
  std::string split = "full";

  // induce
  std::string config_path;
  std::string mode = "bilevel";
  std::string local = "agglo:average:nu=0";
  std::string global = "agglo:average:nu=4.5";
  std::string metric = "cosine";
  std::size_t sample_cap = kDefaultSampleCap;
  std::size_t max_iter = kDefaultMaxIter;

  // evaluate / export
  std::string pred_path;
  std::string baseline;
  std::string system;

  // sweep
  std::string grid_path;
  std::string preset;

  // ingest
  std::string in_path;

  // wic
  std::string table_path;
  std::string vectors_path;
  std::string data_path;
  std::string wic_gold_path;
};

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : started_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["argv"] = args;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j_["started_at"] = stamp;
    j_["inputs"] = json::object();
    j_["outputs"] = json::array();
  }

  void input(const std::string& path) {
    if (!path.empty()) j_["inputs"][path] = {{"fnv1a64", file_digest(path)}};
  }
  void output(const std::string& path) { j_["outputs"].push_back(path); }
  void set(const std::string& key, json value) { j_[key] = std::move(value); }

  void write(const fs::path& dir) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    j_["wall_clock_seconds"] = elapsed;
    write_json_file((dir / "manifest.json").string(), j_);
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point started_;
};

fs::path prepare_out_dir(const std::string& path) {
  fs::path dir(path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + path + ": " + ec.message());
  return dir;
}

// Store records with gold concepts overlaid from an annotation file by id.
std::vector<OccurrenceRecord> store_records_with_gold(const EmbeddingStore& store, const std::string& gold_path) {
  auto records = store.records();
  if (gold_path.empty()) return records;
  std::map<std::string, std::optional<std::string>> gold_by_id;
  for (auto& rec : read_annotation_jsonl_file(gold_path)) gold_by_id[rec.id] = rec.gold_concept;
  for (auto& rec : records) {
    auto it = gold_by_id.find(rec.id);
    if (it != gold_by_id.end()) rec.gold_concept = it->second;
  }
  return records;
}

struct LoadedData {
  std::optional<EmbeddingStore> store;
  std::optional<Corpus> corpus;
};

// Corpus from --store (with optional --gold overlay) or from --gold alone.
LoadedData load_corpus_inputs(const Options& opt, Manifest& manifest, bool need_store) {
  LoadedData data;
  if (!opt.store_path.empty()) {
    data.store.emplace(read_store_any(opt.store_path));
    manifest.input(opt.store_path);
    manifest.input(opt.gold_path);
    data.corpus.emplace(load_corpus(store_records_with_gold(*data.store, opt.gold_path), opt.min_occ));
  } else if (need_store) {
    throw Error(ErrorKind::kParameter, "--store is required");
  } else if (!opt.gold_path.empty()) {
    manifest.input(opt.gold_path);
    data.corpus.emplace(load_corpus(read_annotation_jsonl_file(opt.gold_path), opt.min_occ));
  } else {
    throw Error(ErrorKind::kParameter, "--store or --gold is required");
  }
  return data;
}

SplitSpec make_split(const std::string& name, const GoldClusterings& gold, const Options& opt) {
  switch (parse_split_name(name)) {
    case SplitName::kFull: return make_full_split(gold);
    case SplitName::kDev: return make_dev_split(gold, opt.dev_fraction, opt.seed);
    case SplitName::kSynon: return make_synon_split(gold);
  }
  return make_full_split(gold);
}

PipelineConfig resolve_config(const Options& opt, const CLI::App& cmd, std::size_t& min_occ) {
  PipelineConfig config;
  config.local = parse_level(opt.local);
  config.global = parse_level(opt.global);
  if (!opt.config_path.empty()) {
    const json file = read_json_file(opt.config_path);
    config = config_from_json(file);
    if (!file.contains("local")) config.local = parse_level(opt.local);
    if (!file.contains("global")) config.global = parse_level(opt.global);
    if (file.contains("min_occ") && cmd.count("--min-occ") == 0) min_occ = file.at("min_occ").get<std::size_t>();
  }
  if (opt.config_path.empty() || cmd.count("--mode") > 0) config.mode = parse_mode(opt.mode);
  if (cmd.count("--local") > 0) config.local = parse_level(opt.local);
  if (cmd.count("--global") > 0) config.global = parse_level(opt.global);
  if (opt.config_path.empty() || cmd.count("--metric") > 0) config.metric = parse_metric(opt.metric);
  if (opt.config_path.empty() || cmd.count("--seed") > 0) config.seed = opt.seed;
  if (opt.config_path.empty() || cmd.count("--sample-cap") > 0) config.sample_cap = opt.sample_cap;
  if (opt.config_path.empty() || cmd.count("--max-iter") > 0) config.max_iter = opt.max_iter;
  if (config.mode == Mode::kGlobalOnly) config.local = LevelConfig{Algorithm::kIdentity};
  validate(config);
  return config;
}

int run_ingest(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("ingest", args);
  manifest.input(opt.in_path);
  manifest.input(opt.gold_path);

  // The JSONL mirror keeps POS tags, so it is parsed as raw rows and filtered here.
  std::ifstream probe(opt.in_path, std::ios::binary);
  if (!probe) throw Error(ErrorKind::kIo, "cannot open " + opt.in_path);
  char head[4] = {};
  probe.read(head, 4);
  EmbeddingRows raw;
  if (probe.gcount() == 4 && std::equal(head, head + 4, kStoreMagic)) {
    const auto source = read_store_file(opt.in_path);
    raw.dim = source.dim();
    raw.records = source.records();
    raw.values.assign(source.values().begin(), source.values().end());
  } else {
    std::ifstream in(opt.in_path);
    raw = read_store_jsonl(in);
  }
  if (!opt.gold_path.empty()) {
    std::map<std::string, std::optional<std::string>> gold_by_id;
    for (auto& rec : read_annotation_jsonl_file(opt.gold_path)) gold_by_id[rec.id] = rec.gold_concept;
    for (auto& rec : raw.records) {
      if (auto it = gold_by_id.find(rec.id); it != gold_by_id.end()) rec.gold_concept = it->second;
    }
  }
  const Corpus corpus = load_corpus(raw.records, opt.min_occ);
  EmbeddingRows kept;
  kept.dim = raw.dim;
  for (std::size_t r = 0; r < raw.records.size(); ++r) {
    if (!corpus.find_occurrence(raw.records[r].id)) continue;
    auto rec = raw.records[r];
    rec.lemma = fold_case(rec.lemma);
    kept.records.push_back(std::move(rec));
    kept.values.insert(kept.values.end(), raw.values.begin() + static_cast<std::ptrdiff_t>(r * raw.dim),
                       raw.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * raw.dim));
  }
  const EmbeddingStore store(std::move(kept));

  const fs::path target(opt.out_path);
  if (target.has_parent_path()) prepare_out_dir(target.parent_path().string());
  if (target.extension() == ".jsonl") {
    std::ofstream o(target);
    if (!o) throw Error(ErrorKind::kIo, "cannot open " + opt.out_path);
    write_store_jsonl(store, o);
  } else {
    write_store_file(store, target.string());
  }
  const json summary = {{"records", store.size()}, {"lemmas", corpus.num_lemmas()}, {"dim", store.dim()}};
  out << summary.dump() << '\n';
  return 0;
}

int run_stats(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("stats", args);
  const auto data = load_corpus_inputs(opt, manifest, false);
  const auto gold = make_gold(*data.corpus);
  json report = {
      {"full", to_json(corpus_stats(*data.corpus, gold, make_full_split(gold)))},
      {"dev", to_json(corpus_stats(*data.corpus, gold, make_dev_split(gold, opt.dev_fraction, opt.seed)))},
      {"synon", to_json(corpus_stats(*data.corpus, gold, make_synon_split(gold)))},
  };
  if (!opt.out_path.empty()) {
    const auto dir = prepare_out_dir(opt.out_path);
    write_json_file((dir / "stats.json").string(), report);
    manifest.output((dir / "stats.json").string());
    manifest.set("seed", opt.seed);
    manifest.write(dir);
  }
  out << report.dump(2) << '\n';
  return 0;
}

int run_induce(const Options& opt, const CLI::App& cmd, const std::vector<std::string>& args, std::ostream& out,
               std::size_t threads) {
  Manifest manifest("induce", args);
  std::size_t min_occ = opt.min_occ;
  const auto config = resolve_config(opt, cmd, min_occ);
  manifest.input(opt.config_path);
  Options adjusted = opt;
  adjusted.min_occ = min_occ;
  const auto data = load_corpus_inputs(adjusted, manifest, true);
  const Matrix vectors = corpus_vectors(*data.corpus, *data.store);
  const auto result = run_pipeline(*data.corpus, vectors, config, threads);
  const auto violations = check_constraints(*data.corpus, result.senses, result.concepts);
  if (!violations.empty()) throw Error(ErrorKind::kConsistency, "pipeline output violates " + violations.front());

  json config_json = to_json(config);
  config_json["min_occ"] = min_occ;
  const json clusters = clusters_to_json(*data.corpus, result, config_json, config.seed);

  const auto dir = prepare_out_dir(opt.out_path);
  write_json_file((dir / "clusters.json").string(), clusters);
  manifest.output((dir / "clusters.json").string());
  manifest.set("config", config_json);
  manifest.set("seed", config.seed);
  manifest.set("threads", threads);
  manifest.write(dir);
  out << json{{"concepts", result.concepts.p}, {"senses", result.senses.total_parts()},
              {"occurrences", data.corpus->num_occurrences()}, {"lemmas", data.corpus->num_lemmas()}}
             .dump()
      << '\n';
  return 0;
}

ConceptPartition lemma_partition(const Corpus& corpus) {
  ConceptPartition p;
  for (const auto& occ : corpus.occurrences()) p.labels.push_back(occ.lemma);
  p.p = corpus.num_lemmas();
  return p;
}

ConceptPartition oracle_wsi_partition(const Corpus& corpus, const GoldClusterings& gold) {
  std::map<std::pair<std::size_t, std::string>, std::size_t> ids;
  ConceptPartition p;
  for (const auto& occ : corpus.occurrences()) {
    auto it = gold.concept_partition.find(occ.id);
    if (it == gold.concept_partition.end()) {
      throw Error(ErrorKind::kMissingAnnotation, "occurrence without gold concept: " + occ.id);
    }
    p.labels.push_back(ids.emplace(std::make_pair(occ.lemma, it->second), ids.size()).first->second);
  }
  const auto canonical = canonical_assignment(p.labels);
  return {canonical.labels, canonical.k};
}

int run_evaluate(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("evaluate", args);
  if (opt.pred_path.empty() == opt.baseline.empty()) {
    throw Error(ErrorKind::kParameter, "exactly one of --pred or --baseline is required");
  }
  const auto data = load_corpus_inputs(opt, manifest, false);
  const Corpus& corpus = *data.corpus;
  const auto gold = make_gold(corpus);
  const auto split = make_split(opt.split, gold, opt);

  MetricsReport report;
  report.split = opt.split;
  ConceptPartition concepts;
  WordClustering words;
  if (!opt.pred_path.empty()) {
    manifest.input(opt.pred_path);
    auto artifact = clusters_from_json(read_json_file(opt.pred_path), corpus);
    concepts = std::move(artifact.result.concepts);
    words = std::move(artifact.result.words);
    report.system = opt.system.empty() ? describe(config_from_json(artifact.config)) : opt.system;
  } else if (opt.baseline == "lemmas") {
    concepts = lemma_partition(corpus);
    words = baseline_lemmas(corpus);
    report.system = opt.system.empty() ? "baseline:lemmas" : opt.system;
  } else if (opt.baseline == "oracle-wsi") {
    concepts = oracle_wsi_partition(corpus, gold);
    words = baseline_oracle_wsi(corpus, gold);
    report.system = opt.system.empty() ? "baseline:oracle-wsi" : opt.system;
  } else {
    throw Error(ErrorKind::kParameter, "unknown baseline: " + opt.baseline);
  }

  report.ci = bcubed_ci_on_split(concepts, corpus, gold, split);
  report.wsi_f1 = bcubed_wsi(concepts, gold, corpus, 1.0, &split.occurrence_ids).f_beta;
  report.rho = spearman_rho(predicted_sense_counts(concepts, corpus, &split.occurrence_ids),
                            gold_sense_counts(gold, corpus, &split.occurrence_ids));
  report.n_clusters = words.clusters.size();
  const json metrics = to_json(report);

  if (!opt.out_path.empty()) {
    const auto dir = prepare_out_dir(opt.out_path);
    write_json_file((dir / "metrics.json").string(), metrics);
    manifest.output((dir / "metrics.json").string());
    manifest.set("seed", opt.seed);
    manifest.write(dir);
  }
  out << metrics.dump(2) << '\n';
  return 0;
}

std::vector<PipelineConfig> preset_grid(const std::string& preset, std::uint64_t seed) {
  // <mode>:<local algorithm>:<global algorithm>, e.g. bilevel:agglo:agglo.
  std::vector<std::string> parts;
  std::istringstream in(preset);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw Error(ErrorKind::kParameter, "preset must be <mode>:<local>:<global>");
  auto algorithm = [](const std::string& name) {
    if (name == "kmeans") return Algorithm::kKMeans;
    if (name == "agglo") return Algorithm::kAgglomerative;
    if (name == "identity" || name == "none") return Algorithm::kIdentity;
    throw Error(ErrorKind::kParameter, "unknown algorithm in preset: " + name);
  };
  return default_grid(parse_mode(parts[0]), algorithm(parts[1]), algorithm(parts[2]), seed);
}

int run_sweep(const Options& opt, const std::vector<std::string>& args, std::ostream& out, std::size_t threads) {
  Manifest manifest("sweep", args);
  if (opt.grid_path.empty() == opt.preset.empty()) {
    throw Error(ErrorKind::kParameter, "exactly one of --grid or --preset is required");
  }
  std::vector<PipelineConfig> grid;
  if (!opt.grid_path.empty()) {
    manifest.input(opt.grid_path);
    grid = grid_from_json(read_json_file(opt.grid_path), opt.seed);
  } else {
    grid = preset_grid(opt.preset, opt.seed);
  }
  const auto data = load_corpus_inputs(opt, manifest, true);
  const auto gold = make_gold(*data.corpus);
  const auto dev = make_dev_split(gold, opt.dev_fraction, opt.seed);
  const Matrix vectors = corpus_vectors(*data.corpus, *data.store);
  const auto result = sweep(*data.corpus, vectors, gold, dev, grid, threads);

  json report = to_json(result);
  report["dev_concepts"] = dev.concept_ids.size();
  report["dev_fraction"] = opt.dev_fraction;
  json best = to_json(result.best);
  best["min_occ"] = opt.min_occ;

  const auto dir = prepare_out_dir(opt.out_path);
  write_json_file((dir / "sweep.json").string(), report);
  write_json_file((dir / "best_config.json").string(), best);
  manifest.output((dir / "sweep.json").string());
  manifest.output((dir / "best_config.json").string());
  manifest.set("seed", opt.seed);
  manifest.set("threads", threads);
  manifest.write(dir);
  out << json{{"best", best}, {"score", result.leaderboard[result.best_index].score},
              {"configs", result.leaderboard.size()}}
             .dump(2)
      << '\n';
  return 0;
}

int run_export(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("export-embeddings", args);
  const auto data = load_corpus_inputs(opt, manifest, true);
  manifest.input(opt.pred_path);
  const auto artifact = clusters_from_json(read_json_file(opt.pred_path), *data.corpus);
  const auto table = build_concept_embeddings(*data.corpus, *data.store, artifact.result.concepts);
  const auto store = table_to_store(table);

  const auto dir = prepare_out_dir(opt.out_path);
  write_store_file(store, (dir / "concepts.ciem").string());
  manifest.output((dir / "concepts.ciem").string());
  manifest.write(dir);
  out << json{{"concepts", table.size()}, {"dim", table.dim()}}.dump() << '\n';
  return 0;
}

int run_wic(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("wic", args);
  for (const auto* p : {&opt.table_path, &opt.vectors_path, &opt.data_path, &opt.wic_gold_path}) manifest.input(*p);
  const auto table = table_from_store(read_store_any(opt.table_path));
  const auto vectors = read_store_any(opt.vectors_path);
  std::ifstream data_in(opt.data_path);
  if (!data_in) throw Error(ErrorKind::kIo, "cannot open " + opt.data_path);
  std::ifstream gold_in(opt.wic_gold_path);
  if (!gold_in) throw Error(ErrorKind::kIo, "cannot open " + opt.wic_gold_path);
  const auto rows = read_wic_data(data_in);
  const auto labels = read_wic_gold(gold_in);
  if (rows.size() != labels.size()) {
    throw Error(ErrorKind::kConsistency, "WiC data has " + std::to_string(rows.size()) + " rows but gold has " +
                                             std::to_string(labels.size()));
  }
  auto lookup = [&](const std::string& id) {
    auto row = vectors.find(id);
    if (!row) throw Error(ErrorKind::kLookup, "no vector for WiC occurrence " + id);
    auto v = vectors.vector(*row);
    return std::vector<double>(v.begin(), v.end());
  };
  std::vector<WicPair> pairs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].pos != "N") continue;
    const auto base = std::to_string(i);
    pairs.push_back({lookup(base + "/1"), lookup(base + "/2"), labels[i]});
  }
  const auto outcome = wic_evaluate(pairs, table);
  std::size_t true_count = 0;
  for (const auto& p : pairs) true_count += p.same ? 1 : 0;
  const json report = {{"pairs", pairs.size()},
                       {"accuracy", outcome.accuracy},
                       {"true_rate", static_cast<double>(true_count) / static_cast<double>(pairs.size())}};
  if (!opt.out_path.empty()) {
    const auto dir = prepare_out_dir(opt.out_path);
    write_json_file((dir / "metrics.json").string(), report);
    manifest.output((dir / "metrics.json").string());
    manifest.write(dir);
  }
  out << report.dump(2) << '\n';
  return 0;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Concept induction from contextual occurrence embeddings", "concept-forge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", opt.threads, "Worker threads (default: CONCEPT_FORGE_THREADS or all cores)");

  auto add_corpus_options = [&](CLI::App* cmd) {
    cmd->add_option("--store", opt.store_path, "Embedding store (.ciem binary or JSONL mirror)");
    cmd->add_option("--gold", opt.gold_path, "Annotation JSONL with gold concepts");
    cmd->add_option("--min-occ", opt.min_occ, "Minimum occurrences per lemma");
  };

  auto* ingest = app.add_subcommand("ingest", "Filter records and write a canonical embedding store");
  ingest->add_option("--in", opt.in_path, "Input store or JSONL mirror")->required();
  ingest->add_option("--out", opt.out_path, "Output path (.jsonl writes the mirror format)")->required();
  ingest->add_option("--gold", opt.gold_path, "Annotation JSONL overriding gold concepts");
  ingest->add_option("--min-occ", opt.min_occ, "Minimum occurrences per lemma");

  auto* stats = app.add_subcommand("stats", "Corpus statistics for the full, dev and synon splits");
  add_corpus_options(stats);
  stats->add_option("--dev-fraction", opt.dev_fraction, "Fraction of concepts in the dev split");
  stats->add_option("--seed", opt.seed, "Seed for the dev split");
  stats->add_option("--out", opt.out_path, "Output directory");

  auto* induce = app.add_subcommand("induce", "Induce concepts");
  add_corpus_options(induce);
  induce->add_option("--config", opt.config_path, "JSON pipeline config; flags win on conflict");
  induce->add_option("--mode", opt.mode, "local | global | bilevel");
  induce->add_option("--local", opt.local, "Local step, e.g. agglo:average:nu=0.0 or kmeans:k=3");
  induce->add_option("--global", opt.global, "Global step, e.g. agglo:average:nu=4.5 or kmeans:pi=120%");
  induce->add_option("--metric", opt.metric, "Agglomerative distance: cosine | euclidean");
  induce->add_option("--seed", opt.seed, "Seed for all randomness");
  induce->add_option("--sample-cap", opt.sample_cap, "Pair cap for distance statistics");
  induce->add_option("--max-iter", opt.max_iter, "k-means iteration cap");
  induce->add_option("--out", opt.out_path, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a clustering or a baseline");
  add_corpus_options(evaluate);
  evaluate->add_option("--pred", opt.pred_path, "clusters.json from induce");
  evaluate->add_option("--baseline", opt.baseline, "lemmas | oracle-wsi");
  evaluate->add_option("--split", opt.split, "full | dev | synon");
  evaluate->add_option("--dev-fraction", opt.dev_fraction, "Fraction of concepts in the dev split");
  evaluate->add_option("--seed", opt.seed, "Seed for the dev split");
  evaluate->add_option("--system", opt.system, "System name for the report");
  evaluate->add_option("--out", opt.out_path, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Select hyperparameters on the dev split");
  add_corpus_options(sweep_cmd);
  sweep_cmd->add_option("--grid", opt.grid_path, "JSON grid file");
  sweep_cmd->add_option("--preset", opt.preset, "<mode>:<local>:<global>, e.g. bilevel:agglo:agglo");
  sweep_cmd->add_option("--dev-fraction", opt.dev_fraction, "Fraction of concepts in the dev split");
  sweep_cmd->add_option("--seed", opt.seed, "Seed for the dev split and the pipeline");
  sweep_cmd->add_option("--out", opt.out_path, "Output directory")->required();

  auto* wic = app.add_subcommand("wic", "Word-in-Context accuracy with a concept table");
  wic->add_option("--table", opt.table_path, "Concept table from export-embeddings")->required();
  wic->add_option("--vectors", opt.vectors_path, "Store with ids <row>/1 and <row>/2")->required();
  wic->add_option("--data", opt.data_path, "WiC data file")->required();
  wic->add_option("--gold", opt.wic_gold_path, "WiC gold file (T/F lines)")->required();
  wic->add_option("--out", opt.out_path, "Output directory");

  auto* export_cmd = app.add_subcommand("export-embeddings", "Write the concept-aware embedding table");
  add_corpus_options(export_cmd);
  export_cmd->add_option("--pred", opt.pred_path, "clusters.json from induce")->required();
  export_cmd->add_option("--out", opt.out_path, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    err << app.help();
    return 2;
  }

  const std::size_t threads = resolve_threads(opt.threads);
  try {
    if (ingest->parsed()) return run_ingest(opt, args, out);
    if (stats->parsed()) return run_stats(opt, args, out);
    if (induce->parsed()) return run_induce(opt, *induce, args, out, threads);
    if (evaluate->parsed()) return run_evaluate(opt, args, out);
    if (sweep_cmd->parsed()) return run_sweep(opt, args, out, threads);
    if (wic->parsed()) return run_wic(opt, args, out);
    if (export_cmd->parsed()) return run_export(opt, args, out);
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::kParameter ? 2 : 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace cforge
