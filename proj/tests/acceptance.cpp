// Acceptance suite: one PASS/FAIL line per criterion. Exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cforge/clustering.hpp"
#include "cforge/corpus.hpp"
#include "cforge/embedding_store.hpp"
#include "cforge/metrics.hpp"
#include "cforge/parallel.hpp"
#include "cforge/pipeline.hpp"
#include "cforge/random.hpp"
#include "cforge/sweep.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace cforge;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::kFail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Status::kPass : Status::kFail, std::move(d)}; }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome extended_bcubed_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto lemmas = synthetic::lexicon(1 + rng.below(8));
    const auto pred = synthetic::random_soft(rng, lemmas, 4);
    const auto gold = synthetic::random_soft(rng, lemmas, 4);
    const auto got = bcubed_ci(pred, gold);
    const auto want = oracle::extended_bcubed(pred, gold);
    worst = std::max({worst, std::abs(got.precision - want.precision), std::abs(got.recall - want.recall),
                      std::abs(got.f_beta - want.f1)});
  }
  const double secs = seconds_since(t0);
  return check(worst <= 1e-12 && secs < 5.0, "1000 cases, max |diff| " + std::to_string(worst) + ", " +
                                                  fmt(secs, 2) + " s");
}

Outcome classic_degeneration() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto lemmas = synthetic::lexicon(n);
    std::vector<std::size_t> p(n), g(n);
    for (auto& x : p) x = rng.below(5);
    for (auto& x : g) x = rng.below(5);
    const auto ext = bcubed_ci(synthetic::hard_clustering(lemmas, p), synthetic::hard_clustering(lemmas, g));
    const auto classic = oracle::classic_bcubed(p, g);
    worst = std::max({worst, std::abs(ext.precision - classic.precision), std::abs(ext.recall - classic.recall)});
  }
  return check(worst <= 1e-12, "500 hard partitions, max |diff| " + std::to_string(worst));
}

Outcome baseline_identities() {
  std::vector<double> precisions;
  auto score = [&](const Corpus& corpus) {
    const auto gold = make_gold(corpus);
    const auto reference = gold_word_clustering(gold);
    precisions.push_back(bcubed_ci(baseline_lemmas(corpus), reference).precision);
    precisions.push_back(bcubed_ci(baseline_oracle_wsi(corpus, gold), reference).precision);
  };
  score(synthetic::planted_corpus(1).corpus());
  for (std::uint64_t seed = 0; seed < 50; ++seed) score(synthetic::random_corpus(seed).corpus());
  bool all_one = true;
  for (double p : precisions) all_one = all_one && p == 1.0;

  // Gold {k1: {aaa, bbb}, k2: {aaa}, k3: {ccc}}: d_lex = 4/3.
  std::vector<OccurrenceRecord> recs;
  auto add = [&](const char* id, const char* lemma, const char* concept_id) {
    recs.push_back({id, lemma, "n", id, 0, std::string(concept_id)});
  };
  add("a1", "aaa", "k1");
  add("a2", "aaa", "k2");
  add("b1", "bbb", "k1");
  add("c1", "ccc", "k3");
  const Corpus corpus = load_corpus(recs, 1);
  const auto gold = make_gold(corpus);
  const auto reference = gold_word_clustering(gold);
  const double r_lemmas = bcubed_ci(baseline_lemmas(corpus), reference).recall;
  const double r_oracle = bcubed_ci(baseline_oracle_wsi(corpus, gold), reference).recall;
  const bool recalls = std::abs(r_lemmas - 1.75 / 3.0) <= 1e-12 && std::abs(r_oracle - 2.0 / 3.0) <= 1e-12;
  return check(all_one && recalls, std::to_string(precisions.size()) + " baseline runs with P = 1.0; recalls " +
                                       fmt(r_lemmas, 6) + " and " + fmt(r_oracle, 6));
}

Outcome f_beta_spot() {
  const double f = f_beta(0.75, 0.60, 1.0);
  return check(std::abs(f - 0.6667) <= 1e-4, "f_beta(.75, .60) = " + fmt(f, 6));
}

Outcome constraint_validator() {
  std::size_t runs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto data = synthetic::random_corpus(seed);
    const Corpus corpus = data.corpus();
    const Matrix vectors = data.matrix(corpus);
    for (const char* local : {"agglo:average:nu=0", "kmeans:k=2", "identity"}) {
      for (const char* global : {"agglo:average:nu=0.5", "kmeans:pi=1.2"}) {
        for (auto mode : {Mode::kBilevel, Mode::kGlobalOnly, Mode::kLocalOnly}) {
          PipelineConfig c;
          c.mode = mode;
          c.local = mode == Mode::kGlobalOnly ? LevelConfig{Algorithm::kIdentity} : parse_level(local);
          if (mode == Mode::kLocalOnly && c.local.algorithm == Algorithm::kIdentity) continue;
          c.global = parse_level(global);
          c.seed = seed;
          const auto r = run_pipeline(corpus, vectors, c);
          const auto v = check_constraints(corpus, r.senses, r.concepts);
          if (!v.empty()) return fail(describe(c) + " on corpus " + std::to_string(seed) + ": " + v.front());
          ++runs;
        }
        PipelineConfig c;
        c.local = LevelConfig{Algorithm::kIdentity};
        c.global = parse_level(global);
        c.seed = seed;
        const auto a = run_bilevel(corpus, vectors, c);
        const auto b = run_global_only(corpus, vectors, c);
        if (!(a.senses == b.senses && a.concepts == b.concepts && a.words == b.words)) {
          return fail("identity bi-level differs from global-only on corpus " + std::to_string(seed));
        }
      }
    }
  }
  return pass(std::to_string(runs) + " pipeline runs on 100 corpora; identity bi-level == global-only");
}

Outcome planted_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = synthetic::planted_corpus(42);
  const Corpus corpus = data.corpus();
  const Matrix vectors = data.matrix(corpus);
  const auto gold = make_gold(corpus);
  const auto dev = make_dev_split(gold, 0.3, 42);

  std::vector<PipelineConfig> grid;
  for (const auto& local : expand_level_specs("agglo:average:nu=2..-1/0.5")) {
    for (const auto& global : expand_level_specs("agglo:average:nu=6..-2/0.5")) {
      PipelineConfig c;
      c.local = local;
      c.global = global;
      c.seed = 42;
      grid.push_back(c);
    }
  }
  const auto swept = sweep(corpus, vectors, gold, dev, grid, resolve_threads(0));
  const auto result = run_bilevel(corpus, vectors, swept.best, resolve_threads(0));
  const auto ci = bcubed_ci(result.words, gold_word_clustering(gold));
  const auto wsi = bcubed_wsi(result.concepts, gold, corpus);
  const double secs = seconds_since(t0);
  return check(ci.f_beta >= 0.90 && wsi.f_beta >= 0.95 && secs < 30.0,
               describe(swept.best) + ": CI F1 " + fmt(ci.f_beta) + ", WSI F1 " + fmt(wsi.f_beta) + ", " +
                   std::to_string(result.concepts.p) + " concepts, " + fmt(secs, 2) + " s");
}

Outcome clustering_oracles() {
  Rng rng(31337);
  std::size_t dendrograms = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    Matrix m(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) m(i, k) = synthetic::gaussian(rng);
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = i == j ? 0.0 : distance(m.row(i), m.row(j), Metric::kEuclidean);
    }
    const auto dm = DistanceMatrix::compute(m, Metric::kEuclidean);
    for (auto linkage : {Linkage::kSingle, Linkage::kAverage, Linkage::kComplete}) {
      const double tau = trial % 2 ? std::numeric_limits<double>::infinity() : rng.uniform() * 3.0;
      const auto got = agglomerate(dm, linkage, tau);
      const auto want = oracle::exhaustive_dendrogram(d, linkage, tau);
      bool same = got.merges.size() == want.merges.size() && got.assignment.labels == want.labels;
      for (std::size_t s = 0; same && s < want.merges.size(); ++s) {
        same = got.merges[s].left == want.merges[s].left && got.merges[s].right == want.merges[s].right &&
               std::abs(got.merges[s].distance - want.merges[s].distance) <= 1e-12;
      }
      if (!same) return fail(std::string("dendrogram mismatch, linkage ") + to_string(linkage));
      ++dendrograms;
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.below(80);
    const std::size_t dim = 2 + rng.below(6);
    Matrix m(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dim; ++k) m(i, k) = synthetic::gaussian(rng);
    }
    const auto r = kmeans(m, 1 + rng.below(10), rng.next());
    for (std::size_t i = 1; i < r.objective.size(); ++i) {
      if (r.objective[i] > r.objective[i - 1]) {
        return fail("k-means objective rose at iteration " + std::to_string(i) + " of instance " +
                    std::to_string(trial));
      }
    }
  }
  return pass(std::to_string(dendrograms) + " dendrograms match the oracle; 100 k-means traces non-increasing");
}

Outcome threshold_rule() {
  const Matrix line = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
  const auto s = pairwise_distance_stats(line, Metric::kEuclidean);
  const double tau1 = derive_threshold(s, 1.0);
  const bool exact = std::abs(tau1 - (4.0 / 3.0 - std::sqrt(2.0 / 9.0))) <= 1e-12 &&
                     std::abs(derive_threshold({2.0, 1.0, 4}, 1.0) - 1.0) <= 1e-12 &&
                     std::abs(derive_threshold({0.5, 0.25, 4}, 4.5) + 0.625) <= 1e-12;

  // Large nu: the threshold falls below every distance, so nothing merges.
  Rng rng(8);
  Matrix m(50, 4);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t k = 0; k < 4; ++k) m(i, k) = synthetic::gaussian(rng);
  }
  const auto dm = DistanceMatrix::compute(m, Metric::kCosine);
  const double tau = derive_threshold(pairwise_distance_stats(dm), 4.5);
  std::size_t merges = 0;
  for (auto linkage : {Linkage::kSingle, Linkage::kAverage, Linkage::kComplete}) {
    merges += agglomerate(dm, linkage, derive_threshold(pairwise_distance_stats(dm), 1e6)).merges.size();
  }
  double min_d = std::numeric_limits<double>::infinity();
  for (double v : dm.condensed()) min_d = std::min(min_d, v);
  const std::size_t merges_45 = agglomerate(dm, Linkage::kAverage, tau).merges.size();
  const bool consistent = (tau < min_d) == (merges_45 == 0);
  return check(exact && merges == 0 && consistent,
               "hand-computed tau exact; nu=1e6 gives " + std::to_string(merges) + " merges; nu=4.5 tau " +
                   fmt(tau) + " gives " + std::to_string(merges_45));
}

Outcome spearman() {
  const auto monotone = spearman_rho({{"a", 1}, {"b", 2}, {"c", 4}, {"d", 7}}, {{"a", 1}, {"b", 3}, {"c", 5}, {"d", 6}});
  const auto constant = spearman_rho({{"a", 2}, {"b", 2}, {"c", 2}}, {{"a", 1}, {"b", 2}, {"c", 3}});
  return check(monotone && std::abs(*monotone - 1.0) <= 1e-12 && !constant,
               "rho = " + (monotone ? fmt(*monotone, 6) : std::string("NA")) + " on monotone counts; " +
                   (constant ? "constant predictions scored" : "NA on constant predictions"));
}

Outcome reference_corpus() {
  const char* path = std::getenv("CONCEPT_FORGE_SEMCOR_STORE");
  if (path == nullptr || *path == '\0') {
    return {Status::kSkip, "set CONCEPT_FORGE_SEMCOR_STORE to an annotated reference store"};
  }
  const auto store = read_store_any(path);
  const Corpus corpus = corpus_from_store(store, kDefaultMinOccurrences);
  const auto gold = make_gold(corpus);
  const auto stats = corpus_stats(corpus, gold, make_full_split(gold));
  const bool stats_ok = stats.occurrences == 52997 && stats.lemmas == 1560 && stats.concepts == 3855 &&
                        std::abs(stats.d_lex - 1.14) < 0.005 && std::abs(stats.d_polysemy - 2.83) < 0.005;
  const auto reference = gold_word_clustering(gold);
  const auto lemmas = bcubed_ci(baseline_lemmas(corpus), reference);
  const bool lemmas_ok = std::abs(lemmas.precision - 1.0) <= 0.01 && std::abs(lemmas.recall - 0.43) <= 0.01 &&
                         std::abs(lemmas.f_beta - 0.61) <= 0.01;
  const Matrix vectors = corpus_vectors(corpus, store);
  double f_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PipelineConfig c;
    c.local = parse_level("agglo:average:nu=0");
    c.global = parse_level("agglo:average:nu=4.5");
    c.seed = seed;
    f_sum += bcubed_ci(run_bilevel(corpus, vectors, c, resolve_threads(0)).words, reference).f_beta;
  }
  const double f = f_sum / 5.0;
  return check(stats_ok && lemmas_ok && std::abs(f - 0.66) <= 0.03,
               std::to_string(stats.occurrences) + "/" + std::to_string(stats.lemmas) + "/" +
                   std::to_string(stats.concepts) + " d_lex " + fmt(stats.d_lex, 2) + " d_poly " +
                   fmt(stats.d_polysemy, 2) + "; lemmas CI " + fmt(lemmas.precision, 2) + "/" +
                   fmt(lemmas.recall, 2) + "/" + fmt(lemmas.f_beta, 2) + "; bi-level agglo CI F1 " + fmt(f, 3));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"extended-bcubed-oracle", extended_bcubed_oracle},
      {"classic-bcubed-degeneration", classic_degeneration},
      {"baseline-identities", baseline_identities},
      {"f-beta-spot-check", f_beta_spot},
      {"constraint-validator", constraint_validator},
      {"planted-concept-recovery", planted_recovery},
      {"clustering-oracles", clustering_oracles},
      {"threshold-rule", threshold_rule},
      {"spearman", spearman},
      {"reference-corpus (optional)", reference_corpus},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    if (o.status == Status::kFail) ++failures;
    std::printf("%s  %-30s %s\n", tag, name, o.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
