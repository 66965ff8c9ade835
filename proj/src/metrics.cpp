#include "cforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cforge/error.hpp"

namespace cforge {

double f_beta(double precision, double recall, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::kParameter, "beta must be > 0");
  if (precision + recall == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * recall * precision / (b2 * precision + recall);
}

MultiplicityScores multiplicity_scores(const std::string& w1, const std::string& w2,
                                       const WordClustering& pred, const WordClustering& gold) {
  auto shared = [&](const WordClustering& c) {
    std::size_t n = 0;
    for (const auto& cluster : c.clusters) {
      if (std::binary_search(cluster.begin(), cluster.end(), w1) &&
          std::binary_search(cluster.begin(), cluster.end(), w2)) {
        ++n;
      }
    }
    return n;
  };
  const std::size_t in_pred = shared(pred);
  const std::size_t in_gold = shared(gold);
  const double common = static_cast<double>(std::min(in_pred, in_gold));
  MultiplicityScores out;
  if (in_pred > 0) out.mp = common / static_cast<double>(in_pred);
  if (in_gold > 0) out.mr = common / static_cast<double>(in_gold);
  return out;
}

namespace {

// Clusters as lemma-index lists plus, per lemma, the clusters containing it.
struct IndexedClustering {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::vector<std::size_t>> memberships;
};

IndexedClustering index_clustering(const WordClustering& c, const std::map<std::string, std::size_t>& ids) {
  IndexedClustering out;
  out.memberships.resize(ids.size());
  for (const auto& cluster : c.clusters) {
    std::vector<std::size_t> members;
    for (const auto& lemma : cluster) {
      auto it = ids.find(lemma);
      if (it != ids.end()) members.push_back(it->second);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) continue;
    for (std::size_t m : members) out.memberships[m].push_back(out.clusters.size());
    out.clusters.push_back(std::move(members));
  }
  return out;
}

std::set<std::string> lexicon_of(const WordClustering& c) {
  std::set<std::string> lexicon;
  for (const auto& cluster : c.clusters) lexicon.insert(cluster.begin(), cluster.end());
  return lexicon;
}

// Accumulates co-membership counts of lemma w with every partner.
class PartnerCounter {
 public:
  explicit PartnerCounter(std::size_t n) : counts_(n, 0) {}

  void count(const IndexedClustering& c, std::size_t w) {
    for (std::size_t cluster : c.memberships[w]) {
      for (std::size_t partner : c.clusters[cluster]) {
        if (counts_[partner]++ == 0) touched_.push_back(partner);
      }
    }
    std::sort(touched_.begin(), touched_.end());
  }

  std::size_t operator[](std::size_t partner) const { return counts_[partner]; }
  const std::vector<std::size_t>& partners() const noexcept { return touched_; }

  void clear() {
    for (std::size_t p : touched_) counts_[p] = 0;
    touched_.clear();
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> touched_;
};

}  // namespace

BCubedScore bcubed_ci(const WordClustering& pred, const WordClustering& gold, double beta,
                      const std::optional<std::set<std::string>>& restrict) {
  const auto pred_lexicon = lexicon_of(pred);
  const auto gold_lexicon = lexicon_of(gold);
  std::set<std::string> lexicon;
  if (restrict) {
    for (const auto& lemma : *restrict) {
      if (!pred_lexicon.contains(lemma) || !gold_lexicon.contains(lemma)) {
        throw Error(ErrorKind::kConsistency, "restricted lemma not covered by both clusterings: " + lemma);
      }
    }
    lexicon = *restrict;
  } else {
    if (pred_lexicon != gold_lexicon) {
      throw Error(ErrorKind::kConsistency, "predicted and gold clusterings cover different lexicons");
    }
    lexicon = pred_lexicon;
  }
  BCubedScore score;
  score.beta = beta;
  if (lexicon.empty()) {
    score.f_beta = f_beta(0.0, 0.0, beta);
    return score;
  }

  std::map<std::string, std::size_t> ids;
  for (const auto& lemma : lexicon) ids.emplace(lemma, ids.size());
  const auto f = index_clustering(pred, ids);
  const auto g = index_clustering(gold, ids);

  PartnerCounter in_f(ids.size());
  PartnerCounter in_g(ids.size());
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (std::size_t w = 0; w < ids.size(); ++w) {
    in_f.count(f, w);
    in_g.count(g, w);
    double mp = 0.0;
    for (std::size_t partner : in_f.partners()) {
      mp += static_cast<double>(std::min(in_f[partner], in_g[partner])) / static_cast<double>(in_f[partner]);
    }
    double mr = 0.0;
    for (std::size_t partner : in_g.partners()) {
      mr += static_cast<double>(std::min(in_f[partner], in_g[partner])) / static_cast<double>(in_g[partner]);
    }
    precision_sum += mp / static_cast<double>(in_f.partners().size());
    recall_sum += mr / static_cast<double>(in_g.partners().size());
    in_f.clear();
    in_g.clear();
  }
  const auto n = static_cast<double>(ids.size());
  score.precision = precision_sum / n;
  score.recall = recall_sum / n;
  score.f_beta = f_beta(score.precision, score.recall, beta);
  return score;
}

BCubedScore bcubed_partition(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
                             double beta) {
  if (pred.size() != gold.size()) throw Error(ErrorKind::kConsistency, "partitions cover different items");
  BCubedScore score;
  score.beta = beta;
  if (pred.empty()) {
    score.f_beta = f_beta(0.0, 0.0, beta);
    return score;
  }
  std::map<std::size_t, std::size_t> pred_sizes;
  std::map<std::size_t, std::size_t> gold_sizes;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++pred_sizes[pred[i]];
    ++gold_sizes[gold[i]];
    ++joint[{pred[i], gold[i]}];
  }
  double p = 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto both = static_cast<double>(joint[{pred[i], gold[i]}]);
    p += both / static_cast<double>(pred_sizes[pred[i]]);
    r += both / static_cast<double>(gold_sizes[gold[i]]);
  }
  const auto n = static_cast<double>(pred.size());
  score.precision = p / n;
  score.recall = r / n;
  score.f_beta = f_beta(score.precision, score.recall, beta);
  return score;
}

WsiScores bcubed_wsi(const ConceptPartition& pred, const GoldClusterings& gold, const Corpus& corpus,
                     double beta, const std::set<std::string>* occurrence_subset) {
  if (pred.labels.size() != corpus.num_occurrences()) {
    throw Error(ErrorKind::kConsistency, "concept partition does not cover the corpus");
  }
  WsiScores out;
  std::map<std::string, std::size_t> gold_ids;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    std::vector<std::size_t> pred_labels;
    std::vector<std::size_t> gold_labels;
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) {
      const auto& id = corpus.occurrences()[o].id;
      if (occurrence_subset && !occurrence_subset->contains(id)) continue;
      auto it = gold.concept_partition.find(id);
      if (it == gold.concept_partition.end()) continue;
      pred_labels.push_back(pred.labels[o]);
      gold_labels.push_back(gold_ids.emplace(it->second, gold_ids.size()).first->second);
    }
    if (pred_labels.empty()) continue;
    out.per_lemma.emplace(corpus.lemmas()[lemma], bcubed_partition(pred_labels, gold_labels, beta));
  }
  if (out.per_lemma.empty()) return out;
  for (const auto& [lemma, s] : out.per_lemma) {
    out.precision += s.precision;
    out.recall += s.recall;
    out.f_beta += s.f_beta;
  }
  const auto n = static_cast<double>(out.per_lemma.size());
  out.precision /= n;
  out.recall /= n;
  out.f_beta /= n;
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman_rho(const std::map<std::string, std::size_t>& pred_counts,
                                   const std::map<std::string, std::size_t>& gold_counts) {
  if (pred_counts.size() != gold_counts.size() ||
      !std::equal(pred_counts.begin(), pred_counts.end(), gold_counts.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw Error(ErrorKind::kConsistency, "sense-count maps have different lemma sets");
  }
  if (pred_counts.size() < 2) return std::nullopt;
  std::vector<double> x, y;
  for (const auto& [lemma, n] : pred_counts) x.push_back(static_cast<double>(n));
  for (const auto& [lemma, n] : gold_counts) y.push_back(static_cast<double>(n));
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::map<std::string, std::size_t> predicted_sense_counts(const ConceptPartition& pred, const Corpus& corpus,
                                                          const std::set<std::string>* occurrence_subset) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    std::set<std::size_t> concepts;
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) {
      if (occurrence_subset && !occurrence_subset->contains(corpus.occurrences()[o].id)) continue;
      concepts.insert(pred.labels.at(o));
    }
    if (!concepts.empty()) counts[corpus.lemmas()[lemma]] = concepts.size();
  }
  return counts;
}

std::map<std::string, std::size_t> gold_sense_counts(const GoldClusterings& gold, const Corpus& corpus,
                                                     const std::set<std::string>* occurrence_subset) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    std::set<std::string> concepts;
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) {
      const auto& id = corpus.occurrences()[o].id;
      if (occurrence_subset && !occurrence_subset->contains(id)) continue;
      auto it = gold.concept_partition.find(id);
      if (it != gold.concept_partition.end()) concepts.insert(it->second);
    }
    if (!concepts.empty()) counts[corpus.lemmas()[lemma]] = concepts.size();
  }
  return counts;
}

WordClustering gold_word_clustering(const GoldClusterings& gold, const std::set<std::string>* concepts) {
  WordClustering words;
  for (const auto& [concept_id, lemmas] : gold.word_clustering) {
    if (concepts && !concepts->contains(concept_id)) continue;
    words.clusters.emplace_back(lemmas.begin(), lemmas.end());
  }
  return words;
}

std::set<std::string> split_lemmas(const GoldClusterings& gold, const SplitSpec& split) {
  std::set<std::string> lemmas;
  for (const auto& concept_id : split.concept_ids) {
    auto it = gold.word_clustering.find(concept_id);
    if (it != gold.word_clustering.end()) lemmas.insert(it->second.begin(), it->second.end());
  }
  return lemmas;
}

WordClustering word_clustering_on_occurrences(const ConceptPartition& pred, const Corpus& corpus,
                                              const std::set<std::string>& occurrence_ids) {
  if (pred.labels.size() != corpus.num_occurrences()) {
    throw Error(ErrorKind::kConsistency, "concept partition does not match the corpus");
  }
  std::vector<std::set<std::string>> members(pred.p);
  for (std::size_t o = 0; o < corpus.num_occurrences(); ++o) {
    const auto& occ = corpus.occurrences()[o];
    if (occurrence_ids.count(occ.id) == 0) continue;
    members.at(pred.labels[o]).insert(corpus.lemmas()[occ.lemma]);
  }
  WordClustering out;
  for (const auto& m : members) {
    if (!m.empty()) out.clusters.emplace_back(m.begin(), m.end());
  }
  return out;
}

BCubedScore bcubed_ci_on_split(const ConceptPartition& pred, const Corpus& corpus, const GoldClusterings& gold,
                               const SplitSpec& split, double beta) {
  return bcubed_ci(word_clustering_on_occurrences(pred, corpus, split.occurrence_ids),
                   gold_word_clustering(gold, &split.concept_ids), beta);
}

}  // namespace cforge
