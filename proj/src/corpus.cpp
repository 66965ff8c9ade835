#include "cforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "cforge/error.hpp"
#include "cforge/random.hpp"

namespace cforge {

using nlohmann::json;

Corpus::Corpus(std::vector<std::string> lemmas, std::vector<Occurrence> occurrences)
    : lemmas_(std::move(lemmas)), occurrences_(std::move(occurrences)) {
  offsets_.assign(lemmas_.size() + 1, 0);
  for (std::size_t i = 0; i < occurrences_.size(); ++i) {
    const auto& occ = occurrences_[i];
    if (occ.lemma >= lemmas_.size()) {
      throw Error(ErrorKind::kConsistency, "occurrence " + occ.id + " references an unknown lemma");
    }
    if (i > 0 && occ.lemma < occurrences_[i - 1].lemma) {
      throw Error(ErrorKind::kConsistency, "occurrences are not grouped by lemma");
    }
    ++offsets_[occ.lemma + 1];
    if (!occurrence_index_.emplace(occ.id, i).second) {
      throw Error(ErrorKind::kDuplicateOccurrence, "duplicate occurrence id: " + occ.id);
    }
  }
  for (std::size_t l = 0; l < lemmas_.size(); ++l) offsets_[l + 1] += offsets_[l];
}

std::optional<std::size_t> Corpus::find_lemma(const std::string& lemma) const {
  auto it = std::lower_bound(lemmas_.begin(), lemmas_.end(), lemma);
  if (it == lemmas_.end() || *it != lemma) return std::nullopt;
  return static_cast<std::size_t>(it - lemmas_.begin());
}

std::optional<std::size_t> Corpus::find_occurrence(const std::string& id) const {
  auto it = occurrence_index_.find(id);
  if (it == occurrence_index_.end()) return std::nullopt;
  return it->second;
}

std::string fold_case(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_common_noun_tag(const std::string& pos) {
  // WordNet, Penn Treebank and Universal Dependencies spellings.
  static const std::set<std::string> kNounTags = {"n", "NN", "NNS", "NOUN", "noun", "N"};
  return kNounTags.contains(pos);
}

bool is_valid_lemma_form(const std::string& lemma) {
  if (lemma.size() < 3) return false;
  return std::all_of(lemma.begin(), lemma.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

Corpus load_corpus(const std::vector<OccurrenceRecord>& records, std::size_t min_occurrences) {
  std::set<std::string> seen_ids;
  std::set<std::tuple<std::string, std::uint32_t, std::string>> seen_positions;
  std::map<std::string, std::vector<const OccurrenceRecord*>> by_lemma;

  for (const auto& rec : records) {
    const std::string lemma = fold_case(rec.lemma);
    if (!seen_ids.insert(rec.id).second) {
      throw Error(ErrorKind::kDuplicateOccurrence, "duplicate occurrence id: " + rec.id);
    }
    if (!seen_positions.emplace(rec.sentence_id, rec.token_index, lemma).second) {
      throw Error(ErrorKind::kDuplicateOccurrence,
                  "duplicate occurrence key: (" + rec.sentence_id + ", " +
                      std::to_string(rec.token_index) + ", " + lemma + ")");
    }
    if (!is_common_noun_tag(rec.pos) || !is_valid_lemma_form(lemma)) continue;
    by_lemma[lemma].push_back(&rec);
  }

  std::vector<std::string> lemmas;
  std::vector<Occurrence> occurrences;
  for (auto& [lemma, recs] : by_lemma) {
    if (recs.size() < min_occurrences) continue;
    const std::size_t index = lemmas.size();
    lemmas.push_back(lemma);
    std::sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* rec : recs) {
      occurrences.push_back({rec->id, index, rec->sentence_id, rec->token_index, rec->gold_concept});
    }
  }
  if (lemmas.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "no lemma passes the lexicon filters (min_occurrences=" +
                                             std::to_string(min_occurrences) + ")");
  }
  return Corpus(std::move(lemmas), std::move(occurrences));
}

namespace {

OccurrenceRecord record_from_json(const json& j, std::size_t line) {
  try {
    OccurrenceRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.lemma = j.at("lemma").get<std::string>();
    rec.pos = j.value("pos", std::string{"n"});
    rec.sentence_id = j.at("sentence_id").get<std::string>();
    const auto index = j.at("token_index").get<std::int64_t>();
    if (index < 0 || index > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorKind::kParse, "token_index out of range");
    }
    rec.token_index = static_cast<std::uint32_t>(index);
    if (auto it = j.find("gold_concept"); it != j.end() && !it->is_null()) {
      rec.gold_concept = it->get<std::string>();
    }
    return rec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

std::vector<OccurrenceRecord> read_annotation_jsonl(std::istream& in) {
  std::vector<OccurrenceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(record_from_json(j, line_no));
  }
  return records;
}

std::vector<OccurrenceRecord> read_annotation_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_annotation_jsonl(in);
}

void write_annotation_jsonl(std::ostream& out, const std::vector<OccurrenceRecord>& records) {
  for (const auto& rec : records) {
    json j = {{"id", rec.id},
              {"lemma", rec.lemma},
              {"pos", rec.pos},
              {"sentence_id", rec.sentence_id},
              {"token_index", rec.token_index}};
    if (rec.gold_concept) j["gold_concept"] = *rec.gold_concept;
    out << j.dump() << '\n';
  }
}

std::map<std::string, std::set<std::string>> word_clustering_from_partition(
    const std::map<std::string, std::string>& concept_partition, const Corpus& corpus) {
  std::map<std::string, std::set<std::string>> clusters;
  for (const auto& [occ_id, concept_id] : concept_partition) {
    auto index = corpus.find_occurrence(occ_id);
    if (!index) throw Error(ErrorKind::kLookup, "gold occurrence not in corpus: " + occ_id);
    clusters[concept_id].insert(corpus.lemmas()[corpus.occurrences()[*index].lemma]);
  }
  return clusters;
}

GoldClusterings make_gold(const Corpus& corpus) {
  GoldClusterings gold;
  std::map<std::string, std::set<std::string>> concepts_per_lemma;
  for (const auto& occ : corpus.occurrences()) {
    if (!occ.gold_concept) continue;
    const auto& lemma = corpus.lemmas()[occ.lemma];
    gold.concept_partition.emplace(occ.id, *occ.gold_concept);
    gold.word_clustering[*occ.gold_concept].insert(lemma);
    concepts_per_lemma[lemma].insert(*occ.gold_concept);
  }
  for (const auto& [lemma, concepts] : concepts_per_lemma) gold.sense_counts[lemma] = concepts.size();
  return gold;
}

const char* to_string(SplitName name) {
  switch (name) {
    case SplitName::kFull: return "full";
    case SplitName::kDev: return "dev";
    case SplitName::kSynon: return "synon";
  }
  return "full";
}

SplitName parse_split_name(const std::string& name) {
  if (name == "full") return SplitName::kFull;
  if (name == "dev") return SplitName::kDev;
  if (name == "synon") return SplitName::kSynon;
  throw Error(ErrorKind::kParameter, "unknown split: " + name);
}

namespace {

SplitSpec split_from_concepts(const GoldClusterings& gold, SplitName name,
                              std::set<std::string> concepts) {
  SplitSpec split{name, std::move(concepts), {}};
  for (const auto& [occ_id, concept_id] : gold.concept_partition) {
    if (split.concept_ids.contains(concept_id)) split.occurrence_ids.insert(occ_id);
  }
  return split;
}

}  // namespace

SplitSpec make_full_split(const GoldClusterings& gold) {
  std::set<std::string> concepts;
  for (const auto& [concept_id, lemmas] : gold.word_clustering) concepts.insert(concept_id);
  return split_from_concepts(gold, SplitName::kFull, std::move(concepts));
}

SplitSpec make_dev_split(const GoldClusterings& gold, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::kParameter, "dev fraction must lie in (0, 1)");
  }
  if (gold.word_clustering.empty()) throw Error(ErrorKind::kParameter, "gold clustering is empty");

  std::vector<std::string> pool;
  for (const auto& [concept_id, lemmas] : gold.word_clustering) pool.push_back(concept_id);
  const auto count = static_cast<std::size_t>(fraction * static_cast<double>(pool.size()));
  if (count == 0) {
    throw Error(ErrorKind::kParameter, "dev split would be empty: " + std::to_string(pool.size()) + " concepts");
  }

  // Partial Fisher-Yates over the sorted concept ids.
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  return split_from_concepts(gold, SplitName::kDev, {pool.begin(), pool.begin() + count});
}

SplitSpec make_synon_split(const GoldClusterings& gold) {
  std::set<std::string> concepts;
  for (const auto& [concept_id, lemmas] : gold.word_clustering) {
    if (lemmas.size() >= 2) concepts.insert(concept_id);
  }
  return split_from_concepts(gold, SplitName::kSynon, std::move(concepts));
}

StatsReport corpus_stats(const Corpus& corpus, const GoldClusterings& gold, const SplitSpec& split) {
  std::map<std::string, std::set<std::string>> lemmas_per_concept;
  std::map<std::string, std::set<std::string>> concepts_per_lemma;
  StatsReport report;
  for (const auto& occ_id : split.occurrence_ids) {
    auto concept_it = gold.concept_partition.find(occ_id);
    auto index = corpus.find_occurrence(occ_id);
    if (concept_it == gold.concept_partition.end() || !index) continue;
    const auto& lemma = corpus.lemmas()[corpus.occurrences()[*index].lemma];
    lemmas_per_concept[concept_it->second].insert(lemma);
    concepts_per_lemma[lemma].insert(concept_it->second);
    ++report.occurrences;
  }
  report.concepts = lemmas_per_concept.size();
  report.lemmas = concepts_per_lemma.size();
  if (report.concepts == 0 || report.lemmas == 0) return report;

  double lex_sum = 0.0;
  for (const auto& [c, lemmas] : lemmas_per_concept) lex_sum += static_cast<double>(lemmas.size());
  double poly_sum = 0.0;
  for (const auto& [l, concepts] : concepts_per_lemma) poly_sum += static_cast<double>(concepts.size());

  const auto occ = static_cast<double>(report.occurrences);
  report.occurrences_per_concept = occ / static_cast<double>(report.concepts);
  report.occurrences_per_lemma = occ / static_cast<double>(report.lemmas);
  report.d_lex = lex_sum / static_cast<double>(report.concepts);
  report.d_polysemy = poly_sum / static_cast<double>(report.lemmas);
  return report;
}

}  // namespace cforge
