#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cforge {

// One annotated token as delivered by ingestion (JSONL annotation file or the
// embedding store).
struct OccurrenceRecord {
  std::string id;
  std::string lemma;
  std::string pos;
  std::string sentence_id;
  std::uint32_t token_index = 0;
  std::optional<std::string> gold_concept;

  friend bool operator==(const OccurrenceRecord&, const OccurrenceRecord&) = default;
};

struct Occurrence {
  std::string id;
  std::size_t lemma = 0;  // index into Corpus::lemmas()
  std::string sentence_id;
  std::uint32_t token_index = 0;
  std::optional<std::string> gold_concept;
};

inline constexpr std::size_t kDefaultMinOccurrences = 10;

// Lexicon W with its occurrences O. Lemmas are sorted; occurrences are grouped
// by lemma and ordered by occurrence id within a lemma, so the rows of lemma w
// are the contiguous range lemma_range(w). Immutable after construction.
class Corpus {
 public:
  Corpus(std::vector<std::string> lemmas, std::vector<Occurrence> occurrences);

  const std::vector<std::string>& lemmas() const noexcept { return lemmas_; }
  const std::vector<Occurrence>& occurrences() const noexcept { return occurrences_; }
  std::size_t num_lemmas() const noexcept { return lemmas_.size(); }
  std::size_t num_occurrences() const noexcept { return occurrences_.size(); }

  // [begin, end) into occurrences().
  std::pair<std::size_t, std::size_t> lemma_range(std::size_t lemma) const {
    return {offsets_[lemma], offsets_[lemma + 1]};
  }
  std::size_t lemma_size(std::size_t lemma) const { return offsets_[lemma + 1] - offsets_[lemma]; }

  std::optional<std::size_t> find_lemma(const std::string& lemma) const;
  std::optional<std::size_t> find_occurrence(const std::string& id) const;

 private:
  std::vector<std::string> lemmas_;
  std::vector<Occurrence> occurrences_;
  std::vector<std::size_t> offsets_;
  std::unordered_map<std::string, std::size_t> occurrence_index_;
};

// Filters: noun POS (proper nouns excluded), alphabetic lemma of length >= 3
// after case folding, and at least `min_occurrences` occurrences per lemma.
Corpus load_corpus(const std::vector<OccurrenceRecord>& records,
                   std::size_t min_occurrences = kDefaultMinOccurrences);

bool is_common_noun_tag(const std::string& pos);
bool is_valid_lemma_form(const std::string& lemma);
std::string fold_case(std::string s);

// One object per line: {id, lemma, pos, sentence_id, token_index, gold_concept?}.
std::vector<OccurrenceRecord> read_annotation_jsonl(std::istream& in);
std::vector<OccurrenceRecord> read_annotation_jsonl_file(const std::string& path);
void write_annotation_jsonl(std::ostream& out, const std::vector<OccurrenceRecord>& records);

// Reference clusterings C and C^W derived from gold annotations.
struct GoldClusterings {
  std::map<std::string, std::string> concept_partition;        // occurrence id -> concept
  std::map<std::string, std::set<std::string>> word_clustering;  // concept -> lemmas
  std::map<std::string, std::size_t> sense_counts;             // lemma -> #distinct concepts

  std::size_t num_concepts() const noexcept { return word_clustering.size(); }
};

// Occurrences without a gold concept are left out of the reference.
GoldClusterings make_gold(const Corpus& corpus);

// Regenerates C^W from a concept partition; used to check make_gold's output.
std::map<std::string, std::set<std::string>> word_clustering_from_partition(
    const std::map<std::string, std::string>& concept_partition, const Corpus& corpus);

enum class SplitName { kFull, kDev, kSynon };

const char* to_string(SplitName name);
SplitName parse_split_name(const std::string& name);

struct SplitSpec {
  SplitName name = SplitName::kFull;
  std::set<std::string> concept_ids;
  std::set<std::string> occurrence_ids;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

SplitSpec make_full_split(const GoldClusterings& gold);

// Samples floor(fraction * #concepts) concepts without replacement.
SplitSpec make_dev_split(const GoldClusterings& gold, double fraction, std::uint64_t seed);

// Concepts realized by at least two distinct lemmas.
SplitSpec make_synon_split(const GoldClusterings& gold);

struct StatsReport {
  std::size_t occurrences = 0;
  std::size_t lemmas = 0;
  std::size_t concepts = 0;
  double occurrences_per_concept = 0.0;
  double occurrences_per_lemma = 0.0;
  double d_lex = 0.0;        // mean unique lemmas per concept
  double d_polysemy = 0.0;   // mean distinct concepts per lemma
};

StatsReport corpus_stats(const Corpus& corpus, const GoldClusterings& gold, const SplitSpec& split);

}  // namespace cforge
