#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cforge/corpus.hpp"
#include "cforge/matrix.hpp"

namespace cforge {

// Binary layout, all little-endian:
//   header (24 bytes): "CIEM" | version u32 | dim u32 | reserved u32 (0) | record count u64
//   record: id | lemma | sentence_id  (each u32 byte length + UTF-8)
//           token_index u32 | gold concept (u32 length + UTF-8, length 0 = absent)
//           dim x float32
inline constexpr char kStoreMagic[4] = {'C', 'I', 'E', 'M'};
inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::size_t kStoreHeaderBytes = 24;

// Unvalidated rows as parsed from an input file, before they become a store.
struct EmbeddingRows {
  std::size_t dim = 0;
  std::vector<OccurrenceRecord> records;
  std::vector<float> values;  // records.size() * dim
};

// Occurrence vectors keyed by occurrence. Records are kept in canonical order
// (lemma, then occurrence id) so each lemma owns a contiguous row range.
// The store holds lexicon-filtered noun occurrences; POS is not persisted and
// reads back as "n".
class EmbeddingStore {
 public:
  // Throws kZeroDim, kValidation (non-finite or zero vectors, size mismatch)
  // or kDuplicateOccurrence.
  explicit EmbeddingStore(EmbeddingRows rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<OccurrenceRecord>& records() const noexcept { return records_; }
  std::span<const float> vector(std::size_t row) const {
    return std::span<const float>(values_).subspan(row * dim_, dim_);
  }
  std::span<const float> values() const noexcept { return values_; }

  std::optional<std::size_t> find(const std::string& occurrence_id) const;
  std::vector<std::string> lemmas() const;

  // Rows of `lemma` ordered by occurrence id, as a zero-copy view. Throws kLookup.
  FloatRowsView vectors_for_lemma(const std::string& lemma) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
    return a.dim_ == b.dim_ && a.records_ == b.records_ && a.values_ == b.values_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<OccurrenceRecord> records_;
  std::vector<float> values_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> lemma_rows_;
  std::map<std::string, std::size_t> id_rows_;
};

// Returns the number of bytes written. Throws kIo naming the byte offset of
// the failed write.
std::size_t write_store(const EmbeddingStore& store, std::ostream& out);
void write_store_file(const EmbeddingStore& store, const std::string& path);

// Single pass over the stream. Throws kBadMagic, kVersionMismatch, kZeroDim or
// kTruncated, plus the store's own validation errors.
EmbeddingStore read_store(std::istream& in);
EmbeddingStore read_store_file(const std::string& path);

// JSONL mirror: {id, lemma, pos, sentence_id, token_index, gold_concept?, vector:[...]}.
EmbeddingRows read_store_jsonl(std::istream& in);
void write_store_jsonl(const EmbeddingStore& store, std::ostream& out);

// Picks the reader from the file's first bytes (binary magic or JSONL).
EmbeddingStore read_store_any(const std::string& path);

// Corpus over the store's records with the usual lexicon filters applied.
Corpus corpus_from_store(const EmbeddingStore& store, std::size_t min_occurrences);

// Occurrence vectors for every corpus occurrence, in corpus order. Throws
// kConsistency naming the first occurrence without a vector.
Matrix corpus_vectors(const Corpus& corpus, const EmbeddingStore& store);

}  // namespace cforge
