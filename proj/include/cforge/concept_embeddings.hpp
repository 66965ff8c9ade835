#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cforge/corpus.hpp"
#include "cforge/embedding_store.hpp"
#include "cforge/matrix.hpp"
#include "cforge/partitions.hpp"

namespace cforge {

// One static vector per induced concept: the mean of its occurrence vectors.
// Row i belongs to concept ids()[i]; ids are ascending.
class ConceptEmbeddingTable {
 public:
  ConceptEmbeddingTable(std::vector<std::size_t> ids, Matrix vectors);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  const std::vector<std::size_t>& ids() const noexcept { return ids_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  std::span<const double> vector(std::size_t row) const { return vectors_.row(row); }

  // Closest concept by cosine distance, smallest id on ties. Throws
  // kDegenerateInput for a zero query.
  std::size_t assign(std::span<const double> query) const;

 private:
  std::vector<std::size_t> ids_;
  Matrix vectors_;
  Matrix units_;  // rows scaled to unit length
};

ConceptEmbeddingTable build_concept_embeddings(const Corpus& corpus, const Matrix& occurrence_vectors,
                                               const ConceptPartition& concepts);
ConceptEmbeddingTable build_concept_embeddings(const Corpus& corpus, const EmbeddingStore& store,
                                               const ConceptPartition& concepts);

inline std::size_t assign_concept(std::span<const double> query, const ConceptEmbeddingTable& table) {
  return table.assign(query);
}

struct WicPair {
  std::vector<double> first;
  std::vector<double> second;
  bool same = false;
};

struct WicOutcome {
  double accuracy = 0.0;
  std::vector<bool> predictions;
};

// Predicts "same" iff both vectors map to the same concept. Throws kParameter
// on an empty pair set.
WicOutcome wic_evaluate(const std::vector<WicPair>& pairs, const ConceptEmbeddingTable& table);

// One row of the published WiC layout: word, POS flag, "i-j" positions,
// sentence 1, sentence 2.
struct WicExample {
  std::string word;
  std::string pos;
  std::size_t index1 = 0;
  std::size_t index2 = 0;
  std::string sentence1;
  std::string sentence2;
};

std::vector<WicExample> read_wic_data(std::istream& in);
// T/F per line.
std::vector<bool> read_wic_gold(std::istream& in);

// Table stored with the embedding-store format: record id = concept id,
// lemma = "concept".
EmbeddingStore table_to_store(const ConceptEmbeddingTable& table);
ConceptEmbeddingTable table_from_store(const EmbeddingStore& store);

}  // namespace cforge
