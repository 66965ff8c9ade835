#include "cforge/concept_embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "cforge/error.hpp"

namespace cforge {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

ConceptEmbeddingTable::ConceptEmbeddingTable(std::vector<std::size_t> ids, Matrix vectors)
    : ids_(std::move(ids)), vectors_(std::move(vectors)) {
  if (ids_.size() != vectors_.rows()) throw Error(ErrorKind::kConsistency, "one vector per concept id expected");
  if (!std::is_sorted(ids_.begin(), ids_.end()) ||
      std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw Error(ErrorKind::kConsistency, "concept ids must be strictly ascending");
  }
  units_ = vectors_;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const double n = norm(vectors_.row(i));
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorKind::kValidation, "concept " + std::to_string(ids_[i]) + " has a zero or non-finite vector");
    }
    for (double& x : units_.row(i)) x /= n;
  }
}

std::size_t ConceptEmbeddingTable::assign(std::span<const double> query) const {
  if (ids_.empty()) throw Error(ErrorKind::kParameter, "empty concept table");
  if (query.size() != dim()) throw Error(ErrorKind::kConsistency, "query dimension differs from table");
  const double qn = norm(query);
  if (qn == 0.0) throw Error(ErrorKind::kDegenerateInput, "cannot assign a zero vector");
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto u = units_.row(i);
    double dot = 0.0;
    for (std::size_t d = 0; d < u.size(); ++d) dot += u[d] * query[d];
    const double dist = 1.0 - dot / qn;
    if (dist < best) {
      best = dist;
      arg = i;
    }
  }
  return ids_[arg];
}

ConceptEmbeddingTable build_concept_embeddings(const Corpus& corpus, const Matrix& occurrence_vectors,
                                               const ConceptPartition& concepts) {
  if (concepts.labels.size() != corpus.num_occurrences() || occurrence_vectors.rows() != corpus.num_occurrences()) {
    throw Error(ErrorKind::kConsistency, "concept partition is not total on the occurrences");
  }
  Matrix sums(concepts.p, occurrence_vectors.cols());
  std::vector<std::size_t> counts(concepts.p, 0);
  for (std::size_t o = 0; o < concepts.labels.size(); ++o) {
    auto dst = sums.row(concepts.labels[o]);
    auto src = occurrence_vectors.row(o);
    for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
    ++counts[concepts.labels[o]];
  }
  std::vector<std::size_t> ids(concepts.p);
  for (std::size_t k = 0; k < concepts.p; ++k) {
    if (counts[k] == 0) throw Error(ErrorKind::kConsistency, "concept " + std::to_string(k) + " is empty");
    for (double& v : sums.row(k)) v /= static_cast<double>(counts[k]);
    ids[k] = k;
  }
  return ConceptEmbeddingTable(std::move(ids), std::move(sums));
}

ConceptEmbeddingTable build_concept_embeddings(const Corpus& corpus, const EmbeddingStore& store,
                                               const ConceptPartition& concepts) {
  return build_concept_embeddings(corpus, corpus_vectors(corpus, store), concepts);
}

WicOutcome wic_evaluate(const std::vector<WicPair>& pairs, const ConceptEmbeddingTable& table) {
  if (pairs.empty()) throw Error(ErrorKind::kParameter, "no WiC pairs to evaluate");
  WicOutcome out;
  std::size_t correct = 0;
  for (const auto& pair : pairs) {
    const bool same = table.assign(pair.first) == table.assign(pair.second);
    out.predictions.push_back(same);
    if (same == pair.same) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
  return out;
}

std::vector<WicExample> read_wic_data(std::istream& in) {
  std::vector<WicExample> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fs(line);
    while (std::getline(fs, field, '\t')) fields.push_back(field);
    if (fields.size() != 5) {
      throw Error(ErrorKind::kParse, "WiC line " + std::to_string(line_no) + ": expected 5 tab-separated fields");
    }
    WicExample row;
    row.word = fields[0];
    row.pos = fields[1];
    const auto dash = fields[2].find('-');
    try {
      if (dash == std::string::npos) throw std::invalid_argument("no dash");
      row.index1 = std::stoul(fields[2].substr(0, dash));
      row.index2 = std::stoul(fields[2].substr(dash + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "WiC line " + std::to_string(line_no) + ": bad positions '" + fields[2] + "'");
    }
    row.sentence1 = fields[3];
    row.sentence2 = fields[4];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<bool> read_wic_gold(std::istream& in) {
  std::vector<bool> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "T") {
      labels.push_back(true);
    } else if (line == "F") {
      labels.push_back(false);
    } else {
      throw Error(ErrorKind::kParse, "WiC gold line " + std::to_string(line_no) + ": expected T or F");
    }
  }
  return labels;
}

EmbeddingStore table_to_store(const ConceptEmbeddingTable& table) {
  EmbeddingRows rows;
  rows.dim = table.dim();
  for (std::size_t i = 0; i < table.size(); ++i) {
    OccurrenceRecord rec;
    rec.id = std::to_string(table.ids()[i]);
    rec.lemma = "concept";
    rec.pos = "n";
    rows.records.push_back(std::move(rec));
    for (double v : table.vector(i)) rows.values.push_back(static_cast<float>(v));
  }
  return EmbeddingStore(std::move(rows));
}

ConceptEmbeddingTable table_from_store(const EmbeddingStore& store) {
  std::map<std::size_t, std::size_t> rows_by_id;
  for (std::size_t r = 0; r < store.size(); ++r) {
    const auto& id = store.records()[r].id;
    std::size_t parsed = 0;
    try {
      std::size_t used = 0;
      parsed = std::stoul(id, &used);
      if (used != id.size()) throw std::invalid_argument(id);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "concept table record id is not an integer: " + id);
    }
    rows_by_id.emplace(parsed, r);
  }
  std::vector<std::size_t> ids;
  Matrix vectors(rows_by_id.size(), store.dim());
  for (const auto& [id, row] : rows_by_id) {
    auto src = store.vector(row);
    std::copy(src.begin(), src.end(), vectors.row(ids.size()).begin());
    ids.push_back(id);
  }
  return ConceptEmbeddingTable(std::move(ids), std::move(vectors));
}

}  // namespace cforge
