#include "cforge/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "cforge/error.hpp"

namespace cforge {

using nlohmann::json;

EmbeddingStore::EmbeddingStore(EmbeddingRows rows) : dim_(rows.dim) {
  if (dim_ == 0) throw Error(ErrorKind::kZeroDim, "embedding dimension must be positive");
  if (rows.values.size() != rows.records.size() * dim_) {
    throw Error(ErrorKind::kValidation, "expected " + std::to_string(rows.records.size() * dim_) +
                                            " vector components, got " +
                                            std::to_string(rows.values.size()));
  }
  for (std::size_t r = 0; r < rows.records.size(); ++r) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) {
      const double v = rows.values[r * dim_ + c];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kValidation, "non-finite component in vector of " + rows.records[r].id);
      }
      norm2 += v * v;
    }
    if (norm2 == 0.0) throw Error(ErrorKind::kValidation, "zero vector for " + rows.records[r].id);
  }

  std::vector<std::size_t> order(rows.records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = rows.records[a];
    const auto& rb = rows.records[b];
    return std::tie(ra.lemma, ra.id) < std::tie(rb.lemma, rb.id);
  });

  records_.reserve(order.size());
  values_.reserve(rows.values.size());
  for (std::size_t r : order) {
    auto rec = std::move(rows.records[r]);
    rec.pos = "n";
    if (!id_rows_.emplace(rec.id, records_.size()).second) {
      throw Error(ErrorKind::kDuplicateOccurrence, "duplicate occurrence id: " + rec.id);
    }
    auto [it, inserted] = lemma_rows_.try_emplace(rec.lemma, records_.size(), records_.size());
    ++it->second.second;
    records_.push_back(std::move(rec));
    values_.insert(values_.end(), rows.values.begin() + static_cast<std::ptrdiff_t>(r * dim_),
                   rows.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * dim_));
  }
}

std::optional<std::size_t> EmbeddingStore::find(const std::string& occurrence_id) const {
  auto it = id_rows_.find(occurrence_id);
  if (it == id_rows_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> EmbeddingStore::lemmas() const {
  std::vector<std::string> out;
  out.reserve(lemma_rows_.size());
  for (const auto& [lemma, range] : lemma_rows_) out.push_back(lemma);
  return out;
}

FloatRowsView EmbeddingStore::vectors_for_lemma(const std::string& lemma) const {
  auto it = lemma_rows_.find(lemma);
  if (it == lemma_rows_.end()) throw Error(ErrorKind::kLookup, "unknown lemma: " + lemma);
  const auto [begin, end] = it->second;
  return {std::span<const float>(values_).subspan(begin * dim_, (end - begin) * dim_), end - begin,
          dim_};
}

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) {
      throw Error(ErrorKind::kIo, "write failed at byte offset " + std::to_string(written_));
    }
    written_ += n;
  }

  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }

  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }

  void str(const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorKind::kValidation, "string field too long");
    }
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  std::size_t written() const noexcept { return written_; }

 private:
  std::ostream& out_;
  std::size_t written_ = 0;
};

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  // False on a short read.
  bool bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount()) == n;
  }

  bool u32(std::uint32_t& v) {
    unsigned char b[4];
    if (!bytes(b, 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
  }

  bool u64(std::uint64_t& v) {
    unsigned char b[8];
    if (!bytes(b, 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
  }

  bool str(std::string& s) {
    std::uint32_t n = 0;
    if (!u32(n)) return false;
    s.resize(n);
    return n == 0 || bytes(s.data(), n);
  }

 private:
  std::istream& in_;
};

}  // namespace

std::size_t write_store(const EmbeddingStore& store, std::ostream& out) {
  ByteWriter w(out);
  w.bytes(kStoreMagic, 4);
  w.u32(kStoreVersion);
  w.u32(static_cast<std::uint32_t>(store.dim()));
  w.u32(0);
  w.u64(store.size());
  for (std::size_t r = 0; r < store.size(); ++r) {
    const auto& rec = store.records()[r];
    w.str(rec.id);
    w.str(rec.lemma);
    w.str(rec.sentence_id);
    w.u32(rec.token_index);
    w.str(rec.gold_concept.value_or(std::string{}));
    for (float f : store.vector(r)) w.u32(std::bit_cast<std::uint32_t>(f));
  }
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "flush failed after " + std::to_string(w.written()) + " bytes");
  return w.written();
}

void write_store_file(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  write_store(store, out);
}

EmbeddingStore read_store(std::istream& in) {
  ByteReader r(in);
  char magic[4];
  if (!r.bytes(magic, 4) || std::memcmp(magic, kStoreMagic, 4) != 0) {
    throw Error(ErrorKind::kBadMagic, "not an embedding store (bad magic)");
  }
  std::uint32_t version = 0, dim = 0, reserved = 0;
  std::uint64_t count = 0;
  if (!r.u32(version)) throw Error(ErrorKind::kTruncated, "truncated header");
  if (version != kStoreVersion) {
    throw Error(ErrorKind::kVersionMismatch, "unsupported store version " + std::to_string(version) +
                                                 " (expected " + std::to_string(kStoreVersion) + ")");
  }
  if (!r.u32(dim) || !r.u32(reserved) || !r.u64(count)) {
    throw Error(ErrorKind::kTruncated, "truncated header");
  }
  if (dim == 0) throw Error(ErrorKind::kZeroDim, "store header declares dim = 0");

  EmbeddingRows rows;
  rows.dim = dim;
  std::vector<unsigned char> raw(static_cast<std::size_t>(dim) * 4);
  for (std::uint64_t i = 0; i < count; ++i) {
    OccurrenceRecord rec;
    std::string gold;
    bool ok = r.str(rec.id) && r.str(rec.lemma) && r.str(rec.sentence_id) && r.u32(rec.token_index) &&
              r.str(gold) && r.bytes(raw.data(), raw.size());
    if (!ok) {
      throw Error(ErrorKind::kTruncated, "truncated store: expected " + std::to_string(count) +
                                             " records, found " + std::to_string(i) + " complete");
    }
    if (!gold.empty()) rec.gold_concept = std::move(gold);
    rec.pos = "n";
    for (std::size_t c = 0; c < dim; ++c) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[c * 4 + b]) << (8 * b);
      rows.values.push_back(std::bit_cast<float>(bits));
    }
    rows.records.push_back(std::move(rec));
  }
  return EmbeddingStore(std::move(rows));
}

EmbeddingStore read_store_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_store(in);
}

EmbeddingRows read_store_jsonl(std::istream& in) {
  EmbeddingRows rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      OccurrenceRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.lemma = j.at("lemma").get<std::string>();
      rec.pos = j.value("pos", std::string{"n"});
      rec.sentence_id = j.at("sentence_id").get<std::string>();
      rec.token_index = j.at("token_index").get<std::uint32_t>();
      if (auto it = j.find("gold_concept"); it != j.end() && !it->is_null()) {
        rec.gold_concept = it->get<std::string>();
      }
      const auto& vec = j.at("vector");
      if (rows.records.empty()) {
        rows.dim = vec.size();
      } else if (vec.size() != rows.dim) {
        throw Error(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": vector has " +
                                                std::to_string(vec.size()) + " components, expected " +
                                                std::to_string(rows.dim));
      }
      for (const auto& v : vec) rows.values.push_back(v.get<float>());
      rows.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void write_store_jsonl(const EmbeddingStore& store, std::ostream& out) {
  for (std::size_t r = 0; r < store.size(); ++r) {
    const auto& rec = store.records()[r];
    json j = {{"id", rec.id},
              {"lemma", rec.lemma},
              {"pos", rec.pos},
              {"sentence_id", rec.sentence_id},
              {"token_index", rec.token_index}};
    if (rec.gold_concept) j["gold_concept"] = *rec.gold_concept;
    auto vec = store.vector(r);
    j["vector"] = std::vector<float>(vec.begin(), vec.end());
    out << j.dump() << '\n';
  }
}

EmbeddingStore read_store_any(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  char head[4] = {};
  in.read(head, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(head, kStoreMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  if (binary) return read_store(in);
  return EmbeddingStore(read_store_jsonl(in));
}

Corpus corpus_from_store(const EmbeddingStore& store, std::size_t min_occurrences) {
  return load_corpus(store.records(), min_occurrences);
}

Matrix corpus_vectors(const Corpus& corpus, const EmbeddingStore& store) {
  Matrix m(corpus.num_occurrences(), store.dim());
  for (std::size_t i = 0; i < corpus.num_occurrences(); ++i) {
    const auto& occ = corpus.occurrences()[i];
    auto row = store.find(occ.id);
    if (!row) throw Error(ErrorKind::kConsistency, "no vector for occurrence " + occ.id);
    auto src = store.vector(*row);
    auto dst = m.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return m;
}

}  // namespace cforge
