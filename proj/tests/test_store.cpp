#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cforge/embedding_store.hpp"
#include "helpers.hpp"

using namespace cforge;
using testing::error_kind;
using testing::record;

namespace {

EmbeddingRows sample_rows() {
  EmbeddingRows rows;
  rows.dim = 3;
  rows.records = {record("b2", "bbb", "k1"), record("a1", "aaa"), record("b1", "bbb", "k2")};
  rows.values = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  return rows;
}

std::string serialize(const EmbeddingStore& s) {
  std::ostringstream out;
  write_store(s, out);
  return out.str();
}

template <typename T>
void poke(std::string& bytes, std::size_t offset, T value) {
  std::memcpy(bytes.data() + offset, &value, sizeof value);
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("records are kept in lemma then id order") {
    const EmbeddingStore s(sample_rows());
    REQUIRE(s.size() == 3);
    CHECK(s.records()[0].id == "a1");
    CHECK(s.records()[1].id == "b1");
    CHECK(s.records()[2].id == "b2");
    CHECK(s.vector(1)[0] == 7.0f);
    CHECK(*s.find("b2") == 2);
    CHECK(s.lemmas() == std::vector<std::string>{"aaa", "bbb"});
    const auto view = s.vectors_for_lemma("bbb");
    CHECK(view.rows == 2);
    CHECK(view.row(1)[2] == 3.0f);
    CHECK(error_kind([&] { s.vectors_for_lemma("zzz"); }) == ErrorKind::kLookup);
  }

  TEST_CASE("binary round trip is lossless") {
    const EmbeddingStore s(sample_rows());
    const auto bytes = serialize(s);
    std::istringstream in(bytes);
    const auto back = read_store(in);
    CHECK(back == s);
    CHECK(back.records()[2].gold_concept == std::optional<std::string>("k1"));
    CHECK_FALSE(back.records()[0].gold_concept.has_value());
  }

  TEST_CASE("header layout") {
    const EmbeddingStore store(sample_rows());
    const auto bytes = serialize(store);
    REQUIRE(bytes.size() > kStoreHeaderBytes);
    CHECK(bytes.substr(0, 4) == "CIEM");
    std::uint32_t version = 0, dim = 0;
    std::uint64_t count = 0;
    std::memcpy(&version, bytes.data() + 4, 4);
    std::memcpy(&dim, bytes.data() + 8, 4);
    std::memcpy(&count, bytes.data() + 16, 8);
    CHECK(version == 1);
    CHECK(dim == 3);
    CHECK(count == 3);
    std::size_t expected = kStoreHeaderBytes;
    for (const auto& r : store.records()) {
      expected += 4 + r.id.size() + 4 + r.lemma.size() + 4 + r.sentence_id.size() + 4 + 4 +
                  (r.gold_concept ? r.gold_concept->size() : 0) + 3 * 4;
    }
    CHECK(bytes.size() == expected);
  }

  TEST_CASE("reader rejects corrupt files") {
    const auto good = serialize(EmbeddingStore(sample_rows()));
    auto read = [](const std::string& b) {
      std::istringstream in(b);
      read_store(in);
    };
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(error_kind([&] { read(bad_magic); }) == ErrorKind::kBadMagic);
    auto bad_version = good;
    poke<std::uint32_t>(bad_version, 4, 2);
    CHECK(error_kind([&] { read(bad_version); }) == ErrorKind::kVersionMismatch);
    auto zero_dim = good;
    poke<std::uint32_t>(zero_dim, 8, 0);
    CHECK(error_kind([&] { read(zero_dim); }) == ErrorKind::kZeroDim);
    CHECK(error_kind([&] { read(good.substr(0, 10)); }) == ErrorKind::kTruncated);
    CHECK(error_kind([&] { read(good.substr(0, good.size() - 1)); }) == ErrorKind::kTruncated);
    auto more = good;
    poke<std::uint64_t>(more, 16, 4);
    try {
      read(more);
      FAIL("expected truncation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kTruncated);
      CHECK(std::string(e.what()).find("expected 4 records, found 3") != std::string::npos);
    }
  }

  TEST_CASE("validation") {
    auto rows = sample_rows();
    rows.values[4] = std::numeric_limits<float>::quiet_NaN();
    CHECK(error_kind([&] { EmbeddingStore s(rows); }) == ErrorKind::kValidation);
    rows = sample_rows();
    rows.values[3] = rows.values[4] = rows.values[5] = 0.0f;
    CHECK(error_kind([&] { EmbeddingStore s(rows); }) == ErrorKind::kValidation);
    rows = sample_rows();
    rows.values.pop_back();
    CHECK(error_kind([&] { EmbeddingStore s(rows); }) == ErrorKind::kValidation);
    rows = sample_rows();
    rows.records[1].id = "b2";
    CHECK(error_kind([&] { EmbeddingStore s(rows); }) == ErrorKind::kDuplicateOccurrence);
    rows = sample_rows();
    rows.dim = 0;
    CHECK(error_kind([&] { EmbeddingStore s(rows); }) == ErrorKind::kZeroDim);
  }

  TEST_CASE("JSONL mirror round trip and format sniffing") {
    const EmbeddingStore s(sample_rows());
    std::stringstream ss;
    write_store_jsonl(s, ss);
    CHECK(EmbeddingStore(read_store_jsonl(ss)) == s);

    const auto dir = std::filesystem::temp_directory_path() / "cforge_store_test";
    std::filesystem::create_directories(dir);
    write_store_file(s, (dir / "a.ciem").string());
    {
      std::ofstream out(dir / "a.jsonl");
      write_store_jsonl(s, out);
    }
    CHECK(read_store_any((dir / "a.ciem").string()) == s);
    CHECK(read_store_any((dir / "a.jsonl").string()) == s);
    CHECK(error_kind([&] { read_store_file((dir / "missing.ciem").string()); }) == ErrorKind::kIo);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("corpus vectors follow corpus order") {
    const EmbeddingStore s(sample_rows());
    const Corpus c = corpus_from_store(s, 1);
    const Matrix m = corpus_vectors(c, s);
    REQUIRE(m.rows() == 3);
    CHECK(m(0, 0) == 4.0);
    CHECK(m(1, 0) == 7.0);
    CHECK(m(2, 0) == 1.0);

    const Corpus other = load_corpus({record("zz", "aaa")}, 1);
    CHECK(error_kind([&] { corpus_vectors(other, s); }) == ErrorKind::kConsistency);
  }
}
