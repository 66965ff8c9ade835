#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cforge/corpus.hpp"
#include "cforge/error.hpp"

namespace testing {

inline cforge::OccurrenceRecord record(const std::string& id, const std::string& lemma,
                                       std::optional<std::string> concept_id = std::nullopt,
                                       const std::string& pos = "n") {
  static std::uint32_t token = 0;
  return {id, lemma, pos, "sent-" + id, token++, std::move(concept_id)};
}

// Gold {k1: {aaa, bbb}, k2: {aaa}, k3: {ccc}} with six occurrences.
inline std::vector<cforge::OccurrenceRecord> small_gold_records() {
  return {record("a1", "aaa", "k1"), record("a2", "aaa", "k1"), record("a3", "aaa", "k2"),
          record("b1", "bbb", "k1"), record("c1", "ccc", "k3"), record("c2", "ccc", "k3")};
}

template <typename F>
std::optional<cforge::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const cforge::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testing
