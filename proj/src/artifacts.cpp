#include "cforge/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>

#include "cforge/error.hpp"

namespace cforge {

using nlohmann::json;

json clusters_to_json(const Corpus& corpus, const InductionResult& result, const json& config,
                      std::uint64_t seed) {
  std::vector<std::vector<std::string>> members(result.concepts.p);
  for (std::size_t o = 0; o < result.concepts.labels.size(); ++o) {
    members[result.concepts.labels[o]].push_back(corpus.occurrences()[o].id);
  }
  json concepts = json::array();
  for (std::size_t k = 0; k < result.concepts.p; ++k) {
    concepts.push_back({{"id", k}, {"lemmas", result.words.clusters.at(k)}, {"occurrences", members[k]}});
  }
  json senses = json::array();
  for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
    const auto& local = result.senses.per_lemma.at(lemma);
    std::vector<std::vector<std::string>> parts(local.k);
    const auto [begin, end] = corpus.lemma_range(lemma);
    for (std::size_t o = begin; o < end; ++o) parts[local.labels[o - begin]].push_back(corpus.occurrences()[o].id);
    senses.push_back({{"lemma", corpus.lemmas()[lemma]}, {"parts", parts}});
  }
  return {{"concepts", concepts}, {"senses", senses}, {"config", config}, {"seed", seed}};
}

ClusterArtifact clusters_from_json(const json& j, const Corpus& corpus) {
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  ClusterArtifact out;
  try {
    std::vector<std::size_t> concept_of(corpus.num_occurrences(), kUnset);
    for (const auto& entry : j.at("concepts")) {
      const auto id = entry.at("id").get<std::size_t>();
      for (const auto& occ : entry.at("occurrences")) {
        if (auto index = corpus.find_occurrence(occ.get<std::string>())) concept_of[*index] = id;
      }
    }
    for (std::size_t o = 0; o < concept_of.size(); ++o) {
      if (concept_of[o] == kUnset) {
        throw Error(ErrorKind::kConsistency, "occurrence " + corpus.occurrences()[o].id + " has no predicted concept");
      }
    }
    const auto canonical = canonical_assignment(concept_of);
    out.result.concepts = {canonical.labels, canonical.k};
    out.result.words = derive_word_clustering(out.result.concepts, corpus);

    std::vector<std::size_t> sense_of(corpus.num_occurrences(), kUnset);
    std::size_t next_part = 0;
    if (j.contains("senses")) {
      for (const auto& entry : j.at("senses")) {
        for (const auto& part : entry.at("parts")) {
          for (const auto& occ : part) {
            if (auto index = corpus.find_occurrence(occ.get<std::string>())) sense_of[*index] = next_part;
          }
          ++next_part;
        }
      }
    }
    out.result.senses.per_lemma.resize(corpus.num_lemmas());
    for (std::size_t lemma = 0; lemma < corpus.num_lemmas(); ++lemma) {
      const auto [begin, end] = corpus.lemma_range(lemma);
      std::vector<std::size_t> labels;
      for (std::size_t o = begin; o < end; ++o) {
        // Without sense information every occurrence is its own part.
        labels.push_back(sense_of[o] == kUnset ? next_part++ : sense_of[o]);
      }
      out.result.senses.per_lemma[lemma] = canonical_assignment(labels);
    }
    out.config = j.value("config", json::object());
    out.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad clusters file: ") + e.what());
  }
  return out;
}

json to_json(const MetricsReport& report) {
  return {{"split", report.split},
          {"system", report.system},
          {"P", report.ci.precision},
          {"R", report.ci.recall},
          {"F1", report.ci.f_beta},
          {"wsi_f1", report.wsi_f1 ? json(*report.wsi_f1) : json(nullptr)},
          {"rho", report.rho ? json(*report.rho) : json(nullptr)},
          {"n_clusters", report.n_clusters}};
}

json to_json(const StatsReport& report) {
  return {{"occurrences", report.occurrences},
          {"lemmas", report.lemmas},
          {"concepts", report.concepts},
          {"occurrences_per_concept", report.occurrences_per_concept},
          {"occurrences_per_lemma", report.occurrences_per_lemma},
          {"d_lex", report.d_lex},
          {"d_polysemy", report.d_polysemy}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

}  // namespace cforge
