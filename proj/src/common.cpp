#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#include "cforge/error.hpp"
#include "cforge/matrix.hpp"
#include "cforge/parallel.hpp"
#include "cforge/random.hpp"

namespace cforge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDegenerateInput: return "degenerate_input";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kDuplicateOccurrence: return "duplicate_occurrence";
    case ErrorKind::kEmptyCorpus: return "empty_corpus";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kMissingAnnotation: return "missing_annotation";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kBadMagic: return "bad_magic";
    case ErrorKind::kVersionMismatch: return "version_mismatch";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kZeroDim: return "zero_dim";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorKind::kConsistency, "row width " + std::to_string(values.size()) +
                                             " does not match matrix width " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

Matrix FloatRowsView::to_matrix() const {
  Matrix m(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    auto src = row(i);
    auto dst = m.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return m;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONCEPT_FORGE_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace cforge
