#pragma once

#include <stdexcept>
#include <string>

namespace cforge {

enum class ErrorKind {
  kParameter,
  kDegenerateInput,
  kConsistency,
  kDuplicateOccurrence,
  kEmptyCorpus,
  kLookup,
  kMissingAnnotation,
  kValidation,
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kZeroDim,
  kParse,
};

const char* to_string(ErrorKind kind);

// All engine failures are reported through this type; `kind()` is stable and
// is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cforge
