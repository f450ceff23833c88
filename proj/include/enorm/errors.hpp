#pragma once

#include <stdexcept>

namespace enorm {

// Error taxonomy mirrored by the CLI exit codes:
//   UsageError -> 1, ParseError/ValidationError -> 2, InfeasibleError -> 3.

// Malformed input files: bad CSV rows, broken JSON, wrong headers.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant (non-positive energy,
// dangling hardware reference, duplicate keys, dimension mismatches).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An experiment that cannot be run as specified, e.g. fewer reference
// points than the regression needs.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad flag combinations and similar caller mistakes.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace enorm
