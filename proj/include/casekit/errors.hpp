#pragma once

#include <stdexcept>
#include <string>

namespace casekit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition or documented contract was violated by the caller.
struct ContractViolation : Error {
  using Error::Error;
};

// Input text does not conform to the expected file format.
struct ParseError : Error {
  using Error::Error;
};

// Model deserialization failures, split by cause so callers can tell a
// truncated file from a stale format.
struct CorruptModelError : Error {
  using Error::Error;
};
struct VersionMismatchError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};

}  // namespace casekit
