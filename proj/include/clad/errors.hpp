#pragma once

#include <stdexcept>
#include <string>

namespace clad {

// Error taxonomy mirrored by the CLI exit codes:
//   UsageError -> 1 (bad flags, bad config keys, out-of-range parameters)
//   DataError  -> 2 (malformed or inconsistent input data)
//   NumericError -> 3 (non-finite values, failed numeric invariants)
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace clad
