#pragma once

#include <stdexcept>
#include <string>

namespace tropc {

/// Malformed input: bad JSON, bad schema, bad CLI usage. CLI exit code 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence, exhausted sampling budget,
/// orbit leaving the numerical interior. CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure, including refusing to overwrite without --force.
/// CLI exit code 1.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tropc
