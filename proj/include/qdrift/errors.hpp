#pragma once

#include <stdexcept>
#include <string>

namespace qdrift {

// Bad input: wrong dimensions, violated preconditions, malformed files.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to produce a trustworthy answer (e.g. the
// eigensolver hit its sweep cap). The CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdrift
