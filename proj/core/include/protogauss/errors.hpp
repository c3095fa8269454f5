#pragma once

#include <stdexcept>
#include <string>

namespace protogauss {

// Malformed input text (ontology, embedding, config or model files).
// line is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message, int line = 0)
      : std::runtime_error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Structurally valid input that violates a semantic requirement:
// subsumption cycles, unknown names, missing vectors, bad argument lists.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values fed to or produced by a numeric routine.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace protogauss
