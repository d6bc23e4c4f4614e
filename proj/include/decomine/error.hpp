#pragma once

#include <stdexcept>
#include <string>

namespace decomine {

// Attribute index outside the dataset's attribute range.
class ScopeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid numeric parameter (probability outside [0,1], zero sizes, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input text. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A candidate family that is not downward closed or does not cover the
// attributes.
class FamilyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query referring to unknown attributes or otherwise unusable.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A brute-force routine asked to run beyond its size cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Results that must agree (derived from one dataset) do not.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace decomine
