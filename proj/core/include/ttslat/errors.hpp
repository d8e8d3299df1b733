#pragma once

#include <stdexcept>
#include <string>

namespace ttslat {

// Input file is unreadable or not syntactically valid.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A loaded value violates a documented invariant; the message names the field.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Exact vote enumeration would exceed the outcome-count guard; callers should
// fall back to the Monte Carlo estimator.
class EnumerationLimitError : public std::runtime_error {
 public:
  explicit EnumerationLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ttslat
