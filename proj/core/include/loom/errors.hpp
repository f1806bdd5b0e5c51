#pragma once

#include <stdexcept>
#include <string>

namespace loom {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed Xapi text. Carries the 1-based source line when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Invalid knowledge-base content or an unknown word in strict mode.
class KnowledgeError : public Error {
 public:
  using Error::Error;
};

/// A reference that could not be bound to an instance or scene.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A sentence that is well formed but violates an execution rule
/// (identity constraints, unknown scenes, arity).
class SemanticError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace loom
