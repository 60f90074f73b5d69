#pragma once

#include <stdexcept>
#include <string>

namespace dehnlift {

// Syntax or reference error in a .jd / .mono document. Line numbers are
// 1-based; line 0 means "no specific line".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Diagram shapes the face tracer cannot handle (disconnected component
// graphs, empty components).
class UnsupportedDiagramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sister identification fails to close into triple points.
class TripleClosureError : public std::runtime_error {
 public:
  TripleClosureError(const std::string& message, const std::string& flag)
      : std::runtime_error(message + " (at flag " + flag + ")"), flag_(flag) {}

  const std::string& flag() const { return flag_; }

 private:
  std::string flag_;
};

// Monodromy data inconsistent with the diagram (sphere relation, missing
// points, unrealizable cut system, lambda/alignment mismatch).
class MonodromyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failed preconditions on otherwise well-formed input.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A postcondition of the construction itself failed; indicates a bug in a
// convention, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dehnlift
