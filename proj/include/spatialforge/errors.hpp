#pragma once

#include <stdexcept>
#include <string>

namespace spatialforge {

// Root of every failure the library raises. The CLI maps ValidationError to
// exit code 2 and DataError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Manifest/schema problem, carries a JSON-pointer to the offending field.
class SchemaViolation : public ValidationError {
 public:
  SchemaViolation(std::string pointer, const std::string& what)
      : ValidationError(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Malformed record in a line-oriented file.
class ParseError : public DataError {
 public:
  ParseError(size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_ = 0;
};

struct NonPositiveDepth : ValidationError {
  explicit NonPositiveDepth(const std::string& m) : ValidationError(m) {}
};
struct InvalidFocal : ValidationError {
  explicit InvalidFocal(const std::string& m) : ValidationError(m) {}
};
struct DegenerateBox : ValidationError {
  explicit DegenerateBox(const std::string& m) : ValidationError(m) {}
};
struct EmptyInstance : ValidationError {
  explicit EmptyInstance(const std::string& m) : ValidationError(m) {}
};
struct MissingPlaceholder : ValidationError {
  explicit MissingPlaceholder(const std::string& m) : ValidationError(m) {}
};

// A generator declining to produce a sample for the given scene. The
// pipeline treats these as skips, not hard failures.
class GenSkip : public Error {
 public:
  using Error::Error;
};

struct InsufficientSeparation : GenSkip {
  explicit InsufficientSeparation(const std::string& m) : GenSkip(m) {}
};
struct DistanceTie : GenSkip {
  explicit DistanceTie(const std::string& m) : GenSkip(m) {}
};
struct NoMatchingObjects : GenSkip {
  explicit NoMatchingObjects(const std::string& m) : GenSkip(m) {}
};
struct NoValidAnchors : GenSkip {
  explicit NoValidAnchors(const std::string& m) : GenSkip(m) {}
};
struct NoSignificantMotion : GenSkip {
  explicit NoSignificantMotion(const std::string& m) : GenSkip(m) {}
};
struct DegenerateReference : GenSkip {
  explicit DegenerateReference(const std::string& m) : GenSkip(m) {}
};

}  // namespace spatialforge
