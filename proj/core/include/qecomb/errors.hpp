#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qecomb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidEdit : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

// Malformed input; line is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingProbability : public Error {
 public:
  using Error::Error;
};

class TooManyEdits : public Error {
 public:
  using Error::Error;
};

class ModelNotLoaded : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class RosterMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised by scorers that talk to something outside the process.
class ScorerError : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qecomb
