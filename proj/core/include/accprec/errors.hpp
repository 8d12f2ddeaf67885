#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace accprec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A pivot was exactly zero (or a factor entry vanished) at `index`.
class SingularError : public Error {
 public:
  SingularError(std::size_t index, const std::string& what)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t index)
      : Error("nonpositive pivot in Cholesky at row " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Row `index` has a negative dominance slack.
class NotRowDominant : public Error {
 public:
  explicit NotRowDominant(std::size_t index)
      : Error("matrix is not row diagonally dominant at row " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class BadDiagonal : public Error {
 public:
  explicit BadDiagonal(std::size_t index)
      : Error("nonpositive diagonal entry at row " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// K = A - M would not be exact in working precision.
class RefuseInexactSplit : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened for reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace accprec
