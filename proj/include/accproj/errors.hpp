#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace accproj {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A factorization found numerically dependent columns.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class ZeroMatrix : public Error {
 public:
  using Error::Error;
};

class Singular : public Error {
 public:
  using Error::Error;
};

/// A'b vanishes, so no starting projection can be formed.
class OrthogonalRhs : public Error {
 public:
  using Error::Error;
};

class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

/// Row block `block()` of a partition could not be factored. Changing the
/// block size or permuting rows usually fixes it.
class RankDeficientBlock : public Error {
 public:
  RankDeficientBlock(std::size_t block, const std::string& what)
      : Error(what), block_(block) {}
  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class SingularBlock : public Error {
 public:
  SingularBlock(std::size_t block, const std::string& what)
      : Error(what), block_(block) {}
  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedField : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace accproj
