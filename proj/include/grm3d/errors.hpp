#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grm3d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text input. `offset()` is the byte (or line, for text
/// formats) position where parsing stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, int person_id)
      : Error(what + " (person " + std::to_string(person_id) + ")"), person_id_(person_id) {}

  int person_id() const noexcept { return person_id_; }

 private:
  int person_id_;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace grm3d
