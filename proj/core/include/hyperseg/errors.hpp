#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperseg {

// Base class for all library errors so callers can catch everything from one handler.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ZeroNormError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class VolumeTooSmallError : public Error {
 public:
  using Error::Error;
};

class ChildInfeasibleError : public Error {
 public:
  using Error::Error;
};

class NegativeInfeasibleError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class InvalidKError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

class CheckpointMismatchError : public Error {
 public:
  using Error::Error;
};

// Parse failures carry the byte offset where decoding stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t byte_offset)
      : Error(msg + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
};

}  // namespace hyperseg
