#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipsr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (depth out of range, bad thresholds, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Raised when extraction stays empty for several consecutive iterations.
class CollapseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line` is 1-based for text content, 0 when the
/// failure is located by byte offset in binary content.
class ParseError : public IoError {
 public:
  ParseError(const std::string& path, const std::string& msg, std::uint64_t line,
             std::uint64_t byte_offset)
      : IoError(path + ":" + (line ? "line " + std::to_string(line)
                                   : "byte " + std::to_string(byte_offset)) +
                ": " + msg),
        line_(line),
        byte_offset_(byte_offset) {}
  std::uint64_t line() const { return line_; }
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t line_;
  std::uint64_t byte_offset_;
};

}  // namespace ipsr
