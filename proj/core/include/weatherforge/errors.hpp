#pragma once

#include <stdexcept>
#include <string>

namespace weatherforge {

// Error categories used across the toolkit. All derive from Error so callers
// can catch everything from this library with one handler.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// File exists but its contents are not a supported format.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Raster dimensions do not match between operands.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// A parameter value is outside its allowed range.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// An input sample violates a domain constraint (e.g. negative depth).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

}  // namespace weatherforge
