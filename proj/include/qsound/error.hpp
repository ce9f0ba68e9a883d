#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsound {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected argument or configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the offending path and 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsound
