#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heavytail {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range (n < 2, q outside (0,1), ...).
class BadConfig : public Error {
 public:
  using Error::Error;
};

/// The sample holds fewer observations than there are blocks.
class InsufficientSample : public Error {
 public:
  using Error::Error;
};

/// Every centered block sum vanishes, so the statistic is 0/0.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (e.g. quantile at p = 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed sample or spec file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& reason, std::size_t line, const std::string& source = {})
      : Error(format(reason, line, source)), reason_(reason), line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  static std::string format(const std::string& reason, std::size_t line,
                            const std::string& source) {
    std::string out = source;
    if (line != 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
    return out.empty() ? reason : out + ": " + reason;
  }

  std::string reason_;
  std::size_t line_;
};

}  // namespace heavytail
