#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace copula_lab {

// Precondition violations raise std::invalid_argument, numerically degenerate
// configurations raise std::domain_error. The two types below cover I/O.

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Malformed input text; line is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what)
    , line_(line)
  {
  }

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

} // namespace copula_lab
