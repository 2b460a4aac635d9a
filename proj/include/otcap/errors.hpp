#pragma once

#include <stdexcept>
#include <string>

namespace otcap {

// Invalid numerical input: bad simplex, dimension mismatch, out-of-range knob.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed text input; carries the 1-based line number when known (0 = unknown).
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace otcap
