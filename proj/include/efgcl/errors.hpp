#pragma once

#include <stdexcept>
#include <string>

namespace efgcl {

/// Shapes or settings that cannot work together (layer sizes, observation
/// lengths, malformed configuration records).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The integrator produced a non-finite state.
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration text that does not parse; the message names key and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& key, int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", key '" + key +
                           "': " + what),
        key_(key),
        line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace efgcl
