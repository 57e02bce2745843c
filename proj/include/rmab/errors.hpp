#pragma once

#include <stdexcept>
#include <string>

namespace rmab {

/// Model data that violates a structural requirement (stochasticity,
/// ergodicity, reversibility, positivity).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReversibilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Player/environment handshake broken (feedback for an arm that was not
/// played, a choice outside 1..N, ...).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad experiment configuration. `path` names the offending field, e.g.
/// "arms[1].kernel".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace rmab
