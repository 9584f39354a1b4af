#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dcqe {

/// Precondition or contract violation on an input value.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A named configuration field violates its constraint.
class InvalidField : public DomainError {
 public:
  InvalidField(std::string field, const std::string& constraint)
      : DomainError(field + ": " + constraint), field_(std::move(field)), constraint_(constraint) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string field_;
  std::string constraint_;
};

/// Requested work exceeds the simulator's resource guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few counts to form the requested estimator.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed probability table failed its own normalization check.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Sinusoid fit did not converge or the data cannot constrain it.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::size_t iterations, double last_step)
      : std::runtime_error(what), iterations_(iterations), last_step_(last_step) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double last_step() const noexcept { return last_step_; }

 private:
  std::size_t iterations_;
  double last_step_;
};

/// Config text problem. `line`/`column` are 1-based; 0 means "not tied to a
/// position" (validation errors). `field` is `section.key` when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field, std::size_t line = 0,
              std::size_t column = 0)
      : std::runtime_error(format(message, field, line, column)),
        field_(std::move(field)),
        line_(line),
        column_(column) {}

  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, const std::string& field,
                            std::size_t line, std::size_t column) {
    std::string out;
    if (line > 0) {
      out += std::to_string(line) + ":" + std::to_string(column) + ": ";
    }
    if (!field.empty()) out += field + ": ";
    return out + message;
  }

  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dcqe
