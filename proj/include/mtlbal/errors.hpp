#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtlbal {

// Vector lengths / table shapes that must agree do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside a function's mathematical domain (log of a nonpositive
// loss, nonpositive scale, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A loss or gradient evaluated to NaN/Inf outside a training loop.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& msg,
                           std::optional<std::size_t> task = std::nullopt)
      : std::runtime_error(msg), task_(task) {}

  std::optional<std::size_t> task() const noexcept { return task_; }

 private:
  std::optional<std::size_t> task_;
};

// Training produced a non-finite value (or a nonpositive loss under the
// log transform). Carries the step it happened at and, when known, the task.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& msg, std::size_t step,
                  std::optional<std::size_t> task = std::nullopt)
      : std::runtime_error(msg), step_(step), task_(task) {}

  std::size_t step() const noexcept { return step_; }
  std::optional<std::size_t> task() const noexcept { return task_; }

 private:
  std::size_t step_;
  std::optional<std::size_t> task_;
};

// Configuration problem; `path` is the dotted key path ("train.lr").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path.empty() ? msg : path + ": " + msg),
        path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace mtlbal
