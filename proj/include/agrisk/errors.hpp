#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace agrisk {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative kernel hit its iteration cap. Carries the last iterate and the
// residual at that point.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_iterate, double residual)
      : std::runtime_error(what), last_iterate_(last_iterate), residual_(residual) {}

  double last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_iterate_;
  double residual_;
};

// Convergence failure raised inside a simulation, tagged with where it happened.
class TrialError : public ConvergenceError {
 public:
  TrialError(const ConvergenceError& cause, std::size_t layer_index, std::size_t trial_id,
             std::size_t event_position, std::size_t xelt_id);

  std::size_t layer_index() const noexcept { return layer_index_; }
  std::size_t trial_id() const noexcept { return trial_id_; }
  std::size_t event_position() const noexcept { return event_position_; }
  std::size_t xelt_id() const noexcept { return xelt_id_; }

 private:
  std::size_t layer_index_;
  std::size_t trial_id_;
  std::size_t event_position_;
  std::size_t xelt_id_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while decoding a file. offset is the byte position where decoding
// stopped; for CSV input, the first byte of the offending line.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace agrisk
