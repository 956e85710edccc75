#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ilac {

// Bad shapes, out-of-range labels, empty operand lists and similar caller errors.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cosine similarity against an all-zero vector.
class UndefinedSimilarity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// classify() against an associative memory whose class vectors are all zero.
class NoTrainedClasses : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transmission time or round time requested at rate 0.
class InfeasibleRate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Q = 0 makes the cost-to-performance ratio meaningless.
class DegeneratePerformance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exhaustive assignment refused because the instance is over the size guard.
class GuardExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// No feasible point exists. clients() names the offending clients when known.
class Infeasible : public std::runtime_error {
 public:
  explicit Infeasible(const std::string& what, std::vector<std::size_t> clients = {})
      : std::runtime_error(what), clients_(std::move(clients)) {}

  const std::vector<std::size_t>& clients() const noexcept { return clients_; }

 private:
  std::vector<std::size_t> clients_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace ilac
