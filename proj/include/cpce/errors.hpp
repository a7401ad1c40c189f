#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpce {

// Operand shapes disagree (matrix sizes, register sizes, parameter grids).
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Cholesky pivot fell below tolerance.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::size_t index, double pivot);
  std::size_t index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t index_;
  double pivot_;
};

// A triangular factor has a diagonal entry below tolerance.
class SingularFactor : public std::runtime_error {
 public:
  SingularFactor(std::size_t index, double diagonal);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// More pairs than the two-local observable family can host.
class CapacityExceeded : public std::runtime_error {
 public:
  CapacityExceeded(std::size_t demand, std::size_t capacity);
  std::size_t demand() const noexcept { return demand_; }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t demand_;
  std::size_t capacity_;
};

// NaN or Inf surfaced during optimization.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(std::size_t iteration, double value, const std::string& what);
  std::size_t iteration() const noexcept { return iteration_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t iteration_;
  double value_;
};

// Unreadable or malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpce
