#include "cpce/errors.hpp"

namespace cpce {

NotPositiveDefinite::NotPositiveDefinite(std::size_t index, double pivot)
    : std::runtime_error("matrix is not positive definite: pivot " +
                         std::to_string(index) + " is " +
                         std::to_string(pivot)),
      index_(index),
      pivot_(pivot) {}

SingularFactor::SingularFactor(std::size_t index, double diagonal)
    : std::runtime_error("triangular factor is singular: diagonal " +
                         std::to_string(index) + " is " +
                         std::to_string(diagonal)),
      index_(index) {}

CapacityExceeded::CapacityExceeded(std::size_t demand, std::size_t capacity)
    : std::runtime_error("observable capacity exceeded: " +
                         std::to_string(demand) + " pairs but only " +
                         std::to_string(capacity) + " two-local strings"),
      demand_(demand),
      capacity_(capacity) {}

NumericalAbort::NumericalAbort(std::size_t iteration, double value,
                               const std::string& what)
    : std::runtime_error("non-finite " + what + " at iteration " +
                         std::to_string(iteration) + ": " +
                         std::to_string(value)),
      iteration_(iteration),
      value_(value) {}

}  // namespace cpce
