#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cpce/simulator.hpp"

namespace cpce {

/// n choose 2.
constexpr std::size_t pair_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

/// Bijection between pairs (i, j), i < j, and their lexicographic rank
/// r in [0, C(n, 2)).
class PairIndexing {
 public:
  explicit PairIndexing(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return pair_count(n_); }
  /// Accepts either order of (i, j); i != j.
  std::size_t index(std::size_t i, std::size_t j) const { return rank_of(n_, i, j); }
  static std::size_t rank_of(std::size_t n, std::size_t i, std::size_t j);
  std::pair<std::size_t, std::size_t> pair(std::size_t r) const { return order_.at(r); }
  const std::vector<std::pair<std::size_t, std::size_t>>& order() const noexcept { return order_; }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> order_;
};

/// Register size for n variables with k-local observables:
/// max(2, ceil(C(n,2)^(1/k))). k must be 2 or 3.
std::size_t eta(std::size_t n, unsigned k = 2);

/// All two-local strings on eta qubits: XX over pairs (a, b), a < b in
/// lexicographic order, then the YY sweep, then ZZ. 3 * C(eta, 2) strings.
std::vector<PauliString> c_family(std::size_t eta);

/// Pair rank r -> observable on an eta-qubit register.
struct ObservableAssignment {
  std::size_t n = 0;
  std::size_t eta = 0;
  std::vector<PauliString> observables;
};

/// C-estimator assignment on eta(n, 2) qubits: pair r gets c_family[r].
/// Throws CapacityExceeded if the family is too small.
ObservableAssignment c_assignment(std::size_t n);

/// E-estimator assignment on n qubits: pair (i, j) gets X at i and j.
ObservableAssignment e_family(std::size_t n);

/// [{r, i, j, letters}, ...]
nlohmann::json to_json(const ObservableAssignment& assignment);

}  // namespace cpce
