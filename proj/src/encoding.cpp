#include "cpce/encoding.hpp"

#include <stdexcept>

#include "json.hpp"

#include "cpce/errors.hpp"

namespace cpce {

PairIndexing::PairIndexing(std::size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("PairIndexing requires n >= 2");
  order_.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) order_.emplace_back(i, j);
}

std::size_t PairIndexing::rank_of(std::size_t n, std::size_t i, std::size_t j) {
  if (i == j || i >= n || j >= n) throw std::out_of_range("PairIndexing: invalid pair");
  if (i > j) std::swap(i, j);
  // Pairs starting below i: sum_{a < i} (n - 1 - a).
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::size_t eta(std::size_t n, unsigned k) {
  if (k != 2 && k != 3) throw std::invalid_argument("eta: locality must be 2 or 3");
  if (n < 2) throw std::invalid_argument("eta: need n >= 2");
  const std::size_t demand = pair_count(n);
  // Smallest e with e^k >= demand, computed in integers.
  std::size_t e = 1;
  auto power = [k](std::size_t base) {
    std::size_t p = 1;
    for (unsigned t = 0; t < k; ++t) p *= base;
    return p;
  };
  while (power(e) < demand) ++e;
  return std::max<std::size_t>(2, e);
}

std::vector<PauliString> c_family(std::size_t eta) {
  if (eta < 2) throw std::invalid_argument("c_family: need at least two qubits");
  std::vector<PauliString> family;
  family.reserve(3 * pair_count(eta));
  for (Pauli letter : {Pauli::X, Pauli::Y, Pauli::Z})
    for (std::size_t a = 0; a < eta; ++a)
      for (std::size_t b = a + 1; b < eta; ++b)
        family.push_back(PauliString::on_sites(eta, letter, {a, b}));
  return family;
}

ObservableAssignment c_assignment(std::size_t n) {
  const std::size_t qubits = eta(n, 2);
  std::vector<PauliString> family = c_family(qubits);
  const std::size_t demand = pair_count(n);
  if (demand > family.size()) throw CapacityExceeded(demand, family.size());
  family.resize(demand);
  return {n, qubits, std::move(family)};
}

ObservableAssignment e_family(std::size_t n) {
  const PairIndexing pairs(n);
  ObservableAssignment a{n, n, {}};
  a.observables.reserve(pairs.size());
  for (const auto& [i, j] : pairs.order())
    a.observables.push_back(PauliString::on_sites(n, Pauli::X, {i, j}));
  return a;
}

nlohmann::json to_json(const ObservableAssignment& assignment) {
  const PairIndexing pairs(assignment.n);
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < assignment.observables.size(); ++r) {
    const auto [i, j] = pairs.pair(r);
    out.push_back({{"r", r}, {"i", i}, {"j", j},
                   {"letters", assignment.observables[r].to_string()}});
  }
  return out;
}

}  // namespace cpce
