#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace cpce {

/// xoshiro256** seeded through splitmix64.
///
/// Every random quantity in the library (test matrices, masks, circuit
/// angles) is drawn from this generator so that fixtures reproduce across
/// platforms and standard-library implementations. Gaussian draws use the
/// Box-Muller transform; the second value of each pair is cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> cached_normal_;
};

/// splitmix64 step, exposed for deriving independent child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic child seed for stream `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace cpce
