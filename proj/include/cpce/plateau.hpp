#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cpce/estimators.hpp"

namespace cpce {

/// Layer count as a function of qubit count: n^2 or k * n.
struct LayerRule {
  enum class Kind { Quadratic, Linear } kind = Kind::Quadratic;
  std::size_t factor = 1;

  std::size_t layers(std::size_t n) const;
  /// "n2" or "linear:K".
  static LayerRule parse(const std::string& text);
  std::string to_string() const;
};

/// Flat index of the default probe angle: middle layer, qubit 0.
std::size_t default_probe_index(const CircuitSpec& spec);

/// d loss / d theta_mu at `samples` independent Uniform(-pi, pi) parameter
/// draws. Sample s uses init_params(spec, derive_seed(seed, s)).
std::vector<double> gradient_samples(const EstimatorProblem& problem, const CircuitSpec& spec,
                                     std::size_t samples, std::size_t mu, std::uint64_t seed,
                                     std::size_t workers = 1);

/// Unbiased (n - 1 denominator) sample variance.
double sample_variance(std::span<const double> values);

/// Sample variance of gradient_samples. Requires an E-kind problem.
double gradient_variance(const EstimatorProblem& problem, const CircuitSpec& spec,
                         std::size_t samples, std::size_t mu, std::uint64_t seed,
                         std::size_t workers = 1);

/// (sum_r c_r^4 + (sum_r c_r^2)(sum_r t_r^2)) / 2^n with t_r the off-diagonal
/// target entries. The hidden constant of the asymptotic bound is not
/// modelled.
double theorem_bound(const RegularizationParams& c, const SymmetricMatrix& target, std::size_t n);

struct VarianceReport {
  std::size_t n = 0;
  std::size_t layers = 0;
  std::size_t samples = 0;
  double variance = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // variance / bound, NaN when the bound is 0
};

VarianceReport variance_report(const EstimatorProblem& problem, const CircuitSpec& spec,
                               std::size_t samples, std::size_t mu, std::uint64_t seed,
                               std::size_t workers = 1);

/// Plateau probe target on n variables: unit diagonal with every off-diagonal
/// entry equal to `off_diagonal`.
SymmetricMatrix plateau_target(std::size_t n, double off_diagonal);

/// E-kind problem with the given c for the plateau experiments.
EstimatorProblem plateau_problem(const SymmetricMatrix& target, RegularizationParams c);

/// Same seeds, two c schedules.
struct MitigationReport {
  VarianceReport base;
  VarianceReport scaled;
};

MitigationReport mitigation_demo(const SymmetricMatrix& target, const RegularizationParams& base_c,
                                 const RegularizationParams& scaled_c, const CircuitSpec& spec,
                                 std::size_t samples, std::size_t mu, std::uint64_t seed,
                                 std::size_t workers = 1);

/// base_c with the entry of pair (0, 1) multiplied by 2^(n/2).
RegularizationParams exponentially_scaled_c(const RegularizationParams& base_c);

struct VarianceSweepConfig {
  std::vector<std::size_t> qubit_counts{4, 6, 8};
  LayerRule layer_rule{};
  std::size_t samples = 200;
  CSchedule c_schedule{CScheduleKind::Uniform, 1.0};
  double off_diagonal = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<VarianceReport> variance_sweep(const VarianceSweepConfig& config,
                                           std::size_t workers = 1);

}  // namespace cpce
