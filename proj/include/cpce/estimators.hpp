#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpce/encoding.hpp"
#include "cpce/linalg.hpp"
#include "cpce/optimizer.hpp"
#include "cpce/simulator.hpp"

namespace cpce {

enum class EstimatorKind { C, E };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_kind(const std::string& text);

/// Non-negative scale c_ij per unordered pair, stored by pair rank.
class RegularizationParams {
 public:
  explicit RegularizationParams(std::size_t n, double fill = 0.0);
  RegularizationParams(std::size_t n, std::vector<double> by_pair);

  std::size_t n() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double value);
  std::span<const double> by_pair() const noexcept { return c_; }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

/// Low-rank penalty weight on the discarded Cholesky diagonals.
inline constexpr double kLowRankPenalty = 10.0;

struct EstimatorProblem {
  SymmetricMatrix target;
  RegularizationParams c;
  std::optional<ObservationMask> mask;  // empty: every pair observed
  std::optional<std::size_t> rank;      // C only
  EstimatorKind kind = EstimatorKind::C;

  std::size_t n() const noexcept { return target.size(); }
  std::vector<double> variances() const { return target.diagonal_values(); }
  void validate() const;
};

// ---- C-estimator: Cholesky factor from expectations -----------------------

struct FactorBuild {
  LowerTriangular factor;
  std::vector<double> radicands;       // Var(X_i) - sum_l c_li^2 x_li^2
  std::vector<std::size_t> clamped;    // indices with a negative radicand
};

/// L[i][j] = c_ji x_ji below the diagonal and
/// L[i][i] = sqrt(max(0, Var(X_i) - sum_{l<i} c_li^2 x_li^2)).
/// x is indexed by pair rank.
FactorBuild c_build_factor(std::span<const double> x, const RegularizationParams& c,
                           std::span<const double> variances);

struct FeasibilityReport {
  std::vector<bool> holds;           // for the given x, per row i (row 0 always true)
  std::vector<bool> holds_a_priori;  // for every |x| <= 1
  bool all() const;
  bool all_a_priori() const;
};

FeasibilityReport c_feasibility(std::span<const double> x, const RegularizationParams& c,
                                std::span<const double> variances);

/// c_li = sqrt(Var(X_i) / i) for l < i (0-based), so no radicand can go
/// negative for any circuit output.
RegularizationParams default_c_for_C(std::span<const double> variances);

/// c_li = sqrt(Var(X_i)): every true Cholesky entry of row i is reachable,
/// at the price of possible clamping.
RegularizationParams correlation_c_for_C(std::span<const double> variances);

// ---- E-estimator -------------------------------------------------------------

enum class EMode { Guaranteed, Correlation };

/// Guaranteed: min(V_i, V_j) / (n - 1). Correlation: sqrt(V_i V_j).
RegularizationParams default_c_for_E(std::span<const double> variances, EMode mode);

/// Row-wise diagonal dominance: sum of c over row k <= Var(X_k) for all k.
bool e_psd_condition(const RegularizationParams& c, std::span<const double> variances);

/// Sigma_ij = c_ij x_ij off the diagonal, Var(X_i) on it.
SymmetricMatrix e_sigma_from_expectations(std::span<const double> x,
                                          const RegularizationParams& c,
                                          std::span<const double> variances);

// ---- regularization schedules -------------------------------------------------

enum class CScheduleKind { Guaranteed, Correlation, Uniform };

struct CSchedule {
  CScheduleKind kind = CScheduleKind::Correlation;
  double value = 1.0;  // Uniform only

  /// "guaranteed", "correlation" or "uniform:VALUE".
  static CSchedule parse(const std::string& text);
  std::string to_string() const;
};

RegularizationParams make_c(EstimatorKind kind, const CSchedule& schedule,
                            std::span<const double> variances);

// ---- losses over the circuit -----------------------------------------------

/// Loss, gradient and estimate of one problem on one circuit. The observable
/// assignment is c_assignment for C (eta(n, 2) qubits) and e_family for E
/// (n qubits).
class CovarianceObjective {
 public:
  CovarianceObjective(EstimatorProblem problem, CircuitSpec spec);

  const EstimatorProblem& problem() const noexcept { return problem_; }
  const CircuitSpec& spec() const noexcept { return spec_; }
  const ObservableAssignment& assignment() const noexcept { return assignment_; }

  /// Expectations x_r by pair rank.
  std::vector<double> expectations(const ParamSet& params) const;

  double loss(const ParamSet& params) const;
  ParamSet gradient(const ParamSet& params) const;
  /// d loss / d theta_mu only.
  double partial(const ParamSet& params, std::size_t mu) const;

  // Same quantities from given expectations; dloss_dx is indexed by pair.
  double loss_from_expectations(std::span<const double> x) const;
  std::vector<double> dloss_dx(std::span<const double> x) const;

  struct Estimate {
    SymmetricMatrix sigma_hat;
    std::optional<LowerTriangular> factor;
    std::vector<std::size_t> clamped;
    double loss;
  };
  Estimate estimate_from_expectations(std::span<const double> x) const;
  Estimate estimate(const ParamSet& params) const;

 private:
  bool pair_included(std::size_t r) const;

  EstimatorProblem problem_;
  CircuitSpec spec_;
  ObservableAssignment assignment_;
  PairIndexing pairs_;
  std::vector<bool> included_;
};

/// Circuit for a problem: eta(n, 2) qubits for C, n for E.
CircuitSpec circuit_for(EstimatorKind kind, std::size_t n, std::size_t layers);

double c_loss(const ParamSet& params, const EstimatorProblem& problem, const CircuitSpec& spec);
double c_lowrank_loss(const ParamSet& params, const EstimatorProblem& problem,
                      const CircuitSpec& spec);
SymmetricMatrix e_entries(const ParamSet& params, const EstimatorProblem& problem,
                          const CircuitSpec& spec);
double e_loss(const ParamSet& params, const EstimatorProblem& problem, const CircuitSpec& spec);
ParamSet e_loss_gradient(const ParamSet& params, const EstimatorProblem& problem,
                         const CircuitSpec& spec);
ParamSet c_loss_gradient(const ParamSet& params, const EstimatorProblem& problem,
                         const CircuitSpec& spec);

// ---- end to end ----------------------------------------------------------------

struct EstimateResult {
  std::size_t n = 0;
  EstimatorKind kind = EstimatorKind::C;
  SymmetricMatrix sigma_hat{2};
  std::optional<LowerTriangular> factor;
  std::vector<std::size_t> clamped_diagonals;
  double final_loss = 0.0;
  Trace trace;
  std::uint64_t seed = 0;
};

/// Minimizes the problem's loss from init_params(spec, config.seed). The
/// trace MAE is taken against `reference` when given, else the target.
/// The returned estimate is evaluated at the lowest-loss iterate.
EstimateResult estimate(const EstimatorProblem& problem, const CircuitSpec& spec,
                        const OptimizerConfig& config,
                        const std::optional<SymmetricMatrix>& reference = std::nullopt);

struct CompletionResult {
  EstimateResult result;
  SymmetricMatrix filled;
  std::optional<double> full_mae;  // against the hidden target when supplied
};

/// Fits the masked loss and fills every entry from the learned circuit.
CompletionResult complete(const EstimatorProblem& problem, const CircuitSpec& spec,
                          const OptimizerConfig& config,
                          const std::optional<SymmetricMatrix>& hidden_target = std::nullopt);

/// Independent runs with init seeds base_seed + run. Failed runs are
/// reported in `failures` and left out of the aggregate.
struct MultiRunResult {
  AggregatedTrace aggregate;
  std::vector<EstimateResult> runs;           // completed runs, by index
  std::vector<std::size_t> run_indices;       // index of each completed run
  std::vector<std::string> failures;
};

MultiRunResult multi_run(const EstimatorProblem& problem, const CircuitSpec& spec,
                         const OptimizerConfig& config, std::size_t runs,
                         std::uint64_t base_seed,
                         const std::optional<SymmetricMatrix>& reference = std::nullopt,
                         std::size_t workers = 0);

nlohmann::json to_json(const EstimateResult& result);

}  // namespace cpce
