#include "cpce/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cpce/errors.hpp"

namespace cpce {

std::string to_string(EstimatorKind kind) { return kind == EstimatorKind::C ? "c" : "e"; }

EstimatorKind parse_kind(const std::string& text) {
  if (text == "c" || text == "C") return EstimatorKind::C;
  if (text == "e" || text == "E") return EstimatorKind::E;
  throw std::invalid_argument("unknown estimator kind '" + text + "' (expected c or e)");
}

RegularizationParams::RegularizationParams(std::size_t n, double fill)
    : n_(n), c_(pair_count(n), fill) {
  if (n < 2) throw std::invalid_argument("RegularizationParams requires n >= 2");
  if (fill < 0.0) throw std::invalid_argument("RegularizationParams: c must be >= 0");
}

RegularizationParams::RegularizationParams(std::size_t n, std::vector<double> by_pair)
    : n_(n), c_(std::move(by_pair)) {
  if (n < 2) throw std::invalid_argument("RegularizationParams requires n >= 2");
  if (c_.size() != pair_count(n)) throw ShapeMismatch("RegularizationParams: wrong pair count");
  for (double v : c_)
    if (!(v >= 0.0)) throw std::invalid_argument("RegularizationParams: c must be >= 0");
}

double RegularizationParams::operator()(std::size_t i, std::size_t j) const {
  return c_[PairIndexing::rank_of(n_, i, j)];
}

void RegularizationParams::set(std::size_t i, std::size_t j, double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("RegularizationParams: c must be >= 0");
  c_[PairIndexing::rank_of(n_, i, j)] = value;
}

void EstimatorProblem::validate() const {
  const std::size_t size = n();
  for (std::size_t i = 0; i < size; ++i)
    if (!(target(i, i) >= 0.0))
      throw std::invalid_argument("estimator: target diagonal must be non-negative");
  if (c.n() != size) throw ShapeMismatch("estimator: regularization size differs from target");
  if (mask && mask->dimension() != size)
    throw ShapeMismatch("estimator: mask size differs from target");
  if (rank) {
    if (kind != EstimatorKind::C)
      throw std::invalid_argument("estimator: rank targets apply to the C kind only");
    if (*rank < 1 || *rank > size) throw std::invalid_argument("estimator: rank out of range");
  }
}

// ---- C-estimator -------------------------------------------------------------

FactorBuild c_build_factor(std::span<const double> x, const RegularizationParams& c,
                           std::span<const double> variances) {
  const std::size_t n = variances.size();
  if (c.n() != n || x.size() != pair_count(n))
    throw ShapeMismatch("c_build_factor: inconsistent sizes");
  const PairIndexing pairs(n);
  FactorBuild build{LowerTriangular(n), std::vector<double>(n, 0.0), {}};
  const auto cp = c.by_pair();
  for (std::size_t i = 0; i < n; ++i) {
    double radicand = variances[i];
    for (std::size_t l = 0; l < i; ++l) {
      const std::size_t r = pairs.index(l, i);
      const double entry = cp[r] * x[r];
      build.factor.set(i, l, entry);
      radicand -= entry * entry;
    }
    build.radicands[i] = radicand;
    if (radicand < 0.0) build.clamped.push_back(i);
    build.factor.set(i, i, std::sqrt(std::max(0.0, radicand)));
  }
  return build;
}

bool FeasibilityReport::all() const {
  return std::all_of(holds.begin(), holds.end(), [](bool b) { return b; });
}

bool FeasibilityReport::all_a_priori() const {
  return std::all_of(holds_a_priori.begin(), holds_a_priori.end(), [](bool b) { return b; });
}

FeasibilityReport c_feasibility(std::span<const double> x, const RegularizationParams& c,
                                std::span<const double> variances) {
  const std::size_t n = variances.size();
  if (c.n() != n || x.size() != pair_count(n))
    throw ShapeMismatch("c_feasibility: inconsistent sizes");
  const PairIndexing pairs(n);
  FeasibilityReport report{std::vector<bool>(n, true), std::vector<bool>(n, true)};
  const auto cp = c.by_pair();
  for (std::size_t i = 1; i < n; ++i) {
    double used = 0.0;
    double worst = 0.0;
    for (std::size_t l = 0; l < i; ++l) {
      const std::size_t r = pairs.index(l, i);
      used += cp[r] * cp[r] * x[r] * x[r];
      worst += cp[r] * cp[r];
    }
    report.holds[i] = used <= variances[i];
    // i equal terms of V_i / i may sum to a hair above V_i
    report.holds_a_priori[i] = worst <= variances[i] * (1.0 + 1e-12);
  }
  return report;
}

RegularizationParams default_c_for_C(std::span<const double> variances) {
  const std::size_t n = variances.size();
  RegularizationParams c(n);
  for (std::size_t i = 1; i < n; ++i) {
    const double value = std::sqrt(variances[i] / static_cast<double>(i));
    for (std::size_t l = 0; l < i; ++l) c.set(l, i, value);
  }
  return c;
}

RegularizationParams correlation_c_for_C(std::span<const double> variances) {
  const std::size_t n = variances.size();
  RegularizationParams c(n);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t l = 0; l < i; ++l) c.set(l, i, std::sqrt(variances[i]));
  return c;
}

// ---- E-estimator -------------------------------------------------------------

RegularizationParams default_c_for_E(std::span<const double> variances, EMode mode) {
  const std::size_t n = variances.size();
  RegularizationParams c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double value = mode == EMode::Guaranteed
                               ? std::min(variances[i], variances[j]) / static_cast<double>(n - 1)
                               : std::sqrt(variances[i] * variances[j]);
      c.set(i, j, value);
    }
  return c;
}

bool e_psd_condition(const RegularizationParams& c, std::span<const double> variances) {
  const std::size_t n = variances.size();
  if (c.n() != n) throw ShapeMismatch("e_psd_condition: inconsistent sizes");
  for (std::size_t k = 0; k < n; ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      if (l != k) row += c(k, l);
    // the guaranteed schedule sums n - 1 shares of V_k; allow for rounding
    if (row > variances[k] * (1.0 + 1e-12)) return false;
  }
  return true;
}

SymmetricMatrix e_sigma_from_expectations(std::span<const double> x,
                                          const RegularizationParams& c,
                                          std::span<const double> variances) {
  const std::size_t n = variances.size();
  if (c.n() != n || x.size() != pair_count(n))
    throw ShapeMismatch("e_sigma_from_expectations: inconsistent sizes");
  const PairIndexing pairs(n);
  SymmetricMatrix sigma = SymmetricMatrix::diagonal(variances);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [i, j] = pairs.pair(r);
    sigma.set(i, j, c.by_pair()[r] * x[r]);
  }
  return sigma;
}

// ---- schedules -----------------------------------------------------------------

CSchedule CSchedule::parse(const std::string& text) {
  if (text == "guaranteed") return {CScheduleKind::Guaranteed, 0.0};
  if (text == "correlation") return {CScheduleKind::Correlation, 0.0};
  if (text.rfind("uniform:", 0) == 0) {
    const std::string tail = text.substr(8);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tail.size() || tail.empty() || !(value >= 0.0))
      throw std::invalid_argument("c schedule: bad uniform value '" + tail + "'");
    return {CScheduleKind::Uniform, value};
  }
  throw std::invalid_argument("unknown c schedule '" + text +
                              "' (expected guaranteed, correlation or uniform:VALUE)");
}

std::string CSchedule::to_string() const {
  switch (kind) {
    case CScheduleKind::Guaranteed: return "guaranteed";
    case CScheduleKind::Correlation: return "correlation";
    case CScheduleKind::Uniform: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "uniform:%.17g", value);
      return buf;
    }
  }
  return "correlation";
}

RegularizationParams make_c(EstimatorKind kind, const CSchedule& schedule,
                            std::span<const double> variances) {
  switch (schedule.kind) {
    case CScheduleKind::Uniform:
      return RegularizationParams(variances.size(), schedule.value);
    case CScheduleKind::Guaranteed:
      return kind == EstimatorKind::C ? default_c_for_C(variances)
                                      : default_c_for_E(variances, EMode::Guaranteed);
    case CScheduleKind::Correlation:
      return kind == EstimatorKind::C ? correlation_c_for_C(variances)
                                      : default_c_for_E(variances, EMode::Correlation);
  }
  throw std::logic_error("make_c: unreachable");
}

// ---- objective -------------------------------------------------------------------

CircuitSpec circuit_for(EstimatorKind kind, std::size_t n, std::size_t layers) {
  CircuitSpec spec{kind == EstimatorKind::C ? eta(n, 2) : n, layers};
  spec.validate();
  return spec;
}

CovarianceObjective::CovarianceObjective(EstimatorProblem problem, CircuitSpec spec)
    : problem_(std::move(problem)),
      spec_(spec),
      assignment_(problem_.kind == EstimatorKind::C ? c_assignment(problem_.n())
                                                    : e_family(problem_.n())),
      pairs_(problem_.n()) {
  problem_.validate();
  spec_.validate();
  if (spec_.eta != assignment_.eta)
    throw ShapeMismatch("circuit has " + std::to_string(spec_.eta) +
                        " qubits but the observable assignment needs " +
                        std::to_string(assignment_.eta));
  included_.resize(pairs_.size(), true);
  if (problem_.mask)
    for (std::size_t r = 0; r < pairs_.size(); ++r) {
      const auto [i, j] = pairs_.pair(r);
      included_[r] = problem_.mask->contains(j, i);
    }
}

bool CovarianceObjective::pair_included(std::size_t r) const { return included_[r]; }

std::vector<double> CovarianceObjective::expectations(const ParamSet& params) const {
  return expectations_batch(run_hea(spec_, params), assignment_.observables);
}

namespace {

// Zero every column at or beyond `keep`.
LowerTriangular truncate_columns(const LowerTriangular& l, std::size_t keep) {
  LowerTriangular out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j <= i && j < keep; ++j) out.set(i, j, l(i, j));
  return out;
}

}  // namespace

CovarianceObjective::Estimate CovarianceObjective::estimate_from_expectations(
    std::span<const double> x) const {
  if (x.size() != pairs_.size()) throw ShapeMismatch("objective: expectation count");
  const std::vector<double> variances = problem_.variances();
  const SymmetricMatrix& target = problem_.target;

  if (problem_.kind == EstimatorKind::E) {
    SymmetricMatrix sigma = e_sigma_from_expectations(x, problem_.c, variances);
    double loss = 0.0;
    for (std::size_t r = 0; r < pairs_.size(); ++r) {
      if (!pair_included(r)) continue;
      const auto [i, j] = pairs_.pair(r);
      const double residual = sigma(i, j) - target(i, j);
      loss += residual * residual;
    }
    return {std::move(sigma), std::nullopt, {}, loss};
  }

  FactorBuild build = c_build_factor(x, problem_.c, variances);
  const std::size_t n = problem_.n();
  const std::size_t keep = problem_.rank.value_or(n);
  const bool low_rank = keep < n;
  LowerTriangular factor = low_rank ? truncate_columns(build.factor, keep) : build.factor;
  SymmetricMatrix sigma = factor.gram();

  double loss = 0.0;
  for (std::size_t r = 0; r < pairs_.size(); ++r) {
    if (!pair_included(r)) continue;
    const auto [i, j] = pairs_.pair(r);
    const double residual = sigma(i, j) - target(i, j);
    loss += residual * residual;
  }
  if (low_rank) {
    for (std::size_t i = 0; i < n; ++i) {
      const double residual = sigma(i, i) - target(i, i);
      loss += residual * residual;
    }
    for (std::size_t i = keep; i < n; ++i)
      loss += kLowRankPenalty * std::max(0.0, build.radicands[i]);
  }
  return {std::move(sigma), std::move(factor), std::move(build.clamped), loss};
}

CovarianceObjective::Estimate CovarianceObjective::estimate(const ParamSet& params) const {
  return estimate_from_expectations(expectations(params));
}

double CovarianceObjective::loss_from_expectations(std::span<const double> x) const {
  return estimate_from_expectations(x).loss;
}

double CovarianceObjective::loss(const ParamSet& params) const {
  return loss_from_expectations(expectations(params));
}

std::vector<double> CovarianceObjective::dloss_dx(std::span<const double> x) const {
  if (x.size() != pairs_.size()) throw ShapeMismatch("objective: expectation count");
  const SymmetricMatrix& target = problem_.target;
  const auto cp = problem_.c.by_pair();
  std::vector<double> g(pairs_.size(), 0.0);

  if (problem_.kind == EstimatorKind::E) {
    for (std::size_t r = 0; r < pairs_.size(); ++r) {
      if (!pair_included(r)) continue;
      const auto [i, j] = pairs_.pair(r);
      g[r] = 2.0 * (cp[r] * x[r] - target(i, j)) * cp[r];
    }
    return g;
  }

  const std::vector<double> variances = problem_.variances();
  const FactorBuild build = c_build_factor(x, problem_.c, variances);
  const std::size_t n = problem_.n();
  const std::size_t keep = problem_.rank.value_or(n);
  const bool low_rank = keep < n;
  const LowerTriangular factor = low_rank ? truncate_columns(build.factor, keep) : build.factor;
  const SymmetricMatrix sigma = factor.gram();

  // d loss / d L = 2 W L, W the symmetric residual over included entries
  // with diagonal residuals counted twice.
  Matrix w(n, n);
  for (std::size_t r = 0; r < pairs_.size(); ++r) {
    if (!pair_included(r)) continue;
    const auto [i, j] = pairs_.pair(r);
    const double residual = sigma(i, j) - target(i, j);
    w(i, j) = residual;
    w(j, i) = residual;
  }
  if (low_rank)
    for (std::size_t i = 0; i < n; ++i) w(i, i) = 2.0 * (sigma(i, i) - target(i, i));

  auto dloss_dl = [&](std::size_t a, std::size_t b) {
    double sum = 0.0;
    for (std::size_t k = b; k < n; ++k) sum += w(a, k) * factor(k, b);
    return 2.0 * sum;
  };

  for (std::size_t a = 1; a < n; ++a) {
    const bool diagonal_kept = a < keep && build.radicands[a] > 0.0;
    const double lambda = build.factor(a, a);
    const double g_diag = diagonal_kept && lambda > 0.0 ? dloss_dl(a, a) : 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      const std::size_t r = pairs_.index(k, a);
      double d = 0.0;
      if (k < keep) d += dloss_dl(a, k) * cp[r];
      const double dradicand = -2.0 * cp[r] * cp[r] * x[r];
      if (g_diag != 0.0) d += g_diag * dradicand / (2.0 * lambda);
      if (low_rank && a >= keep && build.radicands[a] > 0.0) d += kLowRankPenalty * dradicand;
      g[r] = d;
    }
  }
  return g;
}

ParamSet CovarianceObjective::gradient(const ParamSet& params) const {
  const std::vector<double> g = dloss_dx(expectations(params));
  return adjoint_gradient(spec_, params, assignment_.observables, g);
}

double CovarianceObjective::partial(const ParamSet& params, std::size_t mu) const {
  const std::vector<double> x = expectations(params);
  const std::vector<double> d = param_shift_partial(spec_, params, assignment_.observables, mu);
  const std::vector<double> g = dloss_dx(x);
  double sum = 0.0;
  for (std::size_t r = 0; r < g.size(); ++r) sum += g[r] * d[r];
  return sum;
}

// ---- free-function surface ---------------------------------------------------------

namespace {

void require_kind(const EstimatorProblem& problem, EstimatorKind kind, const char* what) {
  if (problem.kind != kind)
    throw std::invalid_argument(std::string(what) + ": problem has the wrong estimator kind");
}

}  // namespace

double c_loss(const ParamSet& params, const EstimatorProblem& problem, const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::C, "c_loss");
  EstimatorProblem full = problem;
  full.rank.reset();
  return CovarianceObjective(std::move(full), spec).loss(params);
}

double c_lowrank_loss(const ParamSet& params, const EstimatorProblem& problem,
                      const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::C, "c_lowrank_loss");
  if (!problem.rank) throw std::invalid_argument("c_lowrank_loss: problem has no rank target");
  return CovarianceObjective(problem, spec).loss(params);
}

SymmetricMatrix e_entries(const ParamSet& params, const EstimatorProblem& problem,
                          const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::E, "e_entries");
  return CovarianceObjective(problem, spec).estimate(params).sigma_hat;
}

double e_loss(const ParamSet& params, const EstimatorProblem& problem, const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::E, "e_loss");
  return CovarianceObjective(problem, spec).loss(params);
}

ParamSet e_loss_gradient(const ParamSet& params, const EstimatorProblem& problem,
                         const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::E, "e_loss_gradient");
  return CovarianceObjective(problem, spec).gradient(params);
}

ParamSet c_loss_gradient(const ParamSet& params, const EstimatorProblem& problem,
                         const CircuitSpec& spec) {
  require_kind(problem, EstimatorKind::C, "c_loss_gradient");
  return CovarianceObjective(problem, spec).gradient(params);
}

// ---- end to end ----------------------------------------------------------------------

EstimateResult estimate(const EstimatorProblem& problem, const CircuitSpec& spec,
                        const OptimizerConfig& config,
                        const std::optional<SymmetricMatrix>& reference) {
  const CovarianceObjective objective(problem, spec);
  const SymmetricMatrix& ref = reference ? *reference : problem.target;
  if (ref.size() != problem.n()) throw ShapeMismatch("estimate: reference size");

  Objective callbacks;
  callbacks.loss = [&](const ParamSet& p) { return objective.loss(p); };
  callbacks.gradient = [&](const ParamSet& p) { return objective.gradient(p); };
  callbacks.mae = [&](const ParamSet& p) { return mae(objective.estimate(p).sigma_hat, ref); };

  Trace trace = minimize(callbacks, init_params(spec, config.seed), config);
  CovarianceObjective::Estimate best = objective.estimate(trace.best_params);

  EstimateResult result;
  result.n = problem.n();
  result.kind = problem.kind;
  result.sigma_hat = std::move(best.sigma_hat);
  result.factor = std::move(best.factor);
  result.clamped_diagonals = std::move(best.clamped);
  result.final_loss = trace.best_loss;
  result.trace = std::move(trace);
  result.seed = config.seed;
  return result;
}

CompletionResult complete(const EstimatorProblem& problem, const CircuitSpec& spec,
                          const OptimizerConfig& config,
                          const std::optional<SymmetricMatrix>& hidden_target) {
  if (!problem.mask) throw std::invalid_argument("complete: problem carries no observation mask");
  EstimateResult result = estimate(problem, spec, config, hidden_target);
  SymmetricMatrix filled = result.sigma_hat;
  std::optional<double> full_mae;
  if (hidden_target) full_mae = mae(filled, *hidden_target);
  return {std::move(result), std::move(filled), full_mae};
}

MultiRunResult multi_run(const EstimatorProblem& problem, const CircuitSpec& spec,
                         const OptimizerConfig& config, std::size_t runs,
                         std::uint64_t base_seed,
                         const std::optional<SymmetricMatrix>& reference, std::size_t workers) {
  if (runs < 1) throw std::invalid_argument("multi_run: need at least one run");
  std::vector<std::optional<EstimateResult>> slots(runs);
  std::vector<std::string> errors(runs);
  parallel_for(runs, workers == 0 ? worker_count() : workers, [&](std::size_t run) {
    OptimizerConfig cfg = config;
    cfg.seed = base_seed + run;
    try {
      slots[run] = estimate(problem, spec, cfg, reference);
    } catch (const std::exception& e) {
      errors[run] = e.what();
    }
  });

  MultiRunResult out;
  std::vector<Trace> traces;
  for (std::size_t run = 0; run < runs; ++run) {
    if (!slots[run]) {
      out.failures.push_back("run " + std::to_string(run) + ": " + errors[run]);
      continue;
    }
    traces.push_back(slots[run]->trace);
    out.runs.push_back(std::move(*slots[run]));
    out.run_indices.push_back(run);
  }
  if (!traces.empty()) out.aggregate = aggregate(traces);
  return out;
}

nlohmann::json to_json(const EstimateResult& result) {
  nlohmann::json j;
  j["n"] = result.n;
  j["kind"] = to_string(result.kind);
  j["final_loss"] = result.final_loss;
  j["clamped_diagonals"] = result.clamped_diagonals;
  j["sigma_hat"] = std::vector<double>(result.sigma_hat.data().begin(),
                                       result.sigma_hat.data().end());
  if (result.factor)
    j["factor"] = std::vector<double>(result.factor->data().begin(), result.factor->data().end());
  else
    j["factor"] = nullptr;
  j["seed"] = result.seed;
  j["iterations"] = result.trace.records.size();
  return j;
}

}  // namespace cpce
