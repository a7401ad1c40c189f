#include "cpce/plateau.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpce/errors.hpp"
#include "cpce/rng.hpp"

namespace cpce {

std::size_t LayerRule::layers(std::size_t n) const {
  return kind == Kind::Quadratic ? n * n : factor * n;
}

LayerRule LayerRule::parse(const std::string& text) {
  if (text == "n2") return {Kind::Quadratic, 1};
  if (text.rfind("linear:", 0) == 0) {
    const std::string tail = text.substr(7);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == tail.size() && !tail.empty() && value >= 1)
      return {Kind::Linear, static_cast<std::size_t>(value)};
  }
  throw std::invalid_argument("unknown layer rule '" + text + "' (expected n2 or linear:K)");
}

std::string LayerRule::to_string() const {
  return kind == Kind::Quadratic ? "n2" : "linear:" + std::to_string(factor);
}

std::size_t default_probe_index(const CircuitSpec& spec) { return (spec.layers / 2) * spec.eta; }

std::vector<double> gradient_samples(const EstimatorProblem& problem, const CircuitSpec& spec,
                                     std::size_t samples, std::size_t mu, std::uint64_t seed,
                                     std::size_t workers) {
  if (problem.kind != EstimatorKind::E)
    throw std::invalid_argument("gradient_samples: the plateau study uses the E estimator");
  if (mu >= spec.num_params()) throw std::out_of_range("gradient_samples: probe index");
  const CovarianceObjective objective(problem, spec);
  std::vector<double> out(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    out[s] = objective.partial(init_params(spec, derive_seed(seed, s)), mu);
  });
  return out;
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("sample_variance: need two samples");
  const double mean = mean_of(values);
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(values.size() - 1);
}

double gradient_variance(const EstimatorProblem& problem, const CircuitSpec& spec,
                         std::size_t samples, std::size_t mu, std::uint64_t seed,
                         std::size_t workers) {
  const std::vector<double> g = gradient_samples(problem, spec, samples, mu, seed, workers);
  return sample_variance(g);
}

double theorem_bound(const RegularizationParams& c, const SymmetricMatrix& target,
                     std::size_t n) {
  if (c.n() != target.size()) throw ShapeMismatch("theorem_bound: inconsistent sizes");
  const PairIndexing pairs(c.n());
  double quartic = 0.0;
  double c_sq = 0.0;
  double t_sq = 0.0;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const double cr = c.by_pair()[r];
    const auto [i, j] = pairs.pair(r);
    quartic += cr * cr * cr * cr;
    c_sq += cr * cr;
    t_sq += target(i, j) * target(i, j);
  }
  return (quartic + c_sq * t_sq) / std::ldexp(1.0, static_cast<int>(n));
}

VarianceReport variance_report(const EstimatorProblem& problem, const CircuitSpec& spec,
                               std::size_t samples, std::size_t mu, std::uint64_t seed,
                               std::size_t workers) {
  VarianceReport report;
  report.n = problem.n();
  report.layers = spec.layers;
  report.samples = samples;
  report.variance = gradient_variance(problem, spec, samples, mu, seed, workers);
  report.bound = theorem_bound(problem.c, problem.target, problem.n());
  report.ratio = report.bound > 0.0 ? report.variance / report.bound
                                    : std::numeric_limits<double>::quiet_NaN();
  return report;
}

SymmetricMatrix plateau_target(std::size_t n, double off_diagonal) {
  SymmetricMatrix t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) t.set(i, j, i == j ? 1.0 : off_diagonal);
  return t;
}

EstimatorProblem plateau_problem(const SymmetricMatrix& target, RegularizationParams c) {
  return EstimatorProblem{target, std::move(c), std::nullopt, std::nullopt, EstimatorKind::E};
}

MitigationReport mitigation_demo(const SymmetricMatrix& target, const RegularizationParams& base_c,
                                 const RegularizationParams& scaled_c, const CircuitSpec& spec,
                                 std::size_t samples, std::size_t mu, std::uint64_t seed,
                                 std::size_t workers) {
  return {variance_report(plateau_problem(target, base_c), spec, samples, mu, seed, workers),
          variance_report(plateau_problem(target, scaled_c), spec, samples, mu, seed, workers)};
}

RegularizationParams exponentially_scaled_c(const RegularizationParams& base_c) {
  std::vector<double> c(base_c.by_pair().begin(), base_c.by_pair().end());
  c[0] *= std::pow(2.0, static_cast<double>(base_c.n()) / 2.0);
  return RegularizationParams(base_c.n(), std::move(c));
}

void VarianceSweepConfig::validate() const {
  if (samples < 30) throw std::invalid_argument("variance sweep: need at least 30 samples");
  if (qubit_counts.empty()) throw std::invalid_argument("variance sweep: no qubit counts");
  for (std::size_t n : qubit_counts)
    if (n < 2) throw std::invalid_argument("variance sweep: qubit counts must be >= 2");
}

std::vector<VarianceReport> variance_sweep(const VarianceSweepConfig& config,
                                           std::size_t workers) {
  config.validate();
  std::vector<VarianceReport> reports;
  for (std::size_t n : config.qubit_counts) {
    const SymmetricMatrix target = plateau_target(n, config.off_diagonal);
    const std::vector<double> variances = target.diagonal_values();
    EstimatorProblem problem =
        plateau_problem(target, make_c(EstimatorKind::E, config.c_schedule, variances));
    const CircuitSpec spec{n, config.layer_rule.layers(n)};
    reports.push_back(variance_report(problem, spec, config.samples, default_probe_index(spec),
                                      config.seed, workers));
  }
  return reports;
}

}  // namespace cpce
