#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cpce/simulator.hpp"

namespace cpce {

enum class Algorithm { GradientDescent, Adam };

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::Adam;
  double learning_rate = 0.05;
  std::size_t iterations = 300;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Stop early once the loss is at or below this value.
  double loss_tolerance = 0.0;

  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double mae = 0.0;  // NaN when no reference matrix is known
  double best_loss = 0.0;
  double best_mae = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  ParamSet best_params;
  double best_loss = 0.0;
};

/// Callables the optimizer drives. `mae` is optional.
struct Objective {
  std::function<double(const ParamSet&)> loss;
  std::function<ParamSet(const ParamSet&)> gradient;
  std::function<double(const ParamSet&)> mae;
};

/// Independent Uniform(-pi, pi) angles from Rng(seed).
ParamSet init_params(const CircuitSpec& spec, std::uint64_t seed);

/// Runs `config.iterations` steps of gradient descent or Adam. Each record
/// holds the loss at the iterate before its update. The trace keeps the
/// iterate with the lowest loss seen. Throws NumericalAbort on NaN/Inf.
Trace minimize(const Objective& objective, ParamSet theta0, const OptimizerConfig& config);

/// Per-iteration mean and population standard deviation across runs.
/// Traces that stopped early are extended with their last record.
struct AggregatedTrace {
  std::vector<double> mean_best_mae;
  std::vector<double> std_best_mae;
  std::vector<double> mean_best_loss;
  std::vector<double> std_best_loss;
  std::vector<double> initial_mae;      // per run, iteration 0
  std::vector<double> final_best_mae;   // per run
  std::vector<double> final_best_loss;  // per run
};

AggregatedTrace aggregate(std::span<const Trace> traces);

/// Worker count for fan-out: CPCE_THREADS if set, else hardware
/// concurrency, never below 1.
std::size_t worker_count();

/// Runs fn(0..count-1) on up to `workers` threads. fn writes its result to
/// a per-index slot. The first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

/// Population mean and standard deviation.
double mean_of(std::span<const double> values);
double stddev_of(std::span<const double> values);

}  // namespace cpce
