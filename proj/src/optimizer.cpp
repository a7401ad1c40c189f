#include "cpce/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "cpce/errors.hpp"
#include "cpce/rng.hpp"

namespace cpce {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be > 0");
  if (iterations < 1) throw std::invalid_argument("optimizer: need at least one iteration");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw std::invalid_argument("optimizer: Adam betas must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("optimizer: epsilon must be > 0");
}

ParamSet init_params(const CircuitSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParamSet params(spec);
  for (double& angle : params.flat()) angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return params;
}

Trace minimize(const Objective& objective, ParamSet theta, const OptimizerConfig& config) {
  config.validate();
  if (!objective.loss || !objective.gradient)
    throw std::invalid_argument("minimize: loss and gradient callables are required");

  Trace trace;
  trace.records.reserve(config.iterations);
  trace.best_loss = std::numeric_limits<double>::infinity();
  double best_mae = std::numeric_limits<double>::infinity();

  std::vector<double> m(theta.size(), 0.0);
  std::vector<double> v(theta.size(), 0.0);

  for (std::size_t t = 0; t < config.iterations; ++t) {
    const double loss = objective.loss(theta);
    if (!std::isfinite(loss)) throw NumericalAbort(t, loss, "loss");
    const double err = objective.mae ? objective.mae(theta)
                                     : std::numeric_limits<double>::quiet_NaN();
    if (objective.mae && !std::isfinite(err)) throw NumericalAbort(t, err, "MAE");

    if (loss < trace.best_loss) {
      trace.best_loss = loss;
      trace.best_params = theta;
    }
    if (objective.mae) best_mae = std::min(best_mae, err);
    trace.records.push_back({t, loss, err, trace.best_loss,
                             objective.mae ? best_mae : std::numeric_limits<double>::quiet_NaN()});

    if (loss <= config.loss_tolerance || t + 1 == config.iterations) break;

    const ParamSet grad = objective.gradient(theta);
    if (grad.size() != theta.size()) throw ShapeMismatch("minimize: gradient shape");
    for (std::size_t k = 0; k < grad.size(); ++k)
      if (!std::isfinite(grad[k])) throw NumericalAbort(t, grad[k], "gradient");

    if (config.algorithm == Algorithm::GradientDescent) {
      for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= config.learning_rate * grad[k];
    } else {
      const double step = static_cast<double>(t + 1);
      const double bias1 = 1.0 - std::pow(config.beta1, step);
      const double bias2 = 1.0 - std::pow(config.beta2, step);
      for (std::size_t k = 0; k < theta.size(); ++k) {
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
        v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
        const double m_hat = m[k] / bias1;
        const double v_hat = v[k] / bias2;
        theta[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
      }
    }
  }
  return trace;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double stddev_of(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double mean = mean_of(values);
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return std::sqrt(sum / static_cast<double>(values.size()));
}

AggregatedTrace aggregate(std::span<const Trace> traces) {
  AggregatedTrace agg;
  std::size_t length = 0;
  for (const Trace& t : traces) {
    if (t.records.empty()) throw std::invalid_argument("aggregate: empty trace");
    length = std::max(length, t.records.size());
    agg.initial_mae.push_back(t.records.front().mae);
    agg.final_best_mae.push_back(t.records.back().best_mae);
    agg.final_best_loss.push_back(t.records.back().best_loss);
  }
  std::vector<double> maes(traces.size());
  std::vector<double> losses(traces.size());
  for (std::size_t it = 0; it < length; ++it) {
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto& recs = traces[r].records;
      const TraceRecord& rec = recs[std::min(it, recs.size() - 1)];
      maes[r] = rec.best_mae;
      losses[r] = rec.best_loss;
    }
    agg.mean_best_mae.push_back(mean_of(maes));
    agg.std_best_mae.push_back(stddev_of(maes));
    agg.mean_best_loss.push_back(mean_of(losses));
    agg.std_best_loss.push_back(stddev_of(losses));
  }
  return agg;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("CPCE_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value >= 1) return static_cast<std::size_t>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cpce
