#include "cpce/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cpce/errors.hpp"
#include "cpce/io.hpp"
#include "cpce/rng.hpp"
#include "cpce/svg.hpp"

namespace cpce {

namespace {

const std::set<std::string> kCommands{"estimate", "convergence", "lowrank",
                                      "complete", "nearsingular", "gradvar"};

OptimizerConfig optimizer_config(const ExperimentConfig& config) {
  OptimizerConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.iterations = config.iterations;
  opt.seed = config.seed;
  opt.validate();
  return opt;
}

// Fails when every run aborted; otherwise turns failures into warnings.
void collect_failures(const MultiRunResult& result, const std::string& label,
                      Artifacts& artifacts) {
  for (const std::string& f : result.failures) artifacts.warnings.push_back(label + ": " + f);
  if (result.runs.empty())
    throw NumericalAbort(0, std::nan(""), label + ": every run aborted");
}

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const std::string& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults_for(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  if (command == "lowrank") {
    c.rank = 2;
    c.runs = 3;
  } else if (command == "nearsingular") {
    c.eig_min = 1e-4;
  } else if (command == "gradvar") {
    c.kind = EstimatorKind::E;
    c.c_schedule = CSchedule{CScheduleKind::Uniform, 1.0};
    c.runs = 3;
    c.iterations = 100;
  } else if (command == "estimate") {
    c.runs = 1;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (!kCommands.count(command)) throw std::invalid_argument("unknown command '" + command + "'");
  if (n < 2) throw std::invalid_argument("--n must be at least 2");
  if (runs < 1) throw std::invalid_argument("--runs must be at least 1");
  if (layers < 1) throw std::invalid_argument("--layers must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("--lr must be positive");
  if (command == "lowrank" && (rank < 1 || rank > n))
    throw std::invalid_argument("--rank must lie in [1, n]");
  for (std::size_t r : ranks)
    if (r < 1 || r > n) throw std::invalid_argument("rank sweep entries must lie in [1, n]");
  for (double f : fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("--fractions must lie in [0, 1]");
  if (command == "nearsingular" && !(eig_min > 0.0 && eig_min <= 1.0))
    throw std::invalid_argument("eig_min must lie in (0, 1]");
  if (command == "gradvar") {
    VarianceSweepConfig v;
    v.qubit_counts = qubits;
    v.samples = samples;
    v.validate();
    for (std::size_t q : qubits)
      if (q > kMaxQubits) throw std::invalid_argument("--qubits entries must be at most 24");
  }
  if (command == "estimate" && input.empty())
    throw std::invalid_argument("estimate needs a target CSV");
  if (command == "estimate" && rank > 0 && kind != EstimatorKind::C)
    throw std::invalid_argument("--rank applies to the C estimator only");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["kind"] = to_string(c.kind);
  j["runs"] = c.runs;
  j["iters"] = c.iterations;
  j["seed"] = c.seed;
  j["lr"] = c.learning_rate;
  j["c-schedule"] = c.c_schedule.to_string();
  j["rank"] = c.rank;
  j["ranks"] = c.ranks;
  j["fractions"] = c.fractions;
  j["qubits"] = c.qubits;
  j["layers-rule"] = c.layer_rule.to_string();
  j["samples"] = c.samples;
  j["layers"] = c.layers;
  j["eig-min"] = c.eig_min;
  j["off-diagonal"] = c.off_diagonal;
  j["input"] = c.input;
  j["mask"] = c.mask;
  j["svg"] = c.svg;
  return j;
}

ExperimentConfig merge_json(ExperimentConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "kind") c.kind = parse_kind(v.get<std::string>());
      else if (key == "runs") c.runs = v.get<std::size_t>();
      else if (key == "iters") c.iterations = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "lr") c.learning_rate = v.get<double>();
      else if (key == "c-schedule") c.c_schedule = CSchedule::parse(v.get<std::string>());
      else if (key == "rank") c.rank = v.get<std::size_t>();
      else if (key == "ranks") c.ranks = v.get<std::vector<std::size_t>>();
      else if (key == "fractions") c.fractions = v.get<std::vector<double>>();
      else if (key == "qubits") c.qubits = v.get<std::vector<std::size_t>>();
      else if (key == "layers-rule") c.layer_rule = LayerRule::parse(v.get<std::string>());
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "layers") c.layers = v.get<std::size_t>();
      else if (key == "eig-min") c.eig_min = v.get<double>();
      else if (key == "off-diagonal") c.off_diagonal = v.get<double>();
      else if (key == "input") c.input = v.get<std::string>();
      else if (key == "mask") c.mask = v.get<std::string>();
      else if (key == "svg") c.svg = v.get<bool>();
      else throw InputError("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

Artifacts run_estimate(const ExperimentConfig& config) {
  Artifacts out;
  const LoadedMatrix loaded = load_covariance(config.input);
  if (loaded.asymmetry > 0.0)
    out.warnings.push_back("target symmetrized by averaging (max asymmetry " +
                           format_double(loaded.asymmetry) + ")");
  const SymmetricMatrix& target = loaded.matrix;
  const std::vector<double> variances = target.diagonal_values();
  EstimatorProblem problem{target, make_c(config.kind, config.c_schedule, variances),
                           std::nullopt, std::nullopt, config.kind};
  if (!config.mask.empty()) problem.mask = parse_mask_csv(read_text_file(config.mask), target.size());
  if (config.rank > 0) {
    if (config.rank > target.size()) throw InputError("--rank exceeds the matrix dimension");
    problem.rank = config.rank;
  }
  if (config.kind == EstimatorKind::C) {
    const std::vector<double> ones(pair_count(target.size()), 1.0);
    if (!c_feasibility(ones, problem.c, variances).all_a_priori())
      out.warnings.push_back("c does not guarantee a non-negative Cholesky radicand; "
                             "negative radicands are clamped to 0");
  } else if (!e_psd_condition(problem.c, variances)) {
    out.warnings.push_back("c violates the diagonal-dominance condition; the estimate may be indefinite");
  }
  const CircuitSpec spec = circuit_for(config.kind, target.size(), config.layers);
  const OptimizerConfig opt = optimizer_config(config);
  EstimateResult result = problem.mask ? complete(problem, spec, opt).result
                                       : estimate(problem, spec, opt);
  for (std::size_t i : result.clamped_diagonals)
    out.warnings.push_back("diagonal " + std::to_string(i) + " clamped to 0");
  out.files["sigma_hat.csv"] = matrix_to_csv(result.sigma_hat);
  out.files["trace.csv"] = trace_to_csv(result.trace);
  out.files["result.json"] = to_json(result).dump(2) + "\n";
  return out;
}

Artifacts run_convergence(const ExperimentConfig& config) {
  Artifacts out;
  const SymmetricMatrix target = random_psd(config.n, config.seed);
  const OptimizerConfig opt = optimizer_config(config);
  std::vector<AggregatedTrace> aggs;
  std::string summary = "kind,mean_initial_mae,mean_final_best_mae,std_final_best_mae\n";
  for (EstimatorKind kind : {EstimatorKind::C, EstimatorKind::E}) {
    EstimatorProblem problem{target, make_c(kind, config.c_schedule, target.diagonal_values()),
                             std::nullopt, std::nullopt, kind};
    const MultiRunResult res =
        multi_run(problem, circuit_for(kind, config.n, config.layers), opt, config.runs, config.seed);
    collect_failures(res, to_string(kind), out);
    summary += row({to_string(kind), format_double(mean_of(res.aggregate.initial_mae)),
                    format_double(mean_of(res.aggregate.final_best_mae)),
                    format_double(stddev_of(res.aggregate.final_best_mae))});
    aggs.push_back(res.aggregate);
  }
  std::string csv = "iteration,c_mean_best_mae,c_std_best_mae,e_mean_best_mae,e_std_best_mae\n";
  const std::size_t len = std::max(aggs[0].mean_best_mae.size(), aggs[1].mean_best_mae.size());
  auto at = [](const std::vector<double>& v, std::size_t t) { return v[std::min(t, v.size() - 1)]; };
  for (std::size_t t = 0; t < len; ++t)
    csv += row({std::to_string(t), format_double(at(aggs[0].mean_best_mae, t)),
                format_double(at(aggs[0].std_best_mae, t)), format_double(at(aggs[1].mean_best_mae, t)),
                format_double(at(aggs[1].std_best_mae, t))});
  out.files["convergence.csv"] = csv;
  out.files["convergence_summary.csv"] = summary;
  return out;
}

Artifacts run_lowrank(const ExperimentConfig& config) {
  Artifacts out;
  const SymmetricMatrix target = random_lowrank_psd(config.n, config.rank, config.seed);
  const OptimizerConfig opt = optimizer_config(config);
  std::vector<std::size_t> ranks = config.ranks;
  if (ranks.empty())
    for (std::size_t r = 1; r <= config.n; ++r) ranks.push_back(r);
  const RegularizationParams c =
      make_c(EstimatorKind::C, config.c_schedule, target.diagonal_values());
  const CircuitSpec spec = circuit_for(EstimatorKind::C, config.n, config.layers);
  std::string csv = "r,mean_final_mae,std_final_mae\n";
  std::string runs_csv = "r,run,seed,final_mae,final_loss,eigenvalues_above_1e-8\n";
  for (std::size_t r : ranks) {
    EstimatorProblem problem{target, c, std::nullopt, r, EstimatorKind::C};
    const MultiRunResult res = multi_run(problem, spec, opt, config.runs, config.seed);
    collect_failures(res, "rank " + std::to_string(r), out);
    std::vector<double> finals;
    for (std::size_t k = 0; k < res.runs.size(); ++k) {
      const EstimateResult& run = res.runs[k];
      finals.push_back(mae(run.sigma_hat, target));
      const auto eig = jacobi_eigenvalues(run.sigma_hat);
      const auto above = std::count_if(eig.begin(), eig.end(), [](double e) { return e > 1e-8; });
      runs_csv += row({std::to_string(r), std::to_string(res.run_indices[k]), std::to_string(run.seed),
                       format_double(finals.back()), format_double(run.final_loss),
                       std::to_string(above)});
    }
    csv += row({std::to_string(r), format_double(mean_of(finals)), format_double(stddev_of(finals))});
  }
  out.files["lowrank.csv"] = csv;
  out.files["lowrank_runs.csv"] = runs_csv;
  return out;
}

Artifacts run_completion(const ExperimentConfig& config) {
  Artifacts out;
  const OptimizerConfig base_opt = optimizer_config(config);
  std::string csv = "fraction,kind,mean_final_mae,std_final_mae\n";
  std::string runs_csv = "fraction,kind,run,seed,observed_pairs,final_mae\n";
  // Targets and masks depend only on the run index, so the masks of a larger
  // fraction are subsets of those of a smaller one.
  for (double fraction : config.fractions) {
    for (EstimatorKind kind : {EstimatorKind::C, EstimatorKind::E}) {
      std::vector<double> finals(config.runs, 0.0);
      std::vector<std::size_t> observed(config.runs, 0);
      std::vector<std::string> errors(config.runs);
      parallel_for(config.runs, worker_count(), [&](std::size_t run) {
        try {
          const SymmetricMatrix target = random_psd(config.n, derive_seed(config.seed, run));
          ObservationMask mask =
              random_mask(config.n, fraction, derive_seed(config.seed, 1000 + run));
          observed[run] = mask.count();
          EstimatorProblem problem{target, make_c(kind, config.c_schedule, target.diagonal_values()),
                                   std::move(mask), std::nullopt, kind};
          OptimizerConfig opt = base_opt;
          opt.seed = config.seed + run;
          const CompletionResult res =
              complete(problem, circuit_for(kind, config.n, config.layers), opt, target);
          finals[run] = *res.full_mae;
        } catch (const std::exception& e) {
          errors[run] = e.what();
        }
      });
      std::vector<double> ok;
      for (std::size_t run = 0; run < config.runs; ++run) {
        if (!errors[run].empty()) {
          out.warnings.push_back("fraction " + format_double(fraction) + " " + to_string(kind) +
                                 " run " + std::to_string(run) + ": " + errors[run]);
          continue;
        }
        ok.push_back(finals[run]);
        runs_csv += row({format_double(fraction), to_string(kind), std::to_string(run),
                         std::to_string(config.seed + run), std::to_string(observed[run]),
                         format_double(finals[run])});
      }
      if (ok.empty()) throw NumericalAbort(0, std::nan(""), "completion: every run aborted");
      csv += row({format_double(fraction), to_string(kind), format_double(mean_of(ok)),
                  format_double(stddev_of(ok))});
    }
  }
  out.files["completion.csv"] = csv;
  out.files["completion_runs.csv"] = runs_csv;
  return out;
}

Artifacts run_nearsingular(const ExperimentConfig& config) {
  Artifacts out;
  const SymmetricMatrix target = random_near_singular(config.n, config.eig_min, 1.0, config.seed);
  EstimatorProblem problem{target,
                           make_c(config.kind, config.c_schedule, target.diagonal_values()),
                           std::nullopt, std::nullopt, config.kind};
  const MultiRunResult res = multi_run(problem, circuit_for(config.kind, config.n, config.layers),
                                       optimizer_config(config), config.runs, config.seed);
  // Any non-finite value aborts the experiment rather than being averaged away.
  if (!res.failures.empty()) throw NumericalAbort(0, std::nan(""), res.failures.front());
  for (const EstimateResult& run : res.runs)
    if (!std::isfinite(run.final_loss))
      throw NumericalAbort(run.trace.records.size(), run.final_loss, "non-finite final loss");
  out.files["nearsingular.csv"] = aggregated_to_csv(res.aggregate);
  return out;
}

std::vector<std::size_t> depth_sweep(std::size_t rule_layers) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= 4; ++k) {
    const std::size_t l = std::max<std::size_t>(1, (k * rule_layers + 3) / 4);
    if (out.empty() || out.back() != l) out.push_back(l);
  }
  return out;
}

Artifacts run_gradvar(const ExperimentConfig& config) {
  Artifacts out;
  const OptimizerConfig base_opt = optimizer_config(config);
  std::string csv = "n,layers,samples,variance,bound,ratio,mean_final_loss,std_final_loss\n";
  for (std::size_t n : config.qubits) {
    const SymmetricMatrix probe = plateau_target(n, config.off_diagonal);
    const EstimatorProblem plateau = plateau_problem(
        probe, make_c(EstimatorKind::E, config.c_schedule, probe.diagonal_values()));
    // Converged loss against a random target, as a function of depth.
    const SymmetricMatrix target = random_psd(n, derive_seed(config.seed, n));
    const EstimatorProblem fit{
        target,
        make_c(EstimatorKind::E, CSchedule{CScheduleKind::Correlation, 1.0}, target.diagonal_values()),
        std::nullopt, std::nullopt, EstimatorKind::E};
    for (std::size_t layers : depth_sweep(config.layer_rule.layers(n))) {
      const CircuitSpec spec{n, layers};
      const VarianceReport rep = variance_report(plateau, spec, config.samples,
                                                 default_probe_index(spec), config.seed,
                                                 worker_count());
      const MultiRunResult res = multi_run(fit, spec, base_opt, config.runs, config.seed);
      collect_failures(res, "n=" + std::to_string(n) + " L=" + std::to_string(layers), out);
      std::vector<double> losses;
      for (const EstimateResult& run : res.runs) losses.push_back(run.final_loss);
      csv += row({std::to_string(n), std::to_string(layers), std::to_string(rep.samples),
                  format_double(rep.variance), format_double(rep.bound), format_double(rep.ratio),
                  format_double(mean_of(losses)), format_double(stddev_of(losses))});
    }
  }
  out.files["gradvar.csv"] = csv;
  return out;
}

Artifacts run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.command == "estimate") return run_estimate(config);
  if (config.command == "convergence") return run_convergence(config);
  if (config.command == "lowrank") return run_lowrank(config);
  if (config.command == "complete") return run_completion(config);
  if (config.command == "nearsingular") return run_nearsingular(config);
  return run_gradvar(config);
}

namespace {

std::vector<double> column(const CsvTable& t, const std::string& name) {
  std::vector<double> v;
  for (std::size_t r = 0; r < t.rows.size(); ++r) v.push_back(t.number(r, name));
  return v;
}

// Rows grouped by the text value of `key`, in order of first appearance.
std::vector<Series> grouped(const CsvTable& t, const std::string& key, const std::string& prefix,
                            const std::string& xcol, const std::string& ycol) {
  std::vector<Series> out;
  const std::size_t k = t.column(key);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string label = prefix + t.rows[r][k];
    auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.label == label; });
    if (it == out.end()) {
      out.push_back(Series{label, {}, {}});
      it = out.end() - 1;
    }
    it->x.push_back(t.number(r, xcol));
    it->y.push_back(t.number(r, ycol));
  }
  return out;
}

}  // namespace

std::optional<std::string> plot_csv(const std::string& csv_text) {
  const CsvTable t = parse_csv_table(csv_text);
  auto has = [&](const std::string& name) {
    return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
  };
  ChartOptions opt;
  std::vector<Series> series;
  if (has("c_mean_best_mae") && has("e_mean_best_mae")) {
    const auto it = column(t, "iteration");
    series = {{"C-Estimator", it, column(t, "c_mean_best_mae")},
              {"E-Estimator", it, column(t, "e_mean_best_mae")}};
    opt = {"Convergence", "iteration", "mean best-so-far MAE", false, true, true};
  } else if (t.header.size() == 3 && has("r") && has("mean_final_mae")) {
    series = {{"C-Estimator", column(t, "r"), column(t, "mean_final_mae")}};
    opt = {"Low-rank recovery", "assumed rank r", "mean final MAE", false, true, true};
  } else if (has("fraction") && has("kind") && has("mean_final_mae")) {
    series = grouped(t, "kind", "", "fraction", "mean_final_mae");
    for (Series& s : series) s.label += "-Estimator";
    opt = {"Covariance completion", "fraction missing", "mean final MAE", false, true, true};
  } else if (t.header.size() == 3 && has("iteration") && has("mean_best_mae")) {
    series = {{"mean best-so-far MAE", column(t, "iteration"), column(t, "mean_best_mae")}};
    opt = {"Near-singular target", "iteration", "mean best-so-far MAE", true, true, true};
  } else if (has("n") && has("layers") && has("variance")) {
    series = grouped(t, "n", "n=", "layers", "variance");
    opt = {"Gradient variance", "layers", "Var(dL/dtheta)", true, true, true};
  } else if (has("iteration") && has("best_loss") && has("best_mae")) {
    const auto it = column(t, "iteration");
    series = {{"best loss", it, column(t, "best_loss")}, {"best MAE", it, column(t, "best_mae")}};
    opt = {"Optimization trace", "iteration", "best so far", true, true, true};
  } else {
    return std::nullopt;
  }
  return render_chart(series, opt);
}

std::string provenance_json(const ExperimentConfig& config, const Artifacts& artifacts) {
  nlohmann::json j;
  j["tool"] = "cpce-cov";
  j["version"] = kVersion;
  j["command"] = config.command;
  j["config"] = to_json(config);
  std::vector<std::uint64_t> run_seeds;
  for (std::size_t r = 0; r < config.runs; ++r) run_seeds.push_back(config.seed + r);
  j["seeds"] = {{"base", config.seed}, {"runs", run_seeds}};
  std::vector<std::string> names;
  for (const auto& [name, contents] : artifacts.files) names.push_back(name);
  j["artifacts"] = names;
  return j.dump(2) + "\n";
}

void finalize_artifacts(const ExperimentConfig& config, Artifacts& artifacts) {
  if (config.svg) {
    std::map<std::string, std::string> svgs;
    for (const auto& [name, contents] : artifacts.files) {
      if (!name.ends_with(".csv")) continue;
      if (auto svg = plot_csv(contents)) svgs[name.substr(0, name.size() - 4) + ".svg"] = *svg;
    }
    artifacts.files.merge(svgs);
  }
  artifacts.files["provenance.json"] = provenance_json(config, artifacts);
}

void write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : artifacts.files) write_text_file(dir / name, contents);
}

}  // namespace cpce
