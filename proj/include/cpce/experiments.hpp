#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpce/estimators.hpp"
#include "cpce/plateau.hpp"

namespace cpce {

inline constexpr const char* kVersion = "0.1.0";

/// Circuit depth used by the estimators unless overridden.
inline constexpr std::size_t kDefaultEstimatorLayers = 6;

/// Parameters of every subcommand. Fields a subcommand does not use are
/// carried along so that provenance files stay uniform.
struct ExperimentConfig {
  std::string command;
  std::size_t n = 6;
  EstimatorKind kind = EstimatorKind::C;
  std::size_t runs = 5;
  std::size_t iterations = 300;
  std::uint64_t seed = 0;
  double learning_rate = 0.05;
  CSchedule c_schedule{CScheduleKind::Correlation, 1.0};
  std::size_t rank = 0;                 // estimate: assumed rank (0 = full); lowrank: true rank
  std::vector<std::size_t> ranks;       // lowrank sweep; empty = 1..n
  std::vector<double> fractions{0.1, 0.3, 0.5};
  std::vector<std::size_t> qubits{4, 6, 8};
  LayerRule layer_rule{};
  std::size_t samples = 200;
  std::size_t layers = kDefaultEstimatorLayers;  // estimator circuit depth
  double eig_min = 1e-4;
  double off_diagonal = 0.0;            // gradvar target
  std::string input;                    // estimate: target CSV
  std::string mask;                     // estimate: optional mask CSV
  bool svg = false;

  /// Per-subcommand defaults (runs, iterations, rank) applied on top of the
  /// struct defaults.
  static ExperimentConfig defaults_for(const std::string& command);
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
ExperimentConfig merge_json(ExperimentConfig base, const nlohmann::json& j);

/// Files an experiment produces, by file name. Nothing is written until the
/// whole experiment has finished.
struct Artifacts {
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
};

Artifacts run_estimate(const ExperimentConfig& config);
Artifacts run_convergence(const ExperimentConfig& config);
Artifacts run_lowrank(const ExperimentConfig& config);
Artifacts run_completion(const ExperimentConfig& config);
Artifacts run_nearsingular(const ExperimentConfig& config);
Artifacts run_gradvar(const ExperimentConfig& config);
Artifacts run_experiment(const ExperimentConfig& config);

/// Layer counts probed by gradvar for a rule depth L: ceil(k L / 4), k = 1..4.
std::vector<std::size_t> depth_sweep(std::size_t rule_layers);

/// SVG for a CSV produced by one of the experiments, chosen by its header.
/// Returns nullopt for an unrecognised header.
std::optional<std::string> plot_csv(const std::string& csv_text);

/// provenance.json contents: config, seeds, version and artifact list.
std::string provenance_json(const ExperimentConfig& config, const Artifacts& artifacts);

/// Adds an SVG for every plottable CSV when config.svg is set, then the
/// provenance record.
void finalize_artifacts(const ExperimentConfig& config, Artifacts& artifacts);

/// Writes every artifact into `dir` (created if needed).
void write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts);

}  // namespace cpce
