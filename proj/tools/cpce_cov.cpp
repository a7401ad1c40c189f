// cpce-cov: covariance learning with variational circuits from the command line.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpce/errors.hpp"
#include "cpce/experiments.hpp"
#include "cpce/io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3 };

// Flag values as given; unset flags leave the config untouched.
struct Flags {
  std::optional<std::size_t> n, runs, iters, rank, samples, layers;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr, eig_min, off_diagonal;
  std::optional<std::string> kind, c_schedule, layers_rule, mask;
  std::optional<std::vector<double>> fractions;
  std::optional<std::vector<std::size_t>> qubits, ranks;
  std::string out = "cpce-out";
  std::string config;
  std::string input;
  bool svg = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "number of variables");
  sub->add_option("--kind", f.kind, "estimator: c or e");
  sub->add_option("--runs", f.runs, "independent runs");
  sub->add_option("--iters", f.iters, "optimizer iterations");
  sub->add_option("--seed", f.seed, "base seed");
  sub->add_option("--lr", f.lr, "Adam learning rate");
  sub->add_option("--c-schedule", f.c_schedule, "guaranteed | correlation | uniform:FLOAT");
  sub->add_option("--rank", f.rank, "assumed rank (estimate) or true rank (lowrank)");
  sub->add_option("--ranks", f.ranks, "assumed ranks swept by lowrank")->delimiter(',');
  sub->add_option("--fractions", f.fractions, "missing fractions")->delimiter(',');
  sub->add_option("--qubits", f.qubits, "qubit counts")->delimiter(',');
  sub->add_option("--layers-rule", f.layers_rule, "n2 | linear:INT");
  sub->add_option("--layers", f.layers, "estimator circuit depth");
  sub->add_option("--samples", f.samples, "gradient samples per configuration");
  sub->add_option("--eig-min", f.eig_min, "smallest eigenvalue of the near-singular target");
  sub->add_option("--off-diagonal", f.off_diagonal, "off-diagonal entry of the plateau target");
  sub->add_option("--mask", f.mask, "CSV of observed pairs i,j");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--config", f.config, "JSON config or provenance.json; flags override it");
  sub->add_flag("--svg", f.svg, "also write SVG plots");
}

cpce::ExperimentConfig build_config(const std::string& command, const Flags& f) {
  cpce::ExperimentConfig c = cpce::ExperimentConfig::defaults_for(command);
  if (!f.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(cpce::read_text_file(f.config));
    } catch (const nlohmann::json::exception& e) {
      throw cpce::InputError(f.config + ": " + e.what());
    }
    if (j.is_object() && j.contains("config")) j = j["config"];
    c = cpce::merge_json(c, j);
    c.command = command;
  }
  if (f.n) c.n = *f.n;
  if (f.kind) c.kind = cpce::parse_kind(*f.kind);
  if (f.runs) c.runs = *f.runs;
  if (f.iters) c.iterations = *f.iters;
  if (f.seed) c.seed = *f.seed;
  if (f.lr) c.learning_rate = *f.lr;
  if (f.c_schedule) c.c_schedule = cpce::CSchedule::parse(*f.c_schedule);
  if (f.rank) c.rank = *f.rank;
  if (f.ranks) c.ranks = *f.ranks;
  if (f.fractions) c.fractions = *f.fractions;
  if (f.qubits) c.qubits = *f.qubits;
  if (f.layers_rule) c.layer_rule = cpce::LayerRule::parse(*f.layers_rule);
  if (f.layers) c.layers = *f.layers;
  if (f.samples) c.samples = *f.samples;
  if (f.eig_min) c.eig_min = *f.eig_min;
  if (f.off_diagonal) c.off_diagonal = *f.off_diagonal;
  if (f.mask) c.mask = *f.mask;
  if (!f.input.empty()) c.input = f.input;
  if (f.svg) c.svg = true;
  return c;
}

int run_plot(const Flags& f, bool out_given) {
  const std::filesystem::path csv = f.input;
  const auto svg = cpce::plot_csv(cpce::read_text_file(csv));
  if (!svg) throw cpce::InputError(csv.string() + ": not a recognised experiment CSV");
  const std::filesystem::path dir = out_given ? std::filesystem::path(f.out) : csv.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::filesystem::path target = dir / (csv.stem().string() + ".svg");
  cpce::write_text_file(target, *svg);
  std::cout << target.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance learning with variational quantum circuits"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> described{
      {"estimate", "fit a covariance matrix read from CSV"},
      {"convergence", "best-so-far MAE of both estimators on random targets"},
      {"lowrank", "sweep the assumed rank on a low-rank target"},
      {"complete", "fill in hidden entries for a sweep of missing fractions"},
      {"nearsingular", "fit a target with a tiny smallest eigenvalue"},
      {"gradvar", "gradient variance against qubit count and depth"}};
  std::vector<std::string> commands;
  for (const auto& [name, text] : described) {
    commands.push_back(name);
    CLI::App* sub = app.add_subcommand(name, text);
    add_common(sub, flags);
    if (name == "estimate") sub->add_option("target", flags.input, "target covariance CSV")->required();
  }
  CLI::App* plot = app.add_subcommand("plot", "render an experiment CSV as SVG");
  plot->add_option("csv", flags.input, "CSV file")->required();
  CLI::Option* plot_out = plot->add_option("--out", flags.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (plot->parsed()) return run_plot(flags, plot_out->count() > 0);
    std::string command;
    for (const std::string& name : commands)
      if (app.got_subcommand(name)) command = name;

    cpce::ExperimentConfig config;
    try {
      config = build_config(command, flags);
      config.validate();
    } catch (const cpce::InputError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }

    cpce::Artifacts artifacts = cpce::run_experiment(config);
    cpce::finalize_artifacts(config, artifacts);
    for (const std::string& w : artifacts.warnings) std::cerr << "warning: " << w << "\n";
    cpce::write_artifacts(flags.out, artifacts);
    for (const auto& [name, contents] : artifacts.files)
      std::cout << (std::filesystem::path(flags.out) / name).string() << "\n";
    return kOk;
  } catch (const cpce::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumerical;
  } catch (const cpce::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
