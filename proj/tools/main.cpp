#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

using namespace circkde::cli;

int main(int argc, char** argv) {
  CLI::App app{"Circular kernel density estimation with von Mises kernels"};
  app.require_subcommand(1);

  FitOptions fit;
  bool fit_degrees = false;
  std::vector<std::string> fit_selectors{"RT", "PI", "LCV"};
  auto* fit_cmd = app.add_subcommand("fit", "Select bandwidths for an angle file and write density grids");
  fit_cmd->add_option("input", fit.input, "File with one angle per line")->required();
  fit_cmd->add_flag("--degrees", fit_degrees, "Input angles are in degrees");
  fit_cmd->add_option("--selectors", fit_selectors, "Comma-separated subset of RT,PI,LCV")->delimiter(',');
  fit_cmd->add_option("--gridsize", fit.gridsize, "Density grid size (power of two)");
  fit_cmd->add_option("--rose-bins", fit.rose_bins, "Number of rose-diagram arcs");
  fit_cmd->add_option("--seed", fit.seed, "Seed for the EM restarts");
  fit_cmd->add_option("--output-dir", fit.output_dir, "Directory for density, rose and report files");

  SampleOptions smp;
  bool sample_degrees = false;
  auto* sample_cmd = app.add_subcommand("sample", "Draw angles from a catalogue model");
  sample_cmd->add_option("model", smp.model, "Model id, M1..M20")->required();
  sample_cmd->add_option("n", smp.n, "Number of draws")->required();
  sample_cmd->add_option("--seed", smp.seed, "Random seed");
  sample_cmd->add_flag("--degrees", sample_degrees, "Write angles in degrees");
  sample_cmd->add_option("--output", smp.output, "Output file (default stdout)");

  SimulateOptions sim;
  std::vector<std::string> sim_models;
  std::vector<std::size_t> sim_sizes;
  std::size_t sim_replicates = 0;
  std::vector<std::string> sim_selectors;
  std::uint64_t sim_seed = 0;
  std::size_t sim_gridsize = 0;
  unsigned sim_threads = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the Monte Carlo bandwidth comparison");
  sim_cmd->add_option("--config", sim.config_file, "JSON experiment config");
  auto* o_models = sim_cmd->add_option("--models", sim_models, "Comma-separated model ids")->delimiter(',');
  auto* o_sizes = sim_cmd->add_option("--sample-sizes", sim_sizes, "Comma-separated sample sizes")->delimiter(',');
  auto* o_reps = sim_cmd->add_option("--replicates", sim_replicates, "Replicates per cell");
  auto* o_sel = sim_cmd->add_option("--selectors", sim_selectors, "Comma-separated RT,PI,LCV,ORACLE")->delimiter(',');
  auto* o_seed = sim_cmd->add_option("--seed", sim_seed, "Base seed");
  auto* o_grid = sim_cmd->add_option("--gridsize", sim_gridsize, "ISE grid size");
  auto* o_threads = sim_cmd->add_option("--threads", sim_threads, "Worker threads for replicates");
  sim_cmd->add_flag("--full", sim.full, "All 20 models, n = 100/250/500, 1000 replicates");
  sim_cmd->add_option("--output-dir", sim.output_dir, "Directory for report.json and report.txt");
  sim_cmd->add_option("--reference", sim.reference, "Reference table CSV; exit 2 if any cell fails");
  sim_cmd->add_option("--k-sigma", sim.k_sigma, "Width of the reference window in standard errors");

  auto* models_cmd = app.add_subcommand("models", "List the model catalogue as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*fit_cmd) {
      fit.unit = fit_degrees ? Unit::Degrees : Unit::Radians;
      fit.selectors = parse_selector_list(fit_selectors);
      return cmd_fit(fit, std::cout, std::cerr);
    }
    if (*sample_cmd) {
      smp.unit = sample_degrees ? Unit::Degrees : Unit::Radians;
      return cmd_sample(smp, std::cout, std::cerr);
    }
    if (*sim_cmd) {
      if (*o_models) sim.models = sim_models;
      if (*o_sizes) sim.sample_sizes = sim_sizes;
      if (*o_reps) sim.replicates = sim_replicates;
      if (*o_sel) sim.selectors = sim_selectors;
      if (*o_seed) sim.seed = sim_seed;
      if (*o_grid) sim.gridsize = sim_gridsize;
      if (*o_threads) sim.threads = sim_threads;
      return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*models_cmd) {
      return cmd_models(std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
