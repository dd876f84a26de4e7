#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "bisweep/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  int n = 0;
  double mesh_h = 0;
  int order = 0;
  int dipoles = 0;
  double noise = 0;
  double perturb = 0;
  std::uint64_t seed = 0;
  int grid = 0;
  std::string out;
  std::string csv;
};

void add_common(CLI::App* cmd, Flags& f, bool with_csv) {
  cmd->add_option("--config", f.config, "config JSON document")->required();
  cmd->add_option("--n", f.n, "point electrode count");
  cmd->add_option("--mesh-h", f.mesh_h, "target mesh edge length");
  cmd->add_option("--order", f.order, "NtD truncation order M");
  cmd->add_option("--dipoles", f.dipoles, "dipole direction count N_d");
  cmd->add_option("--noise", f.noise, "noise level relative to max |entry|");
  cmd->add_option("--perturb", f.perturb, "boundary perturbation, fraction of the diameter");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--grid", f.grid, "reconstruction grid resolution");
  cmd->add_option("--out", f.out, "output directory");
  if (with_csv) cmd->add_option("csv", f.csv, "bisweep CSV (default <out>/bisweep.csv)");
}

bisweep::ExperimentConfig resolve(const CLI::App* cmd, const Flags& f) {
  auto config = bisweep::load_config(f.config);
  if (cmd->count("--n")) config.n = f.n;
  if (cmd->count("--mesh-h")) config.mesh_h = f.mesh_h;
  if (cmd->count("--order")) config.order = f.order;
  if (cmd->count("--dipoles")) config.dipoles = f.dipoles;
  if (cmd->count("--noise")) config.noise = f.noise;
  if (cmd->count("--perturb")) config.perturb = f.perturb;
  if (cmd->count("--seed")) {
    config.seed = f.seed;
    config.seed_set = true;
  }
  if (cmd->count("--grid")) config.grid = f.grid;
  if (cmd->count("--out")) config.out_dir = f.out;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-electrode EIT: bisweep simulation and factorization-method reconstruction"};
  app.require_subcommand(1);
  Flags f;
  auto* simulate = app.add_subcommand("simulate", "simulate bisweep measurements");
  add_common(simulate, f, false);
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct inclusion support");
  add_common(reconstruct, f, true);
  auto* example1 = app.add_subcommand("example1", "noiseless simulate + reconstruct study");
  add_common(example1, f, false);
  auto* example2 = app.add_subcommand("example2", "perturbed and noisy five-sample study");
  add_common(example2, f, false);
  auto* sweep = app.add_subcommand("sweep", "sweep profile of existing bisweep data");
  add_common(sweep, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) bisweep::cmd_simulate(resolve(simulate, f));
    if (reconstruct->parsed()) bisweep::cmd_reconstruct(resolve(reconstruct, f), f.csv);
    if (example1->parsed()) bisweep::cmd_example1(resolve(example1, f));
    if (example2->parsed()) bisweep::cmd_example2(resolve(example2, f));
    if (sweep->parsed()) bisweep::cmd_sweep(resolve(sweep, f), f.csv);
  } catch (const bisweep::input_error& e) {
    std::fprintf(stderr, "error [input]: %s\n", e.what());
    return 2;
  } catch (const bisweep::numeric_error& e) {
    std::fprintf(stderr, "error [numeric]: %s\n", e.what());
    return 3;
  } catch (const bisweep::nonconvergence_error& e) {
    std::fprintf(stderr, "error [nonconvergence]: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
