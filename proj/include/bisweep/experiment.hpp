#pragma once

// Experiment driver: JSON config resolution, the simulate / reconstruct
// commands, the noisy-and-perturbed study, sweep profiles, and reproducibility
// manifests with content checksums.

#include <cstdint>
#include <string>
#include <vector>

#include "bisweep/factorization.hpp"
#include "bisweep/geometry.hpp"
#include "bisweep/io.hpp"
#include "bisweep/pipeline.hpp"

namespace bisweep {

inline constexpr const char* version_string = "bisweep 1.0.0";

struct ExperimentConfig {
  Phantom phantom;
  int n = 16;            // point electrodes
  double mesh_h = 0.05;  // target mesh edge length
  int order = 12;        // NtD truncation order M
  int dipoles = 15;      // dipole direction count N_d
  double noise = 0;      // noise level relative to max |entry|
  double perturb = 0;    // boundary perturbation, fraction of the diameter
  std::uint64_t seed = 0;
  bool seed_set = false;
  int grid = 161;        // raster resolution (grid x grid over the bounding box)
  int threads = 1;
  std::string out_dir = "out";

  void validate() const;
};

// Config document:
//   { "phantom": {...} | "phantom_file": "path",
//     "n":.., "mesh_h":.., "order":.., "dipoles":.., "noise":.., "perturb":..,
//     "seed":.., "grid":.., "threads":.., "out":".." }
// A relative phantom_file resolves against the config file's directory;
// unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

// Named sub-stream derivation: noise, perturbation and electrode jitter each
// draw from their own stream of the run seed.
std::uint64_t sub_seed(std::uint64_t seed, const std::string& stream);

std::uint64_t fnv1a(const std::string& bytes);

// The paper-style two-inclusion phantom on the L-shaped hexagon used by the
// shipped example configs.
Phantom example_phantom();

// Builds the ideal-domain map, reusing <out>/map.cache when it matches.
SchwarzChristoffelMap cached_map(const ExperimentConfig& config);

// simulate: writes bisweep.csv, mesh.node/.ele, phantom.json, map.cache and
// manifest.json into the output directory. perturb > 0 simulates on the
// perturbed geometry with displaced electrodes; noise > 0 adds seeded noise.
void cmd_simulate(const ExperimentConfig& config);

// reconstruct: reads csv_path (default <out>/bisweep.csv), interprets it in
// the ideal geometry, and writes reconstruction.csv + reconstruction.pgm.
void cmd_reconstruct(const ExperimentConfig& config, const std::string& csv_path = "");

// example1: simulate + reconstruct in one directory with a single manifest.
void cmd_example1(const ExperimentConfig& config);

// example2: ideal and perturbed simulations, five noisy samples reconstructed
// as if ideal (reconstruction_sample<k>.csv/.pgm), and sweep.csv with the
// series "ideal", "perturbed" and "noisy" at the first electrode.
void cmd_example2(const ExperimentConfig& config);

// sweep: discrete restriction of the bisweep data to the first electrode
// ("data") plus its band-limited series synthesis on a dense grid ("series").
void cmd_sweep(const ExperimentConfig& config, const std::string& csv_path = "");

}  // namespace bisweep
