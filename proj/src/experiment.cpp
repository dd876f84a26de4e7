#include "bisweep/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <utility>

#include "bisweep/conformal.hpp"
#include "bisweep/fem.hpp"
#include "bisweep/mesh.hpp"
#include "json.hpp"

namespace bisweep {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<double> equispaced_angles(int n) {
  std::vector<double> t(n);
  for (int l = 0; l < n; ++l) t[l] = 2 * pi * l / n;
  return t;
}

json config_json(const ExperimentConfig& c) {
  json p;
  p["n"] = c.n;
  p["mesh_h"] = c.mesh_h;
  p["order"] = c.order;
  p["dipoles"] = c.dipoles;
  p["noise"] = c.noise;
  p["perturb"] = c.perturb;
  if (c.seed_set) p["seed"] = c.seed;
  p["grid"] = c.grid;
  p["threads"] = c.threads;
  p["out"] = c.out_dir;
  return p;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// Manifest: code version, command, full parameter echo, content checksums.
// No timestamps, so a rerun yields byte-identical output.
void write_manifest(const ExperimentConfig& config, const std::string& command,
                    const std::vector<std::string>& files) {
  json doc;
  doc["version"] = version_string;
  doc["command"] = command;
  doc["parameters"] = config_json(config);
  json sums;
  for (const auto& f : files) sums[f] = "fnv1a:" + hex64(fnv1a(read_file(join(config.out_dir, f))));
  doc["checksums"] = sums;
  atomic_write(join(config.out_dir, "manifest.json"), doc.dump(2) + "\n");
}

// Electrode set on a perturbed boundary: displaced positions with their disk
// angles under the perturbed-domain map.
Electrodes displaced_electrodes(const PerturbedGeometry& pert, const SchwarzChristoffelMap& map,
                                const std::vector<BoundaryPoint>& ideal) {
  Electrodes el;
  el.position = pert.displace(ideal);
  el.theta.resize(el.position.size());
  for (std::size_t j = 0; j < el.position.size(); ++j)
    el.theta[j] = std::arg(map.boundary_to_disk(el.position[j]));
  return el;
}

struct SimulateResult {
  BisweepMatrix data;
  std::vector<std::string> files;
};

SimulateResult simulate_run(const ExperimentConfig& config, const SchwarzChristoffelMap& map) {
  const auto ideal = electrode_positions(map, config.n);
  Mesh mesh;
  BisweepMatrix s;
  if (config.perturb > 0) {
    auto pert = perturb_geometry(config.phantom, config.perturb, sub_seed(config.seed, "perturb"));
    // Electrode jitter draws from its own named stream.
    pert.seed = sub_seed(config.seed, "jitter");
    const auto map_pert = build_map(pert.phantom.domain);
    const auto el = displaced_electrodes(pert, map_pert, ideal.position);
    mesh = generate_mesh(pert.phantom, config.mesh_h);
    s = simulate_bisweep_on_mesh(mesh, pert.phantom, map_pert, el, config.threads);
  } else {
    mesh = generate_mesh(config.phantom, config.mesh_h);
    s = simulate_bisweep_on_mesh(mesh, config.phantom, map, ideal, config.threads);
  }
  if (config.noise > 0) s = add_noise(s, config.noise, sub_seed(config.seed, "noise"));
  save_bisweep(s, join(config.out_dir, "bisweep.csv"));
  save_mesh(mesh, join(config.out_dir, "mesh.node"), join(config.out_dir, "mesh.ele"));
  save_phantom(config.phantom, join(config.out_dir, "phantom.json"));
  return {std::move(s), {"bisweep.csv", "mesh.node", "mesh.ele", "phantom.json", "map.cache"}};
}

// Reconstructs in the ideal geometry; suffix distinguishes per-sample files.
std::vector<std::string> reconstruct_run(const ExperimentConfig& config,
                                         const SchwarzChristoffelMap& map, BisweepMatrix s,
                                         const std::string& suffix) {
  if (s.n != config.n)
    throw input_error("reconstruct: data has n = " + std::to_string(s.n) +
                      " electrodes but the config says n = " + std::to_string(config.n));
  s.theta = equispaced_angles(s.n);  // as-if ideal electrode angles
  const auto lambda = bisweep_to_ntd(s, config.order);
  GridSpec gs;
  gs.nx = gs.ny = config.grid;
  gs.frame = GridFrame::domain;
  const auto rec =
      reconstruct(lambda, map, config.order, config.dipoles, gs, {}, 0.95, config.threads);
  const std::string csv = "reconstruction" + suffix + ".csv";
  const std::string pgm = "reconstruction" + suffix + ".pgm";
  save_reconstruction_csv(rec.grid, join(config.out_dir, csv));
  save_reconstruction_pgm(rec, join(config.out_dir, pgm));
  return {csv, pgm};
}

// Dense-angle sweep profile ς(x_1, ·) synthesized from the NtD series.
SweepSeries dense_profile(const BisweepMatrix& s, int order, const std::string& label,
                          int samples) {
  BisweepMatrix ideal = s;
  ideal.theta = equispaced_angles(s.n);
  const auto lambda = bisweep_to_ntd(ideal, order);
  const auto dense = ntd_to_bisweep(lambda, equispaced_angles(samples));
  const auto row = sweep_restriction(dense, 0);
  SweepSeries out;
  out.label = label;
  out.theta = dense.theta;
  out.value.assign(row.data(), row.data() + row.size());
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 2) throw input_error("config: need at least 2 electrodes");
  if (!(mesh_h > 0)) throw input_error("config: mesh_h must be positive");
  if (order < 1 || order > n - 1)
    throw input_error("config: order must lie in [1, n-1]");
  if (dipoles < 1 || dipoles % 2 == 0)
    throw input_error("config: dipoles must be a positive odd number");
  if (noise < 0) throw input_error("config: noise level must be nonnegative");
  if (perturb < 0) throw input_error("config: perturbation magnitude must be nonnegative");
  if ((noise > 0 || perturb > 0) && !seed_set)
    throw input_error("config: a seed is required whenever noise or perturbation is nonzero");
  if (grid < 2) throw input_error("config: grid resolution must be at least 2");
  if (threads < 1) throw input_error("config: threads must be at least 1");
  if (out_dir.empty()) throw input_error("config: output directory must be set");
}

ExperimentConfig load_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw input_error(path + ": " + e.what());
  }
  if (!doc.is_object()) throw input_error(path + ": config must be a JSON object");
  static const std::vector<std::string> known{"phantom", "phantom_file", "n",       "mesh_h",
                                              "order",   "dipoles",      "noise",   "perturb",
                                              "seed",    "grid",         "threads", "out"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw input_error(path + ": unknown config key '" + key + "'");
  }
  if (doc.contains("phantom") == doc.contains("phantom_file"))
    throw input_error(path + ": provide exactly one of 'phantom' or 'phantom_file'");

  ExperimentConfig out;
  try {
    if (doc.contains("phantom")) {
      out.phantom = parse_phantom(doc["phantom"].dump());
    } else {
      fs::path p(doc["phantom_file"].get<std::string>());
      if (p.is_relative()) p = fs::path(path).parent_path() / p;
      out.phantom = load_phantom(p.string());
    }
    out.n = doc.value("n", out.n);
    out.mesh_h = doc.value("mesh_h", out.mesh_h);
    out.order = doc.value("order", out.order);
    out.dipoles = doc.value("dipoles", out.dipoles);
    out.noise = doc.value("noise", out.noise);
    out.perturb = doc.value("perturb", out.perturb);
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
        throw input_error("config: seed must be an integer");
      out.seed = doc["seed"].get<std::uint64_t>();
      out.seed_set = true;
    }
    out.grid = doc.value("grid", out.grid);
    out.threads = doc.value("threads", out.threads);
    out.out_dir = doc.value("out", out.out_dir);
  } catch (const json::exception& e) {
    throw input_error(path + ": " + e.what());
  }
  out.validate();
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t sub_seed(std::uint64_t seed, const std::string& stream) {
  std::uint64_t x = seed ^ fnv1a(stream);
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Phantom example_phantom() {
  auto dom = PolygonDomain::from_vertices({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  return Phantom::create(std::move(dom),
                         {Inclusion::disk({1.5, 0.45}, 0.25, 0.5),
                          Inclusion::polygon({{0.25, 1.3}, {0.7, 1.3}, {0.7, 1.7}, {0.25, 1.7}}, 0.5)});
}

SchwarzChristoffelMap cached_map(const ExperimentConfig& config) {
  const auto& domain = config.phantom.domain;
  const std::string cache = join(config.out_dir, "map.cache");
  if (auto cached = load_map(cache, domain, domain.centroid(), domain.point_at(0.0)))
    return *std::move(cached);
  auto map = build_map(domain);
  std::filesystem::create_directories(config.out_dir);
  save_map(map, cache);
  return map;
}

void cmd_simulate(const ExperimentConfig& config) {
  config.validate();
  const auto map = cached_map(config);
  const auto sim = simulate_run(config, map);
  write_manifest(config, "simulate", sim.files);
}

void cmd_reconstruct(const ExperimentConfig& config, const std::string& csv_path) {
  config.validate();
  const std::string path = csv_path.empty() ? join(config.out_dir, "bisweep.csv") : csv_path;
  const auto s = load_bisweep(path);
  const auto map = cached_map(config);
  auto files = reconstruct_run(config, map, s, "");
  files.push_back("map.cache");
  write_manifest(config, "reconstruct", files);
}

void cmd_example1(const ExperimentConfig& config) {
  config.validate();
  const auto map = cached_map(config);
  auto sim = simulate_run(config, map);
  auto files = sim.files;
  for (auto& f : reconstruct_run(config, map, std::move(sim.data), "")) files.push_back(f);
  write_manifest(config, "example1", files);
}

void cmd_example2(const ExperimentConfig& config) {
  config.validate();
  const auto map = cached_map(config);
  const auto ideal_el = electrode_positions(map, config.n);
  const auto mesh = generate_mesh(config.phantom, config.mesh_h);
  const auto s_ideal =
      simulate_bisweep_on_mesh(mesh, config.phantom, map, ideal_el, config.threads);

  BisweepMatrix s_meas = s_ideal;
  if (config.perturb > 0) {
    auto pert = perturb_geometry(config.phantom, config.perturb, sub_seed(config.seed, "perturb"));
    pert.seed = sub_seed(config.seed, "jitter");
    const auto map_pert = build_map(pert.phantom.domain);
    const auto el = displaced_electrodes(pert, map_pert, ideal_el.position);
    const auto mesh_pert = generate_mesh(pert.phantom, config.mesh_h);
    s_meas = simulate_bisweep_on_mesh(mesh_pert, pert.phantom, map_pert, el, config.threads);
  }

  std::vector<std::string> files;
  BisweepMatrix first_noisy = s_meas;
  for (int k = 0; k < 5; ++k) {
    BisweepMatrix noisy =
        config.noise > 0 ? add_noise(s_meas, config.noise, sub_seed(config.seed, "noise") + k)
                         : s_meas;
    if (k == 0) first_noisy = noisy;
    save_bisweep(noisy, join(config.out_dir, "bisweep_sample" + std::to_string(k) + ".csv"));
    files.push_back("bisweep_sample" + std::to_string(k) + ".csv");
    for (auto& f :
         reconstruct_run(config, map, std::move(noisy), "_sample" + std::to_string(k)))
      files.push_back(f);
  }

  // Sweep comparison at the first electrode: ideal and perturbed profiles as
  // band-limited syntheses, plus the discrete noisy samples.
  std::vector<SweepSeries> sweep;
  sweep.push_back(dense_profile(s_ideal, config.order, "ideal", 512));
  sweep.push_back(dense_profile(s_meas, config.order, "perturbed", 512));
  SweepSeries pts;
  pts.label = "noisy";
  pts.theta = equispaced_angles(config.n);
  const auto row = sweep_restriction(first_noisy, 0);
  pts.value.assign(row.data(), row.data() + row.size());
  sweep.push_back(pts);
  save_sweep(sweep, join(config.out_dir, "sweep.csv"));
  files.push_back("sweep.csv");
  files.push_back("map.cache");
  write_manifest(config, "example2", files);
}

void cmd_sweep(const ExperimentConfig& config, const std::string& csv_path) {
  config.validate();
  const std::string path = csv_path.empty() ? join(config.out_dir, "bisweep.csv") : csv_path;
  auto s = load_bisweep(path);
  if (s.n != config.n)
    throw input_error("sweep: data has n = " + std::to_string(s.n) +
                      " electrodes but the config says n = " + std::to_string(config.n));
  SweepSeries data;
  data.label = "data";
  data.theta = s.theta;
  const auto row = sweep_restriction(s, 0);
  data.value.assign(row.data(), row.data() + row.size());
  const auto smooth = dense_profile(s, config.order, "series", 512);
  save_sweep({data, smooth}, join(config.out_dir, "sweep.csv"));
  write_manifest(config, "sweep", {"sweep.csv"});
}

}  // namespace bisweep
