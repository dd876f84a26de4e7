// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL] line
// followed by indented measurements; the process exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "bisweep/conformal.hpp"
#include "bisweep/disk_greens.hpp"
#include "bisweep/experiment.hpp"
#include "bisweep/factorization.hpp"
#include "bisweep/fem.hpp"
#include "bisweep/geometry.hpp"
#include "bisweep/io.hpp"
#include "bisweep/mesh.hpp"
#include "bisweep/pipeline.hpp"

using namespace bisweep;
namespace fs = std::filesystem;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Report {
  std::ostringstream notes;
  bool ok = true;

  void check(bool cond, const std::string& msg) {
    notes << "    " << (cond ? "ok  " : "FAIL") << "  " << msg << "\n";
    if (!cond) ok = false;
  }
};

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(3) << v;
  return o.str();
}

int worker_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hc, 1u, 8u));
}

PolygonDomain regular_polygon(int m) {
  std::vector<Vec2> v;
  for (int k = 0; k < m; ++k) {
    const double t = 2 * pi * k / m;
    v.emplace_back(std::cos(t), std::sin(t));
  }
  return PolygonDomain::from_vertices(v);
}

std::vector<double> equispaced(int n) {
  std::vector<double> t(n);
  for (int l = 0; l < n; ++l) t[l] = 2 * pi * l / n;
  return t;
}

double concentric_eigenvalue(int k, double rho, double kappa) {
  const double mu = (1 - kappa) / (1 + kappa);
  const double q = mu * std::pow(rho, 2 * k);
  return 2 * q / (k * (1 - q));
}

// --- 1. concentric-disk spectrum -------------------------------------------

void c1_concentric_spectrum(Report& rep) {
  const auto start = std::chrono::steady_clock::now();
  const auto phantom = Phantom::create(regular_polygon(64), {Inclusion::disk({0, 0}, 0.5, 0.5)});
  const auto map = build_map(phantom.domain);
  const auto el = electrode_positions(map, 64);
  const auto mesh = generate_mesh(phantom, 0.02);
  const auto s = simulate_bisweep_on_mesh(mesh, phantom, map, el, worker_threads());
  const auto L = bisweep_to_ntd(s, 8);
  for (int k = 1; k <= 4; ++k) {
    const double exact = concentric_eigenvalue(k, 0.5, 0.5);
    const double tol = (k == 1) ? 0.03 : 0.05;
    for (int j : {2 * k - 2, 2 * k - 1}) {
      const double rel = std::abs(L.entries(j, j) - exact) / exact;
      rep.check(rel <= tol, "mode " + std::to_string(k) + " diagonal entry " + std::to_string(j) +
                                ": relative error " + num(rel) + " <= " + num(tol));
    }
  }
  rep.check(std::abs(L.entries(0, 0) - 2.0 / 11.0) / (2.0 / 11.0) <= 0.03,
            "first eigenvalue near 2/11 = " + num(2.0 / 11.0) + ", measured " + num(L.entries(0, 0)));
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.check(elapsed <= 300.0, "runtime " + num(elapsed) + " s <= 300 s");
}

// --- 2. reciprocity / zero diagonal / cocycle -------------------------------

void c2_reciprocity(Report& rep) {
  const auto ph = example_phantom();
  const auto map = build_map(ph.domain);
  const int n = 8;
  const auto el = electrode_positions(map, n);
  const auto mesh = generate_mesh(ph, 0.12);
  const auto Ks = assemble_stiffness(mesh, ph, CoefficientMode::sigma);
  const auto Km = assemble_stiffness(mesh, ph, CoefficientMode::one_minus_sigma);
  const auto region = inclusion_node_set(mesh);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<Eigen::VectorXd> u(pairs.size()), w(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    u[p] = interior_source(mesh, map, el.position[pairs[p].first], el.position[pairs[p].second],
                           region);
    w[p] = solve_scatter(Ks, Km, u[p]);
  }

  Eigen::MatrixXd table(pairs.size(), pairs.size());
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = 0; b < pairs.size(); ++b)
      table(a, b) = four_electrode(u[a], u[b], w[b], Km);
  const double scale = table.cwiseAbs().maxCoeff();
  const double asym = (table - table.transpose()).cwiseAbs().maxCoeff() / scale;
  rep.check(asym <= 1e-9, "max relative swap asymmetry " + num(asym) + " <= 1e-9");

  const auto s = simulate_bisweep_on_mesh(mesh, ph, map, el);
  rep.check((s.entries.diagonal().array() == 0.0).all(), "bisweep diagonal is exactly zero");

  auto idx = [&](int i, int j) {
    return std::find(pairs.begin(), pairs.end(), std::make_pair(i, j)) - pairs.begin();
  };
  double worst = 0;
  for (auto [x, y, z] : std::vector<std::array<int, 3>>{{1, 2, 3}, {0, 3, 6}, {2, 4, 7}}) {
    for (std::size_t b : {idx(0, 4), idx(1, 5)}) {
      const double lhs = four_electrode(u[idx(x, y)], u[b], w[b], Km) +
                         four_electrode(u[idx(y, z)], u[b], w[b], Km);
      const double rhs = four_electrode(u[idx(x, z)], u[b], w[b], Km);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, scale));
    }
  }
  rep.check(worst <= 1e-10, "cocycle residual " + num(worst) + " <= 1e-10");
}

// --- 3. conformal invariance -------------------------------------------------

void c3_conformal_invariance(Report& rep) {
  const auto ph = example_phantom();
  const auto mapL = build_map(ph.domain);
  const int n = 16;
  const auto elL = electrode_positions(mapL, n);
  const auto meshL = generate_mesh(ph, 0.035);
  const auto sL = simulate_bisweep_on_mesh(meshL, ph, mapL, elL, worker_threads());

  // Transplant each inclusion to the disk by mapping a dense boundary chain.
  auto transplant = [&](const Inclusion& inc) {
    std::vector<Vec2> chain;
    if (inc.shape == Inclusion::Shape::disk) {
      chain = inc.polygonize(5e-4);
    } else {
      const int m = static_cast<int>(inc.vertices.size());
      for (int k = 0; k < m; ++k) {
        const Vec2 a = inc.vertices[k], b = inc.vertices[(k + 1) % m];
        const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / 0.02)));
        for (int t = 0; t < steps; ++t) chain.push_back(a + (b - a) * (double(t) / steps));
      }
    }
    std::vector<Vec2> image;
    image.reserve(chain.size());
    for (const auto& p : chain) {
      const cplx w = mapL.to_disk(p);
      image.emplace_back(w.real(), w.imag());
    }
    return Inclusion::polygon(image, inc.kappa);
  };
  std::vector<Inclusion> moved;
  for (const auto& inc : ph.inclusions) moved.push_back(transplant(inc));

  const auto disk_phantom = Phantom::create(regular_polygon(128), moved, 0.005);
  const auto mapD = build_map(disk_phantom.domain);
  const auto elD = electrode_positions(mapD, n);
  const auto meshD = generate_mesh(disk_phantom, 0.035);
  const auto sD = simulate_bisweep_on_mesh(meshD, disk_phantom, mapD, elD, worker_threads());

  const double big = sL.entries.cwiseAbs().maxCoeff();
  double worst = 0;
  int compared = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::abs(sL.entries(i, j)) < 0.1 * big) continue;
      ++compared;
      worst = std::max(worst,
                       std::abs(sD.entries(i, j) - sL.entries(i, j)) / std::abs(sL.entries(i, j)));
    }
  rep.check(compared > 0, "entries above the 10% floor: " + std::to_string(compared));
  rep.check(worst <= 0.05,
            "max relative deviation " + num(worst) + " <= 0.05 across independent meshes");
}

// --- 4. conversion roundtrip and kernel pairing -----------------------------

void c4_conversions(Report& rep) {
  const int n = 64, M = 16;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  NtdMatrix L;
  L.M = M;
  L.entries = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j <= i; ++j) L.entries(i, j) = L.entries(j, i) = uni(rng);
  L.entries.diagonal() = Eigen::VectorXd::LinSpaced(M, 2.0, 0.4);

  const auto theta = equispaced(n);
  const auto s = ntd_to_bisweep(L, theta);
  const auto back = bisweep_to_ntd(s, M);
  const double round = (back.entries - L.entries).cwiseAbs().maxCoeff();
  rep.check(round <= 1e-10, "band-limited conversion roundtrip error " + num(round) + " <= 1e-10");

  Eigen::VectorXd F(M), G(M);
  for (int i = 0; i < M; ++i) {
    F(i) = uni(rng);
    G(i) = uni(rng);
  }
  Eigen::VectorXd f(n), g(n);
  for (int l = 0; l < n; ++l) {
    double fv = 0, gv = 0;
    for (int i = 1; i <= M; ++i) {
      fv += F(i - 1) * trig_basis(i, theta[l]);
      gv += G(i - 1) * trig_basis(i, theta[l]);
    }
    f(l) = fv;
    g(l) = gv;
  }
  const double lhs = F.dot(L.entries * G);
  const double wq = 2 * pi / n;
  const double rhs = -0.5 * wq * wq * f.dot(s.entries * g);
  const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  rep.check(rel <= 1e-8, "kernel pairing mismatch " + num(rel) + " <= 1e-8");
}

// --- 5. Schwarz-Christoffel map ---------------------------------------------

void c5_sc_map(Report& rep) {
  const auto square =
      PolygonDomain::from_vertices({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto lshape = example_phantom().domain;

  auto exercise = [&](const PolygonDomain& poly, const std::string& name) {
    const auto map = build_map(poly);
    rep.check(map.param_residual <= 1e-10,
              name + ": parameter residual " + num(map.param_residual) + " <= 1e-10");

    double fwd = 0, inv = 0, cum = 0;
    for (int k = 0; k < poly.size(); ++k) {
      fwd = std::max(fwd,
                     (map.boundary_from_disk(map.prevertex_angle[k]).xy - poly.vertices[k]).norm());
      const cplx w = map.boundary_to_disk(poly.point_at(cum));
      inv = std::max(inv, std::abs(w - map.prevertex[k]));
      cum += poly.edge_length[k];
    }
    rep.check(fwd <= 1e-8, name + ": prevertex -> vertex error " + num(fwd) + " <= 1e-8");
    rep.check(inv <= 1e-8, name + ": vertex -> prevertex error " + num(inv) + " <= 1e-8");

    double round = 0;
    for (double r : {0.25, 0.55, 0.85})
      for (int a = 0; a < 16; ++a) {
        const cplx w = std::polar(r, 2 * pi * (a + 0.37) / 16);
        round = std::max(round, std::abs(map.to_disk(map.from_disk(w)) - w));
      }
    rep.check(round <= 1e-8, name + ": interior roundtrip error " + num(round) + " <= 1e-8");

    const double h = 1e-6;
    double cr = 0;
    for (double r : {0.3, 0.7})
      for (int a = 0; a < 8; ++a) {
        const cplx w = std::polar(r, 2 * pi * (a + 0.21) / 8);
        const Vec2 dx = (map.from_disk(w + h) - map.from_disk(w - h)) / (2 * h);
        const Vec2 dy = (map.from_disk(w + cplx(0, h)) - map.from_disk(w - cplx(0, h))) / (2 * h);
        const double nrm = std::hypot(dx.norm(), dy.norm());
        cr = std::max(cr, (std::abs(dx.x() - dy.y()) + std::abs(dx.y() + dy.x())) / nrm);
      }
    rep.check(cr <= 1e-5, name + ": Cauchy-Riemann residual " + num(cr) + " <= 1e-5");
    return map;
  };

  const auto sq_map = exercise(square, "square");
  exercise(lshape, "L-shape");

  double gap = 0;
  for (int k = 0; k < 4; ++k) {
    double d = sq_map.prevertex_angle[(k + 1) % 4] - sq_map.prevertex_angle[k];
    if (d < 0) d += 2 * pi;
    gap = std::max(gap, std::abs(d - pi / 2));
  }
  rep.check(gap <= 1e-8, "square prevertices equispaced within " + num(gap));
}

// --- 6. noiseless reconstruction quality ------------------------------------

struct Components {
  std::vector<Vec2> centroid;
  std::vector<int> size;
};

Components connected_components(const ReconstructionGrid& grid, const std::vector<int>& members) {
  std::vector<char> in(grid.indicator.size(), 0);
  for (int idx : members) in[idx] = 1;
  // raster coordinates of each evaluated point
  std::vector<int> cell(grid.indicator.size(), -1);
  for (int c = 0; c < grid.nx * grid.ny; ++c)
    if (grid.pixel[c] >= 0) cell[grid.pixel[c]] = c;

  std::vector<int> label(grid.indicator.size(), -1);
  Components out;
  for (int seed = 0; seed < static_cast<int>(grid.indicator.size()); ++seed) {
    if (!in[seed] || label[seed] >= 0) continue;
    const int id = static_cast<int>(out.centroid.size());
    Vec2 sum = Vec2::Zero();
    int count = 0;
    std::queue<int> q;
    q.push(seed);
    label[seed] = id;
    while (!q.empty()) {
      const int p = q.front();
      q.pop();
      sum += grid.domain_point[p];
      ++count;
      const int c = cell[p], ix = c % grid.nx, iy = c / grid.nx;
      const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (auto& d : off) {
        const int jx = ix + d[0], jy = iy + d[1];
        if (jx < 0 || jx >= grid.nx || jy < 0 || jy >= grid.ny) continue;
        const int np = grid.pixel[jy * grid.nx + jx];
        if (np < 0 || !in[np] || label[np] >= 0) continue;
        label[np] = id;
        q.push(np);
      }
    }
    out.centroid.push_back(sum / count);
    out.size.push_back(count);
  }
  return out;
}

void c6_reconstruction_quality(Report& rep) {
  const auto ph = example_phantom();
  const auto map = build_map(ph.domain);
  const auto el = electrode_positions(map, 64);
  const auto mesh = generate_mesh(ph, 0.05);
  const auto s = simulate_bisweep_on_mesh(mesh, ph, map, el, worker_threads());
  const auto L = bisweep_to_ntd(s, 32);

  // Noiseless data for this phantom decays past machine precision inside 32
  // modes, so the Picard stage rejects the full order and advises a smaller
  // one; honor that advice by rerunning at the largest order whose retained
  // singular values stay above the documented 1e-14 x sigma_1 floor, and keep
  // every quality gate below unchanged.
  const GridSpec gs{101, 101, GridFrame::domain};
  int trunc = 32;
  Reconstruction rec;
  try {
    rec = reconstruct(L, map, trunc, 15, gs, {}, 0.95, worker_threads());
  } catch (const numeric_error& e) {
    rep.check(std::string(e.what()).find("truncation order") != std::string::npos,
              std::string("full-order run rejected for the documented reason: ") + e.what());
    // The order-M operator is the leading MxM block, so its spectrum must be
    // re-examined per block (truncations that split a cos/sin mode pair leave
    // a nearly decoupled row whose singular value dives further).
    int usable = 32;
    double floor_ratio = 0;
    for (; usable > 1; --usable) {
      const auto sv = svd_ntd(L, usable);
      floor_ratio = sv.singular_value(usable - 1) / sv.singular_value(0);
      if (floor_ratio >= 1e-14) break;
    }
    rep.check(usable >= 16, "usable spectral order " + std::to_string(usable) +
                                " >= 16 (its sigma_min/sigma_1 = " + num(floor_ratio) + ")");
    trunc = usable;
    rec = reconstruct(L, map, trunc, 15, gs, {}, 0.95, worker_threads());
    rep.notes << "    note  reconstruction evaluated at order " << trunc << " of 32 requested\n";
  }
  const auto& grid = rec.grid;

  // Rank-sum AUC of Ind as an inside/outside classifier (inside should be low).
  const int N = static_cast<int>(grid.indicator.size());
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return grid.indicator[a] < grid.indicator[b]; });
  std::vector<char> inside(N, 0);
  for (int i = 0; i < N; ++i)
    for (const auto& inc : ph.inclusions)
      if (inc.contains(grid.domain_point[i])) inside[i] = 1;
  double rank_sum = 0;
  int n_in = 0;
  for (int pos = 0; pos < N;) {
    int end = pos;
    while (end < N && grid.indicator[order[end]] == grid.indicator[order[pos]]) ++end;
    const double mid_rank = 0.5 * (pos + end - 1) + 1.0;  // 1-based mid rank
    for (int t = pos; t < end; ++t)
      if (inside[order[t]]) {
        rank_sum += mid_rank;
        ++n_in;
      }
    pos = end;
  }
  const int n_out = N - n_in;
  const double auc = (rank_sum - 0.5 * n_in * (n_in + 1.0)) / (double(n_in) * n_out);
  // rank_sum accumulates ranks of INSIDE points; low ranks mean low Ind, so
  // AUC of "outside scores higher" is 1 - U_in/(n_in n_out).
  const double auc_low_inside = 1.0 - auc;
  rep.check(n_in > 0 && n_out > 0, "grid covers both classes: " + std::to_string(n_in) +
                                       " inside / " + std::to_string(n_out) + " outside");
  rep.check(auc_low_inside >= 0.9, "ROC AUC " + num(auc_low_inside) + " >= 0.9");

  const auto comps = connected_components(grid, rec.level_set[3]);
  rep.check(!comps.centroid.empty(), "mid-cutoff level set is non-empty");
  const double limit = 0.15 * ph.domain.diameter;
  for (const auto& inc : ph.inclusions) {
    Vec2 truth;
    if (inc.shape == Inclusion::Shape::disk) {
      truth = inc.center;
    } else {
      truth = Vec2::Zero();
      for (const auto& v : inc.vertices) truth += v;
      truth /= static_cast<double>(inc.vertices.size());
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : comps.centroid) best = std::min(best, (c - truth).norm());
    rep.check(best <= limit, "inclusion centroid matched within " + num(best) + " <= " +
                                 num(limit) + " (0.15 x diameter)");
  }
}

// --- 7. noisy perturbed robustness -------------------------------------------

void c7_noisy_robustness(Report& rep) {
  const auto ph = example_phantom();
  const auto map = build_map(ph.domain);
  const int n = 16;
  const auto el = electrode_positions(map, n);
  const double dil = 0.1 * ph.domain.diameter;

  int completed = 0, localized = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    try {
      auto pert = perturb_geometry(ph, 0.01, sub_seed(seed, "perturb"));
      pert.seed = sub_seed(seed, "jitter");
      const auto mapP = build_map(pert.phantom.domain);
      const auto meshP = generate_mesh(pert.phantom, 0.06);
      Electrodes elP;
      elP.position = pert.displace(el.position);
      for (const auto& x : elP.position) elP.theta.push_back(std::arg(mapP.boundary_to_disk(x)));
      auto sP = simulate_bisweep_on_mesh(meshP, pert.phantom, mapP, elP, worker_threads());
      sP = add_noise(sP, 0.02, sub_seed(seed, "noise"));
      // Reconstruct as if the data came from the ideal geometry.
      sP.theta = equispaced(n);
      sP.electrode = el.position;
      const auto L = bisweep_to_ntd(sP, 12);
      const auto rec =
          reconstruct(L, map, 12, 15, GridSpec{101, 101, GridFrame::domain}, {}, 0.95, 1);
      ++completed;

      const auto& ind = rec.grid.indicator;
      const int best = static_cast<int>(std::min_element(ind.begin(), ind.end()) - ind.begin());
      const Vec2 p = rec.grid.domain_point[best];
      bool hit = false;
      for (const auto& inc : ph.inclusions)
        if (inc.contains(p) || inc.boundary_distance(p) <= dil) hit = true;
      if (hit) ++localized;
      rep.notes << "      seed " << seed << ": lowest-Ind point (" << num(p.x()) << ", "
                << num(p.y()) << ") " << (hit ? "inside" : "OUTSIDE") << " the dilated inclusions\n";
    } catch (const std::exception& e) {
      rep.notes << "      seed " << seed << ": failed: " << e.what() << "\n";
    }
  }
  rep.check(completed == 5, "pipeline completed on 5/5 seeds");
  rep.check(localized >= 4,
            "lowest-Ind point localized in " + std::to_string(localized) + "/5 seeds (need >= 4)");
}

// --- 8. disk Green function identities ---------------------------------------

void c8_green_identities(Report& rep) {
  const auto start = std::chrono::steady_clock::now();

  const int nq = 1 << 15;
  const Vec2 yb(std::cos(0.37), std::sin(0.37)), yi(0.4, 0.1);
  double mean_b = 0, mean_i = 0;
  for (int i = 0; i < nq; ++i) {
    const double t = 2 * pi * (i + 0.5) / nq;
    const Vec2 x(std::cos(t), std::sin(t));
    mean_b += neumann_green(x, yb);
    mean_i += neumann_green(x, yi);
  }
  rep.check(std::abs(mean_b / nq) <= 1e-5, "zero boundary mean, pole on the circle: " + num(mean_b / nq));
  rep.check(std::abs(mean_i / nq) <= 1e-12, "zero boundary mean, interior pole: " + num(mean_i / nq));

  const double h = 1e-6;
  double gerr = 0;
  for (auto& [x, y] : std::vector<std::pair<Vec2, Vec2>>{
           {{0.2, 0.1}, {0.6, -0.3}}, {{-0.4, 0.5}, {0.0, 0.0}}, {{0.1, -0.7}, {std::cos(1.2), std::sin(1.2)}}}) {
    const Vec2 g = grad_neumann_green(x, y);
    const Vec2 fd((neumann_green({x.x() + h, x.y()}, y) - neumann_green({x.x() - h, x.y()}, y)) / (2 * h),
                  (neumann_green({x.x(), x.y() + h}, y) - neumann_green({x.x(), x.y() - h}, y)) / (2 * h));
    gerr = std::max(gerr, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  rep.check(gerr <= 1e-8, "gradient vs finite differences: " + num(gerr) + " <= 1e-8");
  const Vec2 g0 = grad_neumann_green({0, 0}, {1, 0});
  rep.check((g0 - Vec2(1 / pi, 0)).norm() <= 1e-13, "gradient at the centre pole pair is (1/pi, 0)");

  const double hh = 1e-3;
  double lap_max = 0;
  const Vec2 yl(0.5, 0.2);
  for (auto& x : {Vec2(0.1, 0.0), Vec2(-0.3, 0.4), Vec2(0.2, -0.5)}) {
    const double lap =
        (neumann_green({x.x() + hh, x.y()}, yl) + neumann_green({x.x() - hh, x.y()}, yl) +
         neumann_green({x.x(), x.y() + hh}, yl) + neumann_green({x.x(), x.y() - hh}, yl) -
         4 * neumann_green(x, yl)) /
        (hh * hh);
    lap_max = std::max(lap_max, std::abs(lap));
  }
  rep.check(lap_max <= 1e-4, "harmonicity (5-point Laplacian): " + num(lap_max) + " <= 1e-4");

  const Vec2 gp = point_pair_gradient({0, 0}, 0.0, pi);
  rep.check((gp - Vec2(2 / pi, 0)).norm() <= 1e-13, "antipodal pair gradient is (2/pi, 0)");
  double perr = 0;
  for (auto& x : {Vec2(0.3, 0.1), Vec2(-0.6, 0.2), Vec2(0.0, -0.8)})
    for (auto [t, p] : std::vector<std::pair<double, double>>{{0.4, 2.0}, {1.1, 5.2}, {3.0, 0.2}}) {
      const Vec2 a = point_pair_gradient(x, t, p);
      const Vec2 b = grad_neumann_green(x, {std::cos(t), std::sin(t)}) -
                     grad_neumann_green(x, {std::cos(p), std::sin(p)});
      perr = std::max(perr, (a - b).norm() / std::max(1.0, a.norm()));
    }
  rep.check(perr <= 1e-12, "closed four-pole form vs gradient difference: " + num(perr));

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.check(elapsed <= 10.0, "runtime " + num(elapsed) + " s <= 10 s");
}

// --- 9. determinism -----------------------------------------------------------

void c9_determinism(Report& rep) {
  const fs::path root = fs::temp_directory_path() / ("bisweep_acc_" + std::to_string(::getpid()));
  fs::create_directories(root);

  ExperimentConfig cfg;
  cfg.phantom = Phantom::create(
      PolygonDomain::from_vertices({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}),
      {Inclusion::disk({0.25, 0.0}, 0.3, 0.5)});
  cfg.n = 8;
  cfg.mesh_h = 0.3;
  cfg.order = 6;
  cfg.dipoles = 3;
  cfg.noise = 0.02;
  cfg.perturb = 0.01;
  cfg.seed = 11;
  cfg.seed_set = true;
  cfg.grid = 15;

  cfg.out_dir = (root / "a").string();
  cmd_simulate(cfg);
  const auto once = read_file((root / "a" / "bisweep.csv").string());
  cfg.out_dir = (root / "b").string();
  cmd_simulate(cfg);
  rep.check(read_file((root / "b" / "bisweep.csv").string()) == once,
            "seeded noisy perturbed run writes byte-identical data");
  fs::remove_all(root);

  const auto ph = example_phantom();
  const auto map = build_map(ph.domain);
  const auto el = electrode_positions(map, 8);
  const auto mesh = generate_mesh(ph, 0.12);
  const auto serial = simulate_bisweep_on_mesh(mesh, ph, map, el, 1);
  const auto parallel = simulate_bisweep_on_mesh(mesh, ph, map, el, 4);
  rep.check((serial.entries.array() == parallel.entries.array()).all(),
            "simulation entries are bitwise thread-count independent");

  NtdMatrix L;
  L.M = 12;
  L.entries = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 1; i <= 12; ++i)
    L.entries(i - 1, i - 1) = concentric_eigenvalue((i + 1) / 2, 0.5, 0.5);
  const auto spec = svd_ntd(L, 12);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) {
    Vec2 p(uni(rng), uni(rng));
    if (p.norm() < 0.95) pts.push_back(p);
  }
  const auto f1 = indicator_field(spec, pts, 5, 0, 0.95, 1);
  const auto f4 = indicator_field(spec, pts, 5, 0, 0.95, 4);
  bool same = f1.indicator.size() == f4.indicator.size();
  for (std::size_t i = 0; same && i < f1.indicator.size(); ++i)
    same = f1.indicator[i] == f4.indicator[i];
  rep.check(same, "indicator field is bitwise thread-count independent");
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    void (*fn)(Report&);
  };
  const Criterion criteria[] = {
      {"concentric-disk spectrum matches the separation-of-variables series", c1_concentric_spectrum},
      {"four-electrode values are reciprocal, zero-diagonal, and additive", c2_reciprocity},
      {"bisweep data is invariant under transplanting the phantom to the disk", c3_conformal_invariance},
      {"series/data conversions invert each other and satisfy the kernel pairing", c4_conversions},
      {"disk-to-polygon maps solve the parameter problem and invert cleanly", c5_sc_map},
      {"noiseless reconstruction separates inclusions from background", c6_reconstruction_quality},
      {"noisy perturbed runs localize the inclusions across seeds", c7_noisy_robustness},
      {"disk Green function identities hold at tight tolerances", c8_green_identities},
      {"seeded runs are byte-reproducible and thread-count independent", c9_determinism},
  };

  int failures = 0;
  int k = 0;
  for (const auto& c : criteria) {
    ++k;
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(rep);
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.notes << "    FAIL  unhandled exception: " << e.what() << "\n";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (rep.ok ? "[PASS] " : "[FAIL] ") << k << ": " << c.label << "  ("
              << std::setprecision(3) << dt << " s)\n"
              << rep.notes.str() << std::flush;
    if (!rep.ok) ++failures;
  }
  std::cout << (failures == 0 ? "all 9 criteria passed\n"
                              : std::to_string(failures) + " of 9 criteria failed\n");
  return failures == 0 ? 0 : 1;
}
