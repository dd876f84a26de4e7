#include "bisweep/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bisweep/disk_greens.hpp"
#include "bisweep/parallel.hpp"

namespace bisweep {

StiffnessMatrix assemble_stiffness(const Mesh& mesh, const Phantom& phantom,
                                   CoefficientMode mode) {
  const int N = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int reg = mesh.tri_region[t];
    if (reg >= static_cast<int>(phantom.inclusions.size()))
      throw input_error("stiffness: mesh region label out of range");
    const double sig = reg < 0 ? 1.0 : phantom.inclusions[reg].kappa;
    const double coeff = mode == CoefficientMode::sigma ? sig : 1.0 - sig;
    if (coeff == 0) continue;
    const auto [a, b, c] = mesh.triangles[t];
    // Edge vector opposite each vertex; grad phi_i = perp(e_i) / (2A), so
    // K^e_ij = coeff (e_i . e_j) / (4A).
    const Vec2 e[3] = {mesh.nodes[c] - mesh.nodes[b], mesh.nodes[a] - mesh.nodes[c],
                       mesh.nodes[b] - mesh.nodes[a]};
    const double A = mesh.signed_area(t);
    const int idx[3] = {a, b, c};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(idx[i], idx[j], coeff * e[i].dot(e[j]) / (4 * A));
  }
  StiffnessMatrix out;
  out.K.resize(N, N);
  out.K.setFromTriplets(trip.begin(), trip.end());
  out.mode = mode;
  return out;
}

std::vector<int> inclusion_node_set(const Mesh& mesh) {
  std::vector<char> flag(mesh.num_nodes(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.tri_region[t] >= 0)
      for (const int v : mesh.triangles[t]) flag[v] = 1;
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (flag[i]) out.push_back(i);
  return out;
}

Eigen::VectorXd interior_source(const Mesh& mesh, const SchwarzChristoffelMap& map,
                                const BoundaryPoint& x, const BoundaryPoint& y,
                                const std::vector<int>& region) {
  if ((x.xy - y.xy).norm() < 1e-12 * (1 + map.polygon.diameter))
    throw input_error("interior source: degenerate electrode pair");
  const Vec2 X = to_vec2(map.boundary_to_disk(x));
  const Vec2 Y = to_vec2(map.boundary_to_disk(y));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (const int j : region) {
    if (j < 0 || j >= mesh.num_nodes()) throw input_error("interior source: node out of range");
    if (mesh.node_boundary[j]) throw input_error("interior source: boundary node in region set");
    const Vec2 zj = to_vec2(map.to_disk(mesh.nodes[j]));
    u[j] = neumann_green(zj, X) - neumann_green(zj, Y);
  }
  return u;
}

NeumannSolver::NeumannSolver(const StiffnessMatrix& K_sigma, double tol, int max_refinements)
    : K_(K_sigma.K), tol_(tol), refine_(max_refinements > 0 ? max_refinements : 2) {
  const int N = static_cast<int>(K_.rows());
  for (int i = 0; i < N; ++i)
    if (!(K_.coeff(i, i) > 0))
      throw numeric_error("neumann solver: nonpositive stiffness diagonal");
  // Pin node 0: a mean-free right-hand side is compatible, so the pinned
  // system reproduces an exact solution of the singular one with u(0) = 0.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(K_.nonZeros()));
  for (int k = 0; k < K_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, k); it; ++it)
      if (it.row() != 0 && it.col() != 0)
        trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  trip.emplace_back(0, 0, 1.0);
  Eigen::SparseMatrix<double> pinned(N, N);
  pinned.setFromTriplets(trip.begin(), trip.end());
  ldlt_.compute(pinned);
  if (ldlt_.info() != Eigen::Success)
    throw numeric_error("neumann solver: factorization failed");
}

Eigen::VectorXd NeumannSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != K_.rows()) throw input_error("neumann solver: rhs size mismatch");
  const int N = static_cast<int>(rhs.size());
  if (std::abs(rhs.sum()) > 1e-9 * std::max(1.0, rhs.lpNorm<1>()))
    throw input_error("neumann solver: right-hand side has nonzero mean");
  Eigen::VectorXd b = rhs;
  b.array() -= b.mean();
  const double bn = b.norm();
  if (bn == 0) return Eigen::VectorXd::Zero(N);

  Eigen::VectorXd f = b;
  f(0) = 0;
  Eigen::VectorXd x = ldlt_.solve(f);
  for (int sweep = 0; sweep < refine_; ++sweep) {
    Eigen::VectorXd r = b - K_ * x;
    r(0) = 0;
    if (r.norm() <= tol_ * bn) break;
    x += ldlt_.solve(r).eval();
  }
  x.array() -= x.mean();
  const double res = (K_ * x - b).norm();
  if (res > 100 * tol_ * bn)
    throw nonconvergence_error("neumann solver: residual " + std::to_string(res / bn) +
                               " above tolerance");
  return x;
}

Eigen::VectorXd solve_scatter(const StiffnessMatrix& K_sigma,
                              const StiffnessMatrix& K_one_minus_sigma,
                              const Eigen::VectorXd& u) {
  if (u.size() != K_one_minus_sigma.K.rows())
    throw input_error("scatter solve: vector size mismatch");
  const Eigen::VectorXd r = K_one_minus_sigma.K * u;
  return NeumannSolver(K_sigma).solve(r);
}

double four_electrode(const Eigen::VectorXd& u_xy, const Eigen::VectorXd& u_pq,
                      const Eigen::VectorXd& w_pq, const StiffnessMatrix& K_one_minus_sigma) {
  const auto N = K_one_minus_sigma.K.rows();
  if (u_xy.size() != N || u_pq.size() != N || w_pq.size() != N)
    throw input_error("four electrode: vector size mismatch");
  return u_xy.dot(K_one_minus_sigma.K * (u_pq + w_pq));
}

BisweepMatrix simulate_bisweep_on_mesh(const Mesh& mesh, const Phantom& phantom,
                                       const SchwarzChristoffelMap& map,
                                       const Electrodes& electrodes, int threads) {
  const int n = static_cast<int>(electrodes.position.size());
  if (n < 2) throw input_error("bisweep: at least two electrodes required");
  if (static_cast<int>(electrodes.theta.size()) != n)
    throw input_error("bisweep: electrode positions and angles mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((electrodes.position[i].xy - electrodes.position[j].xy).norm() <
          1e-12 * (1 + map.polygon.diameter))
        throw input_error("bisweep: electrodes must be distinct");

  BisweepMatrix out;
  out.n = n;
  out.entries = Eigen::MatrixXd::Zero(n, n);
  out.electrode = electrodes.position;
  out.theta = electrodes.theta;

  const std::vector<int> region = inclusion_node_set(mesh);
  if (region.empty()) return out;
  const StiffnessMatrix Ks = assemble_stiffness(mesh, phantom, CoefficientMode::sigma);
  const StiffnessMatrix Km = assemble_stiffness(mesh, phantom, CoefficientMode::one_minus_sigma);
  if (Km.K.nonZeros() == 0) return out;
  const NeumannSolver solver(Ks);

  const int R = static_cast<int>(region.size());
  std::vector<Vec2> zt(R);
  parallel_for(R, threads,
               [&](std::size_t k) { zt[k] = to_vec2(map.to_disk(mesh.nodes[region[k]])); });

  // Per-electrode Neumann-Green traces at the transported inclusion nodes;
  // every pair source is a difference of two columns.
  Eigen::MatrixXd trace(R, n);
  for (int e = 0; e < n; ++e) {
    const Vec2 xe(std::cos(electrodes.theta[e]), std::sin(electrodes.theta[e]));
    for (int k = 0; k < R; ++k) trace(k, e) = neumann_green(zt[k], xe);
  }

  const int N = mesh.num_nodes();
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t pi) {
    const auto [i, j] = pairs[pi];
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    for (int k = 0; k < R; ++k) u[region[k]] = trace(k, i) - trace(k, j);
    const Eigen::VectorXd r = Km.K * u;
    const Eigen::VectorXd w = solver.solve(r);
    out.entries(i, j) = u.dot(Km.K * (u + w));
  });
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.entries(j, i) = out.entries(i, j);
  return out;
}

BisweepMatrix simulate_bisweep(const Phantom& phantom, const SchwarzChristoffelMap& map,
                               const Electrodes& electrodes, double h, int threads) {
  return simulate_bisweep_on_mesh(generate_mesh(phantom, h), phantom, map, electrodes, threads);
}

}  // namespace bisweep
