#pragma once

// P1 finite-element forward solver for bisweep data: piecewise-constant
// stiffness assembly, the transported Neumann-Green interior source, the
// projected-PCG scatter solve K_sigma w = K_{1-sigma} u, and the discrete
// four-electrode evaluation u^T K_{1-sigma} (u + w).

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <vector>

#include "bisweep/conformal.hpp"
#include "bisweep/geometry.hpp"
#include "bisweep/mesh.hpp"
#include "bisweep/pipeline.hpp"
#include "bisweep/types.hpp"

namespace bisweep {

enum class CoefficientMode { sigma, one_minus_sigma };

struct StiffnessMatrix {
  Eigen::SparseMatrix<double> K;  // symmetric, rows sum to zero
  CoefficientMode mode = CoefficientMode::sigma;
};

StiffnessMatrix assemble_stiffness(const Mesh& mesh, const Phantom& phantom, CoefficientMode mode);

// Nodes whose basis support meets an inclusion: the vertices of
// inclusion-labeled triangles, sorted ascending.
std::vector<int> inclusion_node_set(const Mesh& mesh);

// u_j = N(Phi(z_j), Phi(x)) - N(Phi(z_j), Phi(y)) for j in region, 0 elsewhere.
Eigen::VectorXd interior_source(const Mesh& mesh, const SchwarzChristoffelMap& map,
                                const BoundaryPoint& x, const BoundaryPoint& y,
                                const std::vector<int>& region);

// Direct solver for the singular pure-Neumann system: node 0 is pinned to
// zero (the solution is only defined up to a constant), the pinned SPD matrix
// is factored once with a sparse LDL^T, and solutions are re-centered onto
// the mean-zero subspace after iterative refinement. The factorization is
// shared across solves; solve() is const and safe to call concurrently.
class NeumannSolver {
 public:
  explicit NeumannSolver(const StiffnessMatrix& K_sigma, double tol = 1e-12,
                         int max_refinements = 0);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;  // mean-zero solution

 private:
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  double tol_;
  int refine_;
};

// w with K_sigma w = K_{1-sigma} u, mean zero.
Eigen::VectorXd solve_scatter(const StiffnessMatrix& K_sigma,
                              const StiffnessMatrix& K_one_minus_sigma,
                              const Eigen::VectorXd& u);

// Q_sigma(delta_x - delta_y, delta_p - delta_q) = u_xy^T K_{1-sigma} (u_pq + w_pq).
double four_electrode(const Eigen::VectorXd& u_xy, const Eigen::VectorXd& u_pq,
                      const Eigen::VectorXd& w_pq, const StiffnessMatrix& K_one_minus_sigma);

// Full bisweep matrix: one assembly, one preconditioner, then independent
// per-electrode-pair solves (optionally on several threads; the result is
// bitwise independent of the thread count).
BisweepMatrix simulate_bisweep_on_mesh(const Mesh& mesh, const Phantom& phantom,
                                       const SchwarzChristoffelMap& map,
                                       const Electrodes& electrodes, int threads = 1);
BisweepMatrix simulate_bisweep(const Phantom& phantom, const SchwarzChristoffelMap& map,
                               const Electrodes& electrodes, double h, int threads = 1);

}  // namespace bisweep
