#pragma once

// Data-space conversions between bisweep matrices and relative NtD matrices
// in the orthonormal trigonometric basis, plus the noise and geometry
// perturbation models used for synthetic experiments.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "bisweep/geometry.hpp"
#include "bisweep/types.hpp"

namespace bisweep {

struct BisweepMatrix {
  int n = 0;
  Eigen::MatrixXd entries;               // n x n, symmetric, zero diagonal
  std::vector<BoundaryPoint> electrode;  // positions on the domain boundary
  std::vector<double> theta;             // disk preimage angles of the electrodes
};

struct NtdMatrix {
  int M = 0;
  Eigen::MatrixXd entries;  // M x M; index 2k-1 ~ cos(k t)/sqrt(pi), 2k ~ sin(k t)/sqrt(pi)
};

// lambda_ij = -c_ij/2 with c = (4 pi^2 / n^2) B sigma B^T, B_il = phi_i(theta_l),
// on the equispaced disk preimage grid. Requires M <= n - 1; modes are aliased
// beyond roughly n/2 - 1.
NtdMatrix bisweep_to_ntd(const BisweepMatrix& s, int M);

// Truncated series sigma(x, y) = sum lambda_ik (phi_k phi_i(x) - 2 phi_k(x) phi_i(y)
// + phi_k phi_i(y)) at unit-circle angles theta; electrode metadata is filled
// with the unit-circle interpretation (arc length = angle).
BisweepMatrix ntd_to_bisweep(const NtdMatrix& lambda, const std::vector<double>& theta);

// Recovers the unique symmetric zero-diagonal sigma from measurements
// m = -alpha sigma beta^T / 2 taken with mean-free current patterns alpha and
// voltage patterns beta (both (n-1) x n, full rank).
BisweepMatrix general_to_bisweep(const Eigen::MatrixXd& m, const Eigen::MatrixXd& alpha,
                                 const Eigen::MatrixXd& beta);

// One row of the bisweep matrix: sigma(x_fixed, .) at the stored electrodes.
Eigen::VectorXd sweep_restriction(const BisweepMatrix& s, int fixed_index);
// On-demand variant: evaluates a pair callback against a fixed electrode.
std::vector<double> sweep_restriction(
    const std::function<double(const BoundaryPoint&, const BoundaryPoint&)>& pair_value,
    const BoundaryPoint& fixed, const std::vector<BoundaryPoint>& samples);

// Adds symmetric Gaussian noise with std = level * max|entries| to the
// off-diagonal entries; per-entry counter-based streams make the result
// deterministic in the seed and independent of evaluation order.
BisweepMatrix add_noise(const BisweepMatrix& s, double level, std::uint64_t seed);

struct PerturbedGeometry {
  Phantom phantom;         // perturbed domain, original inclusions
  double magnitude = 0;    // vertex offset bound as a fraction of the diameter
  std::uint64_t seed = 0;  // stream used for the electrode jitter

  // Electrode transfer rule: closest point on the perturbed boundary plus a
  // tangential jitter of at most magnitude * diameter arc length.
  std::vector<BoundaryPoint> displace(const std::vector<BoundaryPoint>& electrodes) const;
};

// Displaces every domain vertex by a uniform-in-disk offset of norm at most
// magnitude * diameter; retries up to 10 derived seeds when the perturbed
// phantom fails admissibility.
PerturbedGeometry perturb_geometry(const Phantom& phantom, double magnitude, std::uint64_t seed);

}  // namespace bisweep
