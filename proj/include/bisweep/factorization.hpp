#pragma once

// Inclusion-support reconstruction from the relative NtD matrix: truncated
// SVD, the truncated Picard quotient
//
//   f_d(z) = ( sum_k |g.v_k|^2 / sigma_k ) / ( sum_k |g.v_k|^2 ),
//
// dipole-direction averaging Ind(z), and cutoff level sets on a sample grid.
// Large Ind flags points outside the inclusion.

#include <Eigen/Dense>
#include <vector>

#include "bisweep/conformal.hpp"
#include "bisweep/pipeline.hpp"
#include "bisweep/types.hpp"

namespace bisweep {

struct SpectralData {
  int M = 0;
  Eigen::VectorXd singular_value;  // descending, nonnegative
  Eigen::MatrixXd left, right;     // columns u_k / v_k
};

// SVD of the leading M x M block of the NtD matrix.
SpectralData svd_ntd(const NtdMatrix& lambda, int M);

// Truncated Picard quotient at probe point z with dipole direction d.
double picard_indicator(const SpectralData& spec, const Vec2& z, const Vec2& d);

struct ReconstructionGrid {
  int M = 0;
  int num_dipoles = 0;
  double r_max = 0.95;
  // Raster metadata when built from a GridSpec (nx = 0 for plain point lists):
  // pixel is nx*ny row-major (top row first), holding an index into the point
  // arrays or -1 for out-of-domain / excluded samples.
  int nx = 0, ny = 0;
  Vec2 lo = Vec2::Zero(), hi = Vec2::Zero();
  std::vector<int> pixel;
  std::vector<Vec2> disk_point;     // evaluated sample points in the unit disk
  std::vector<Vec2> domain_point;   // their images in the physical domain
  std::vector<double> indicator;    // Ind values, one per evaluated point
  std::vector<Vec2> excluded;       // requested points with |z| > r_max
};

// Ind(z) = (1/N_d) sum_k f_{d_k}(z) with N_d (odd) equispaced directions
// d_k = (cos(offset + 2 pi k/N_d), sin(..)). Points beyond r_max are set
// aside in `excluded` rather than evaluated.
ReconstructionGrid indicator_field(const SpectralData& spec, const std::vector<Vec2>& points,
                                   int num_dipoles, double offset = 0, double r_max = 0.95,
                                   int threads = 1);

enum class GridFrame {
  domain,  // raster over the bounding box of the polygon, mapped forward
  disk     // raster over [-1,1]^2, mapped back for display
};

struct GridSpec {
  int nx = 101;
  int ny = 101;
  GridFrame frame = GridFrame::domain;
};

struct Reconstruction {
  ReconstructionGrid grid;
  std::vector<double> cutoff;               // ascending
  std::vector<std::vector<int>> level_set;  // per cutoff: point indices with Ind < cutoff
};

// Full reconstruction: SVD of order M, Ind over the raster, level sets for
// each cutoff. An empty cutoff list selects 8 log-spaced levels between the
// 5th and 95th percentile of Ind over the evaluated grid.
Reconstruction reconstruct(const NtdMatrix& lambda, const SchwarzChristoffelMap& map, int M,
                           int num_dipoles, const GridSpec& grid,
                           std::vector<double> cutoffs = {}, double r_max = 0.95,
                           int threads = 1);

}  // namespace bisweep
