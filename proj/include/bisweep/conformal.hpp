#pragma once

// Schwarz-Christoffel map from the unit disk onto a polygonal domain:
//
//   f(w) = A + C int_0^w prod_k (1 - zeta/w_k)^(alpha_k - 1) dzeta
//
// with prevertices w_k on the unit circle and alpha_k * pi the interior
// angles. Normalized so f(0) is a prescribed interior point and f(1) a
// prescribed boundary anchor (default: the polygon centroid and vertex 0).

#include <optional>
#include <string>
#include <vector>

#include "bisweep/geometry.hpp"
#include "bisweep/quadrature.hpp"
#include "bisweep/types.hpp"

namespace bisweep {

struct SchwarzChristoffelMap {
  PolygonDomain polygon;
  std::vector<double> prevertex_angle;  // beta_k in [0, 2pi), cyclically increasing
  std::vector<cplx> prevertex;          // e^{i beta_k}, image vertex k
  std::vector<double> exponent;         // alpha_k - 1
  cplx scale;                           // C
  Vec2 center;                          // f(0)
  double anchor_arclen = 0;             // boundary anchor, f(1) = polygon.point_at(anchor_arclen)
  int quad_nodes = 24;                  // Gauss-Jacobi nodes per subinterval
  double param_residual = 0;            // final side-length-ratio residual (inf norm)

  std::vector<JacobiRule> corner_rule;  // per-vertex rule, weight (1+t)^exponent
  JacobiRule smooth_rule;               // Gauss-Legendre for singularity-free pieces

  cplx derivative(cplx w) const;              // f'(w), |w| <= 1, w not a prevertex
  Vec2 from_disk(cplx w) const;               // f(w) for |w| <= 1
  cplx to_disk(const Vec2& z) const;          // f^{-1}(z) for z in the closed domain
  BoundaryPoint boundary_from_disk(double theta) const;
  cplx boundary_to_disk(const BoundaryPoint& p) const;
};

SchwarzChristoffelMap build_map(const PolygonDomain& polygon, const Vec2& center,
                                const BoundaryPoint& anchor, int quad_nodes = 24);
// Centroid / vertex-0 normalization.
SchwarzChristoffelMap build_map(const PolygonDomain& polygon, int quad_nodes = 24);

struct Electrodes {
  std::vector<BoundaryPoint> position;  // on the domain boundary
  std::vector<double> theta;            // disk angles, theta_j = offset + 2pi (j-1)/n
};

// Boundary points whose disk images are equispaced: Phi(x_j) = e^{i theta_j}.
Electrodes electrode_positions(const SchwarzChristoffelMap& map, int n, double offset = 0);

// Prevertex/constant cache keyed by the polygon and normalization; returns
// nothing on any mismatch so callers fall back to build_map.
void save_map(const SchwarzChristoffelMap& map, const std::string& path);
std::optional<SchwarzChristoffelMap> load_map(const std::string& path, const PolygonDomain& polygon,
                                              const Vec2& center, const BoundaryPoint& anchor,
                                              int quad_nodes = 24);

}  // namespace bisweep
