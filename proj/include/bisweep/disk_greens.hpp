#pragma once

// Neumann-Green function of the unit disk and the boundary dipole traces used
// by the factorization method.
//
//   N(x,y) = -(1/2pi) (log|y - x| + log| y/|y| - |y| x |),   y != 0
//   N(x,0) = -(1/2pi) log|x|
//
// For |y| = 1 this collapses to N(x,y) = -(1/pi) log|y - x|.

#include <Eigen/Dense>

#include "bisweep/types.hpp"

namespace bisweep {

double neumann_green(const Vec2& x, const Vec2& y);

// Gradient in the first argument; x interior, y in the closed disk, x != y.
Vec2 grad_neumann_green(const Vec2& x, const Vec2& y);

// grad_x [ N(x, e^{i theta}) - N(x, e^{i phi}) ] via the explicit four-pole
// form; agrees with the gradient difference but takes a separate code path.
Vec2 point_pair_gradient(const Vec2& x, double theta, double phi);

struct DipoleProbe {
  Vec2 z;  // interior probe point, |z| < 1
  Vec2 d;  // unit direction
  DipoleProbe(const Vec2& z_, const Vec2& d_);
};

// g_{z,d}(x) = (1/pi) (z - x).d / |z - x|^2 on |x| = 1.
double dipole_trace(const DipoleProbe& probe, const Vec2& x);

// Coefficients of g_{z,d} in the orthonormal trig basis
//   phi_{2k-1}(t) = cos(k t)/sqrt(pi),  phi_{2k}(t) = sin(k t)/sqrt(pi),
// entries 1..M (the constant mode is absent: g has zero mean).
Eigen::VectorXd dipole_fourier_coeffs(const DipoleProbe& probe, int M);

// Orthonormal mean-extended basis on [0, 2pi): index 0 is 1/sqrt(2pi),
// index 2k-1 is cos(k t)/sqrt(pi), index 2k is sin(k t)/sqrt(pi).
double trig_basis(int i, double theta);

}  // namespace bisweep
