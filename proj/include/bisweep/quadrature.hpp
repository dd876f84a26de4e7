#pragma once

// Gauss-Jacobi rules via Golub-Welsch, plus a tanh-sinh rule used for
// independent cross-checks of singular endpoint integrals.

#include <Eigen/Dense>
#include <functional>

#include "bisweep/types.hpp"

namespace bisweep {

// Nodes/weights for int_{-1}^{1} (1-t)^a (1+t)^b f(t) dt, a,b > -1.
struct JacobiRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  double a = 0, b = 0;
};

JacobiRule gauss_jacobi(int n, double a, double b);
inline JacobiRule gauss_legendre(int n) { return gauss_jacobi(n, 0, 0); }

// int_0^1 f(t) dt. Integrable singularities are resolved to machine precision
// at t = 0 only (double rounding saturates near t = 1); param so that singular
// endpoints land at 0, splitting the interval when both ends are singular.
double tanh_sinh(const std::function<double(double)>& f, int levels = 7);
cplx tanh_sinh_c(const std::function<cplx(double)>& f, int levels = 7);

}  // namespace bisweep
