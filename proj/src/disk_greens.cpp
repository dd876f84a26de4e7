#include "bisweep/disk_greens.hpp"

#include <cmath>

namespace bisweep {

namespace {
constexpr double coincide_tol = 1e-12;
}

double neumann_green(const Vec2& x, const Vec2& y) {
  if ((x - y).norm() < coincide_tol)
    throw numeric_error("neumann_green: evaluation at the singularity x = y");
  const double r = y.norm();
  if (r < 1e-14) return -std::log(x.norm()) / (2 * pi);
  // log| y/|y| - |y| x | = log|y| + log|x - y*|, y* = y/|y|^2 (reflected pole)
  const Vec2 ystar = y / (r * r);
  return -(std::log((y - x).norm()) + std::log(r) + std::log((x - ystar).norm())) / (2 * pi);
}

Vec2 grad_neumann_green(const Vec2& x, const Vec2& y) {
  if ((x - y).norm() < coincide_tol)
    throw numeric_error("grad_neumann_green: evaluation at the singularity x = y");
  const double r = y.norm();
  if (r < 1e-14) return -x / (2 * pi * x.squaredNorm());
  const Vec2 ystar = y / (r * r);
  const Vec2 a = (x - y) / (x - y).squaredNorm();
  const Vec2 b = (x - ystar) / (x - ystar).squaredNorm();
  return -(a + b) / (2 * pi);
}

Vec2 point_pair_gradient(const Vec2& x, double theta, double phi) {
  const Vec2 ytheta(std::cos(theta), std::sin(theta));
  const Vec2 yphi(std::cos(phi), std::sin(phi));
  if ((x - ytheta).norm() < coincide_tol || (x - yphi).norm() < coincide_tol)
    throw numeric_error("point_pair_gradient: evaluation at a pole");
  // Four simple poles, two per boundary point (the pole and its reflection
  // coincide on the circle, doubling each term).
  const Vec2 a = (x - ytheta) / (x - ytheta).squaredNorm();
  const Vec2 b = (x - yphi) / (x - yphi).squaredNorm();
  return (b - a) / pi;
}

DipoleProbe::DipoleProbe(const Vec2& z_, const Vec2& d_) : z(z_), d(d_) {
  if (z.norm() >= 1)
    throw input_error("dipole probe: point must lie strictly inside the unit disk");
  if (std::abs(d.norm() - 1.0) > 1e-12)
    throw input_error("dipole probe: direction must be a unit vector");
}

double dipole_trace(const DipoleProbe& probe, const Vec2& x) {
  if (std::abs(x.norm() - 1.0) > 1e-10)
    throw input_error("dipole_trace: evaluation point must lie on the unit circle");
  const Vec2 zx = probe.z - x;
  return zx.dot(probe.d) / (pi * zx.squaredNorm());
}

Eigen::VectorXd dipole_fourier_coeffs(const DipoleProbe& probe, int M) {
  if (M < 1) throw input_error("dipole_fourier_coeffs: M must be >= 1");
  Eigen::VectorXd c(M);
  const cplx zeta = to_cplx(probe.z);
  const cplx delta = to_cplx(probe.d);
  // <g, cos k>/sqrt(pi) and <g, sin k>/sqrt(pi) come from the geometric series
  // of the pole pair: conj(delta) * conj(zeta)^(k-1).
  cplx p = std::conj(delta);
  const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
  for (int k = 1; 2 * k - 1 <= M; ++k) {
    c(2 * k - 2) = -p.real() * inv_sqrt_pi;
    if (2 * k <= M) c(2 * k - 1) = p.imag() * inv_sqrt_pi;
    p *= std::conj(zeta);
  }
  return c;
}

double trig_basis(int i, double theta) {
  if (i < 0) throw input_error("trig_basis: negative index");
  if (i == 0) return 1.0 / std::sqrt(2 * pi);
  const int k = (i + 1) / 2;
  const double v = (i % 2 == 1) ? std::cos(k * theta) : std::sin(k * theta);
  return v / std::sqrt(pi);
}

}  // namespace bisweep
