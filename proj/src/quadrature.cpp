#include "bisweep/quadrature.hpp"

#include <cmath>

namespace bisweep {

JacobiRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw input_error("gauss_jacobi: need at least one node");
  if (a <= -1 || b <= -1) throw input_error("gauss_jacobi: exponents must exceed -1");
  // Monic Jacobi recurrence coefficients; Golub-Welsch on the symmetrized
  // tridiagonal matrix.
  Eigen::VectorXd diag(n), off(std::max(0, n - 1));
  const double ab = a + b;
  diag(0) = (b - a) / (ab + 2);
  for (int k = 1; k < n; ++k) {
    const double d = 2.0 * k + ab;
    diag(k) = (b * b - a * a) / (d * (d + 2));
  }
  for (int k = 1; k < n; ++k) {
    const double d = 2.0 * k + ab;
    const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
    const double den = d * d * (d + 1) * (d - 1);
    off(k - 1) = std::sqrt(num / den);
  }
  // Total mass 2^(a+b+1) B(a+1, b+1).
  const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(a + 1) +
                              std::lgamma(b + 1) - std::lgamma(ab + 2));
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) J(k, k) = diag(k);
  for (int k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = off(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw numeric_error("gauss_jacobi: eigen decomposition failed");
  JacobiRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes = es.eigenvalues();
  rule.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

namespace {

// Trapezoid sum of the tanh-sinh transform t(u) = 1/2 + 1/2 tanh((pi/2) sinh u)
// on (0,1); levels double the node density, nodes from finished levels are
// reused.
template <typename T>
T tanh_sinh_impl(const std::function<T(double)>& f, int levels) {
  const double umax = 3.9;
  double h = 0.5;
  T sum{};
  auto add_point = [&](double u) {
    const double v = pi / 2 * std::sinh(u);
    const double c = std::cosh(v);
    const double w = (pi / 4) * std::cosh(u) / (c * c);  // dx/du, x = (1 + tanh v)/2
    // x = 1/(1 + e^{-2v}) stays accurate down to subnormals on the 0 side; the
    // 1 side saturates at machine precision, so callers put singularities at 0.
    const double x = (v >= 0) ? 1.0 / (1.0 + std::exp(-2 * v)) : std::exp(2 * v) / (1.0 + std::exp(2 * v));
    if (x <= 0.0 || x >= 1.0 || w < 1e-290 || !std::isfinite(w)) return;
    sum += w * f(x);
  };
  const int n0 = static_cast<int>(umax / h);
  for (int i = -n0; i <= n0; ++i) add_point(i * h);
  T result = h * sum;
  for (int lev = 1; lev <= levels; ++lev) {
    h /= 2;
    const int n = static_cast<int>(umax / h);
    for (int i = -n; i <= n; ++i)
      if (i % 2 != 0) add_point(i * h);
    const T next = h * sum;
    const double change = std::abs(next - result);
    result = next;
    if (lev >= 3 && change <= 1e-14 * (std::abs(result) + 1e-30)) break;
  }
  return result;
}

}  // namespace

double tanh_sinh(const std::function<double(double)>& f, int levels) {
  return tanh_sinh_impl<double>(f, levels);
}

cplx tanh_sinh_c(const std::function<cplx(double)>& f, int levels) {
  return tanh_sinh_impl<cplx>(f, levels);
}

}  // namespace bisweep
