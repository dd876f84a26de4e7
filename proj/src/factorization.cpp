#include "bisweep/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bisweep/disk_greens.hpp"
#include "bisweep/parallel.hpp"

namespace bisweep {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - lo;
  return (1 - w) * v[lo] + w * v[hi];
}

std::vector<Vec2> dipole_directions(int num_dipoles, double offset) {
  if (num_dipoles < 1 || num_dipoles % 2 == 0)
    throw input_error("indicator: dipole count must be a positive odd number");
  std::vector<Vec2> dir(num_dipoles);
  for (int k = 0; k < num_dipoles; ++k) {
    const double t = offset + 2 * pi * k / num_dipoles;
    dir[k] = Vec2(std::cos(t), std::sin(t));
  }
  return dir;
}

}  // namespace

SpectralData svd_ntd(const NtdMatrix& lambda, int M) {
  if (lambda.entries.rows() != lambda.M || lambda.entries.cols() != lambda.M)
    throw input_error("svd: NtD matrix shape disagrees with its order");
  if (M < 1 || M > lambda.M) throw input_error("svd: truncation order out of range");
  const Eigen::MatrixXd L = lambda.entries.topLeftCorner(M, M);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SpectralData out;
  out.M = M;
  out.singular_value = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  const double scale = L.norm();
  const double gap =
      (L - out.left * out.singular_value.asDiagonal() * out.right.transpose()).norm();
  if (scale > 0 && gap > 1e-10 * scale)
    throw numeric_error("svd: factor reconstruction residual exceeds 1e-10");
  return out;
}

double picard_indicator(const SpectralData& spec, const Vec2& z, const Vec2& d) {
  if (spec.M < 1 || spec.singular_value.size() != spec.M || spec.right.rows() != spec.M ||
      spec.right.cols() != spec.M)
    throw input_error("picard: malformed spectral data");
  const double s1 = spec.singular_value(0);
  if (!(s1 > 0)) throw numeric_error("picard: zero spectrum carries no inclusion signal");
  if (spec.singular_value(spec.M - 1) < 1e-14 * s1)
    throw numeric_error(
        "picard: retained singular values span over 14 decades; reduce the truncation order");
  const Eigen::VectorXd g = dipole_fourier_coeffs(DipoleProbe(z, d), spec.M);
  const Eigen::VectorXd c = spec.right.transpose() * g;
  double num = 0, den = 0;
  for (int k = 0; k < spec.M; ++k) {
    const double c2 = c(k) * c(k);
    num += c2 / spec.singular_value(k);
    den += c2;
  }
  if (den == 0)
    throw numeric_error("picard: probe is orthogonal to every retained singular vector");
  return num / den;
}

ReconstructionGrid indicator_field(const SpectralData& spec, const std::vector<Vec2>& points,
                                   int num_dipoles, double offset, double r_max, int threads) {
  if (!(r_max > 0) || r_max >= 1) throw input_error("indicator: r_max must lie in (0,1)");
  const auto dir = dipole_directions(num_dipoles, offset);
  ReconstructionGrid out;
  out.M = spec.M;
  out.num_dipoles = num_dipoles;
  out.r_max = r_max;
  for (const auto& z : points) {
    if (z.norm() <= r_max)
      out.disk_point.push_back(z);
    else
      out.excluded.push_back(z);
  }
  out.domain_point = out.disk_point;
  out.indicator.assign(out.disk_point.size(), 0.0);
  parallel_for(out.disk_point.size(), threads, [&](std::size_t i) {
    double sum = 0;
    for (const auto& d : dir) sum += picard_indicator(spec, out.disk_point[i], d);
    out.indicator[i] = sum / num_dipoles;
  });
  return out;
}

Reconstruction reconstruct(const NtdMatrix& lambda, const SchwarzChristoffelMap& map, int M,
                           int num_dipoles, const GridSpec& grid, std::vector<double> cutoffs,
                           double r_max, int threads) {
  if (grid.nx < 2 || grid.ny < 2) throw input_error("reconstruct: grid needs at least 2x2 samples");
  if (!(r_max > 0) || r_max >= 1) throw input_error("reconstruct: r_max must lie in (0,1)");
  const auto dir = dipole_directions(num_dipoles, 0.0);
  const auto spec = svd_ntd(lambda, M);
  if (!(spec.singular_value(0) > 0))
    throw numeric_error("reconstruct: zero spectrum, homogeneous data carries no inclusion");

  Vec2 lo, hi;
  if (grid.frame == GridFrame::domain) {
    lo = hi = map.polygon.vertices[0];
    for (const auto& v : map.polygon.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  } else {
    lo = Vec2(-1, -1);
    hi = Vec2(1, 1);
  }

  const int nx = grid.nx, ny = grid.ny;
  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  // Per-pixel state: 0 out of domain, 1 excluded (|z| > r_max), 2 evaluated.
  std::vector<int> state(total, 0);
  std::vector<Vec2> zB(total, Vec2::Zero()), yD(total, Vec2::Zero());
  std::vector<double> val(total, 0.0);
  parallel_for(total, threads, [&](std::size_t p) {
    const int r = static_cast<int>(p) / nx;
    const int c = static_cast<int>(p) % nx;
    const Vec2 pt(lo.x() + (hi.x() - lo.x()) * c / (nx - 1),
                  hi.y() - (hi.y() - lo.y()) * r / (ny - 1));
    if (grid.frame == GridFrame::domain) {
      if (!map.polygon.contains(pt)) return;
      yD[p] = pt;
      zB[p] = to_vec2(map.to_disk(pt));
    } else {
      if (pt.norm() > 1) return;
      zB[p] = pt;
    }
    if (zB[p].norm() > r_max) {
      state[p] = 1;
      return;
    }
    if (grid.frame == GridFrame::disk) yD[p] = map.from_disk(to_cplx(pt));
    double sum = 0;
    for (const auto& d : dir) sum += picard_indicator(spec, zB[p], d);
    val[p] = sum / num_dipoles;
    state[p] = 2;
  });

  Reconstruction out;
  auto& G = out.grid;
  G.M = M;
  G.num_dipoles = num_dipoles;
  G.r_max = r_max;
  G.nx = nx;
  G.ny = ny;
  G.lo = lo;
  G.hi = hi;
  G.pixel.assign(total, -1);
  for (std::size_t p = 0; p < total; ++p) {
    if (state[p] == 1) {
      G.excluded.push_back(zB[p]);
    } else if (state[p] == 2) {
      G.pixel[p] = static_cast<int>(G.disk_point.size());
      G.disk_point.push_back(zB[p]);
      G.domain_point.push_back(yD[p]);
      G.indicator.push_back(val[p]);
    }
  }
  if (G.indicator.empty())
    throw input_error("reconstruct: no grid point falls inside the evaluation radius");

  if (cutoffs.empty()) {
    const double p5 = quantile(G.indicator, 0.05);
    const double p95 = quantile(G.indicator, 0.95);
    for (int k = 0; k < 8; ++k)
      cutoffs.push_back(std::exp(std::log(p5) + (std::log(p95) - std::log(p5)) * k / 7.0));
  } else {
    for (const double c : cutoffs)
      if (!(c > 0) || !std::isfinite(c))
        throw input_error("reconstruct: cutoffs must be positive and finite");
    std::sort(cutoffs.begin(), cutoffs.end());
  }
  out.cutoff = cutoffs;
  out.level_set.resize(cutoffs.size());
  for (std::size_t k = 0; k < cutoffs.size(); ++k)
    for (std::size_t i = 0; i < G.indicator.size(); ++i)
      if (G.indicator[i] < cutoffs[k]) out.level_set[k].push_back(static_cast<int>(i));
  return out;
}

}  // namespace bisweep
