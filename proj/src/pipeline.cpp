#include "bisweep/pipeline.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "bisweep/disk_greens.hpp"

namespace bisweep {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 1.0) / 9007199254740993.0;
}

// One standard normal from the (seed, key) counter stream; deterministic and
// order-independent across entries.
double normal_at(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t state = seed ^ (key * 0xD1B54A32D192ED03ull);
  const double u1 = uniform01(state);
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * pi * u2);
}

double uniform_at(std::uint64_t seed, std::uint64_t key, int draw) {
  std::uint64_t state = seed ^ (key * 0xD1B54A32D192ED03ull);
  double v = 0;
  for (int k = 0; k <= draw; ++k) v = uniform01(state);
  return v;
}

}  // namespace

NtdMatrix bisweep_to_ntd(const BisweepMatrix& s, int M) {
  if (s.n < 2 || s.entries.rows() != s.n || s.entries.cols() != s.n)
    throw input_error("ntd conversion: malformed bisweep matrix");
  if (M < 1 || M > s.n - 1) throw input_error("ntd conversion: order must be in [1, n-1]");
  if (static_cast<int>(s.theta.size()) != s.n)
    throw input_error("ntd conversion: missing electrode angles");
  Eigen::MatrixXd B(M, s.n);
  for (int i = 1; i <= M; ++i)
    for (int l = 0; l < s.n; ++l) B(i - 1, l) = trig_basis(i, s.theta[l]);
  NtdMatrix out;
  out.M = M;
  const double scale = 4 * pi * pi / (static_cast<double>(s.n) * s.n);
  out.entries = -0.5 * scale * (B * s.entries * B.transpose());
  // lambda is symmetric by construction whenever the input is; symmetrize to
  // keep roundoff from leaking into downstream spectral code.
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  return out;
}

BisweepMatrix ntd_to_bisweep(const NtdMatrix& lambda, const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  if (n < 1) throw input_error("series synthesis: no evaluation points");
  if (lambda.entries.rows() != lambda.M || lambda.entries.cols() != lambda.M)
    throw input_error("series synthesis: malformed NtD matrix");
  Eigen::MatrixXd B(lambda.M, n);
  for (int i = 1; i <= lambda.M; ++i)
    for (int l = 0; l < n; ++l) B(i - 1, l) = trig_basis(i, theta[l]);
  // sigma(x,y) = p(x,x) - 2 p(x,y) + p(y,y) with p = B^T lambda B.
  const Eigen::MatrixXd P = B.transpose() * lambda.entries * B;
  BisweepMatrix out;
  out.n = n;
  out.theta = theta;
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.entries(i, i) = 0;
    for (int j = i + 1; j < n; ++j) {
      const double v = P(i, i) - P(i, j) - P(j, i) + P(j, j);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  out.electrode.reserve(n);
  for (int l = 0; l < n; ++l)
    out.electrode.push_back({theta[l], Vec2(std::cos(theta[l]), std::sin(theta[l]))});
  return out;
}

BisweepMatrix general_to_bisweep(const Eigen::MatrixXd& m, const Eigen::MatrixXd& alpha,
                                 const Eigen::MatrixXd& beta) {
  const int n = static_cast<int>(alpha.cols());
  if (beta.cols() != n || alpha.rows() != n - 1 || beta.rows() != n - 1 ||
      m.rows() != n - 1 || m.cols() != n - 1)
    throw input_error("pattern inversion: dimensions must be (n-1) x n patterns with (n-1)^2 data");
  for (int r = 0; r < n - 1; ++r) {
    const double arow = alpha.row(r).cwiseAbs().maxCoeff();
    const double brow = beta.row(r).cwiseAbs().maxCoeff();
    if (std::abs(alpha.row(r).sum()) > 1e-9 * std::max(1.0, arow) ||
        std::abs(beta.row(r).sum()) > 1e-9 * std::max(1.0, brow))
      throw input_error("pattern inversion: patterns must be mean-free");
  }
  const auto pinv = [](const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-12 * sv(0))
      throw numeric_error("pattern inversion: rank-deficient pattern matrix");
    return Eigen::MatrixXd(svd.solve(Eigen::MatrixXd::Identity(A.rows(), A.rows())));
  };
  // m = -alpha sigma beta^T / 2, so pinv(alpha) (-2m) pinv(beta^T) recovers
  // P sigma P; restoring the zero diagonal fixes the rank-one ambiguity.
  const Eigen::MatrixXd s0 = pinv(alpha) * (-2.0 * m) * pinv(beta).transpose();
  const Eigen::MatrixXd sym = 0.5 * (s0 + s0.transpose());
  const Eigen::VectorXd c = -0.5 * sym.diagonal();
  BisweepMatrix out;
  out.n = n;
  out.entries = sym + c * Eigen::RowVectorXd::Ones(n) + Eigen::VectorXd::Ones(n) * c.transpose();
  out.entries.diagonal().setZero();
  return out;
}

Eigen::VectorXd sweep_restriction(const BisweepMatrix& s, int fixed_index) {
  if (fixed_index < 0 || fixed_index >= s.n) throw input_error("sweep: electrode out of range");
  return s.entries.row(fixed_index).transpose();
}

std::vector<double> sweep_restriction(
    const std::function<double(const BoundaryPoint&, const BoundaryPoint&)>& pair_value,
    const BoundaryPoint& fixed, const std::vector<BoundaryPoint>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& p : samples)
    out.push_back((p.xy - fixed.xy).norm() == 0 ? 0.0 : pair_value(fixed, p));
  return out;
}

BisweepMatrix add_noise(const BisweepMatrix& s, double level, std::uint64_t seed) {
  if (level < 0) throw input_error("noise level must be nonnegative");
  if (level == 0) return s;
  BisweepMatrix out = s;
  const double std_dev = level * s.entries.cwiseAbs().maxCoeff();
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j) {
      const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
      const double noisy = s.entries(i, j) + std_dev * normal_at(seed, key);
      out.entries(i, j) = noisy;
      out.entries(j, i) = noisy;
    }
  return out;
}

std::vector<BoundaryPoint> PerturbedGeometry::displace(
    const std::vector<BoundaryPoint>& electrodes) const {
  std::vector<BoundaryPoint> out;
  out.reserve(electrodes.size());
  const double amp = magnitude * phantom.domain.diameter;
  for (std::size_t j = 0; j < electrodes.size(); ++j) {
    const BoundaryPoint closest = phantom.domain.project_to_boundary(electrodes[j].xy);
    const double jitter =
        amp * (2 * uniform_at(seed, 0xE1EC7B0DEull + j, 0) - 1);
    out.push_back(phantom.domain.point_at(closest.s + jitter));
  }
  return out;
}

PerturbedGeometry perturb_geometry(const Phantom& phantom, double magnitude, std::uint64_t seed) {
  if (magnitude < 0) throw input_error("perturbation magnitude must be nonnegative");
  if (magnitude == 0) return {phantom, 0.0, seed};
  const double amp = magnitude * phantom.domain.diameter;
  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    const std::uint64_t s = seed + attempt;
    std::vector<Vec2> verts = phantom.domain.vertices;
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const double r = amp * std::sqrt(uniform_at(s, k, 0));
      const double a = 2 * pi * uniform_at(s, k, 1);
      verts[k] += r * Vec2(std::cos(a), std::sin(a));
    }
    try {
      auto dom = PolygonDomain::from_vertices(std::move(verts));
      auto perturbed = Phantom::create(std::move(dom), phantom.inclusions);
      return {std::move(perturbed), magnitude, s};
    } catch (const input_error&) {
      continue;
    }
  }
  throw nonconvergence_error("geometry perturbation kept breaking admissibility after 10 seeds");
}

}  // namespace bisweep
