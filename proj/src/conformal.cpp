#include "bisweep/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace bisweep {

namespace {

// Integration core: prevertices, exponents, and (borrowed) quadrature rules.
// Used both during the parameter solve and by the final map.
struct Core {
  const std::vector<cplx>& w;
  const std::vector<double>& e;
  const std::vector<JacobiRule>& corner;  // per-vertex, weight (1+t)^{e_k}
  const JacobiRule& smooth;
  int m;

  Core(const std::vector<cplx>& w_, const std::vector<double>& e_,
       const std::vector<JacobiRule>& corner_, const JacobiRule& smooth_)
      : w(w_), e(e_), corner(corner_), smooth(smooth_), m(static_cast<int>(w_.size())) {}

  // prod_{k != skip} (1 - zeta/w_k)^{e_k} via a log sum.
  cplx unit_derivative(cplx zeta, int skip = -1) const {
    cplx s = 0;
    for (int k = 0; k < m; ++k) {
      if (k == skip) continue;
      s += e[k] * std::log(1.0 - zeta / w[k]);
    }
    return std::exp(s);
  }

  // Single-rule integral of the unit derivative over the straight segment
  // [p, q]; sing >= 0 marks p as prevertex sing, whose factor is absorbed
  // into the Gauss-Jacobi weight: (1 - zeta/w_s) = -(q-p)(1+t)/(2 w_s).
  cplx rule_piece(cplx p, cplx q, int sing) const {
    const cplx half = 0.5 * (q - p);
    cplx acc = 0;
    if (sing >= 0) {
      const auto& rule = corner[sing];
      for (int i = 0; i < rule.nodes.size(); ++i) {
        const cplx zeta = p + half * (1.0 + rule.nodes(i));
        acc += rule.weights(i) * unit_derivative(zeta, sing);
      }
      return half * std::pow(-half / w[sing], e[sing]) * acc;
    }
    for (int i = 0; i < smooth.nodes.size(); ++i) {
      const cplx zeta = p + half * (1.0 + smooth.nodes(i));
      acc += smooth.weights(i) * unit_derivative(zeta);
    }
    return half * acc;
  }

  // Compound integral from a (possibly prevertex sing) to b along the chord,
  // subdividing by the one-half rule: each piece is no longer than half its
  // distance to the nearest foreign singularity.
  cplx cint(cplx a, cplx b, int sing) const {
    cplx total = 0;
    cplx cur = a;
    int cs = sing;
    const double eps = 1e-15 * std::abs(b - a);
    for (int iter = 0; iter < 80; ++iter) {
      const cplx rem = b - cur;
      const double remlen = std::abs(rem);
      if (remlen <= eps) return total;
      double R = std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k)
        if (k != cs) R = std::min(R, std::abs(w[k] - cur));
      if (remlen <= R) return total + rule_piece(cur, b, cs);
      const cplx next = cur + rem * (0.5 * R / remlen);
      total += rule_piece(cur, next, cs);
      cur = next;
      cs = -1;
    }
    return total + rule_piece(cur, b, cs);  // residual piece is negligibly short
  }

  // Integral over the chord between adjacent prevertices k and k+1 (side k).
  cplx side_integral(int k) const {
    const int k1 = (k + 1) % m;
    const cplx mid = 0.5 * (w[k] + w[k1]);
    return cint(w[k], mid, k) - cint(w[k1], mid, k1);
  }
};

std::vector<double> interior_exponents(const PolygonDomain& poly) {
  std::vector<double> e(poly.size());
  for (int k = 0; k < poly.size(); ++k) e[k] = poly.interior_angle[k] / pi - 1.0;
  return e;
}

std::vector<JacobiRule> make_corner_rules(const std::vector<double>& expo, int quad_nodes) {
  std::vector<JacobiRule> rules;
  rules.reserve(expo.size());
  for (double e : expo) rules.push_back(gauss_jacobi(quad_nodes, 0.0, e));
  return rules;
}

// Gap parameterization: prevertex angles are cumulative softmax gaps with the
// last angle pinned at 2pi (rotation is fixed; the remaining Moebius freedom
// stays in the system).
std::vector<cplx> prevertices_from_gaps(const Eigen::VectorXd& y) {
  const int m = static_cast<int>(y.size()) + 1;
  Eigen::VectorXd ex(m);
  for (int k = 0; k < m - 1; ++k) ex(k) = std::exp(std::clamp(y(k), -14.0, 14.0));
  ex(m - 1) = 1.0;
  const double total = ex.sum();
  std::vector<cplx> w(m);
  double beta = 0;
  for (int k = 0; k < m; ++k) {
    beta += 2 * pi * ex(k) / total;
    w[k] = std::polar(1.0, beta);  // w[m-1] pinned at angle 2pi
  }
  return w;
}

// Side-length-ratio residuals: log(lambda_k / lambda_ref) - log(L_k / L_ref).
Eigen::VectorXd side_residuals(const PolygonDomain& poly, const std::vector<double>& expo,
                               const std::vector<JacobiRule>& corner, const JacobiRule& smooth,
                               const Eigen::VectorXd& y) {
  const int m = poly.size();
  const std::vector<cplx> w = prevertices_from_gaps(y);
  Core core(w, expo, corner, smooth);
  Eigen::VectorXd lambda(m);
  for (int k = 0; k < m; ++k) lambda(k) = std::abs(core.side_integral(k));
  Eigen::VectorXd r(m - 1);
  for (int k = 0; k < m - 1; ++k)
    r(k) = std::log(lambda(k) / lambda(m - 1)) -
           std::log(poly.edge_length[k] / poly.edge_length[m - 1]);
  return r;
}

// Levenberg-Marquardt on the log-gap parameterization. The Moebius redundancy
// leaves the Jacobian rank-deficient by two; the damping absorbs that. The
// initial residual is checked before any Jacobian build, so near-regular
// polygons converge immediately from the equispaced guess.
Eigen::VectorXd solve_parameter_problem(const PolygonDomain& poly, const std::vector<double>& expo,
                                        const std::vector<JacobiRule>& corner,
                                        const JacobiRule& smooth, double tol,
                                        double* residual_out) {
  const int n = poly.size() - 1;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = side_residuals(poly, expo, corner, smooth, y);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  double lm = 1e-4;
  for (int iter = 0; iter < 80 && rnorm > tol; ++iter) {
    Eigen::MatrixXd J(n, n);
    const double h = 1e-7;
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd yj = y;
      yj(j) += h;
      J.col(j) = (side_residuals(poly, expo, corner, smooth, yj) - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    bool accepted = false;
    for (int attempt = 0; attempt < 24; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lm * (JtJ.diagonal().maxCoeff() + 1e-30);
      const Eigen::VectorXd step = A.ldlt().solve(Jtr);
      const Eigen::VectorXd ynew = y - step;
      const Eigen::VectorXd rnew = side_residuals(poly, expo, corner, smooth, ynew);
      const double rnnew = rnew.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rnnew) && rnnew < rnorm) {
        y = ynew;
        r = rnew;
        rnorm = rnnew;
        lm = std::max(lm / 3.0, 1e-14);
        accepted = true;
        break;
      }
      lm *= 8.0;
    }
    if (!accepted) break;
  }
  if (!(rnorm <= tol))
    throw nonconvergence_error("schwarz-christoffel parameter problem stalled at residual " +
                               std::to_string(rnorm));
  *residual_out = rnorm;
  return y;
}

struct InverseResult {
  cplx w;
  double err = std::numeric_limits<double>::infinity();
};

cplx clamp_disk(cplx w, double rmax = 1.0 - 1e-14) {
  const double r = std::abs(w);
  return (r > rmax) ? w * (rmax / r) : w;
}

// Shared state of the inverse iterations. feval anchors the integral at the
// centre or at the nearest prevertex, matching from_disk: near a corner the
// short Gauss-Jacobi leg is far more accurate than a long chord from the
// centre, and the reported inversion error must not be quadrature noise.
struct InverseContext {
  const Core& core;
  cplx C, A;
  const std::vector<Vec2>& verts;  // prevertex images

  cplx feval(cplx ww) const {
    int nearest = -1;
    double dmin = std::abs(ww);
    if (dmin > 0.7) {
      for (int k = 0; k < core.m; ++k) {
        const double d = std::abs(ww - core.w[k]);
        if (d < dmin) {
          dmin = d;
          nearest = k;
        }
      }
    }
    if (nearest < 0) return A + C * core.cint(0.0, ww, -1);
    return to_cplx(verts[nearest]) + C * core.cint(core.w[nearest], ww, nearest);
  }
};

// Newton refinement of f(w) = z from a given start, with step halving.
InverseResult newton_inverse(const InverseContext& ctx, const Vec2& z, cplx w0, double tol) {
  const Core& core = ctx.core;
  const cplx C = ctx.C;
  const cplx zt = to_cplx(z);
  cplx w = clamp_disk(w0);
  auto feval = [&](cplx ww) { return ctx.feval(ww); };
  cplx fw = feval(w);
  double err = std::abs(fw - zt);
  for (int it = 0; it < 40 && err > tol; ++it) {
    const cplx step = (fw - zt) / (C * core.unit_derivative(w));
    bool improved = false;
    double s = 1.0;
    for (int half = 0; half < 8; ++half, s *= 0.5) {
      const cplx wn = clamp_disk(w - s * step);
      const cplx fn = feval(wn);
      const double en = std::abs(fn - zt);
      if (en < err) {
        w = wn;
        fw = fn;
        err = en;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {w, err};
}

// Local inversion near a convex prevertex, where f' blows up and plain Newton
// stalls: with f - v_k ~ c (w - p_k)^alpha, iterate
//   w <- p_k + (w - p_k) ((z - v_k) / (f(w) - v_k))^{1/alpha}.
// The ratio form keeps both power arguments inside the corner sector (opening
// alpha pi < pi for convex corners), so the principal branch is the right one.
InverseResult corner_inverse(const InverseContext& ctx, const Vec2& z, cplx w0, double tol) {
  const Core& core = ctx.core;
  const cplx zt = to_cplx(z);
  // The relevant corner is the one whose image vertex the target is near;
  // nearness of the (possibly stalled) iterate is unreliable because the
  // prevertices of elongated corners crowd together.
  int k = -1;
  double dmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < core.m; ++j) {
    if (core.e[j] + 1.0 >= 1.0) continue;
    const double d = std::abs(zt - to_cplx(ctx.verts[j]));
    if (d < dmin) {
      dmin = d;
      k = j;
    }
  }
  if (k < 0) return {w0, std::numeric_limits<double>::infinity()};
  const double alpha = core.e[k] + 1.0;
  const cplx p = core.w[k];
  const cplx v = to_cplx(ctx.verts[k]);
  auto feval = [&](cplx ww) { return ctx.feval(ww); };
  cplx w = (std::abs(w0 - p) <= 0.15) ? clamp_disk(w0) : clamp_disk(p * (1.0 - 0.02));
  cplx fw = feval(w);
  double err = std::abs(fw - zt);
  for (int it = 0; it < 30 && err > tol; ++it) {
    const cplx u = w - p;
    if (std::abs(u) < 1e-16 || std::abs(fw - v) == 0) break;
    const cplx ratio = (zt - v) / (fw - v);
    bool improved = false;
    double s = 1.0;
    for (int half = 0; half < 4; ++half, s *= 0.5) {
      const cplx wn = clamp_disk(p + u * std::pow(ratio, s / alpha));
      const cplx fn = feval(wn);
      const double en = std::abs(fn - zt);
      if (en < err) {
        w = wn;
        fw = fn;
        err = en;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {w, err};
}

// Inverse by tracking f(w(t)) = f(0) + t (z - f(0)) with RK4, then Newton.
InverseResult invert_interior(const Core& core, cplx C, cplx A, const std::vector<Vec2>& verts,
                              const Vec2& z, double tol) {
  const InverseContext ctx{core, C, A, verts};
  const cplx zt = to_cplx(z);
  const cplx dz = zt - A;  // f(0) = A
  cplx w = 0;
  const int steps = 24;
  auto rhs = [&](cplx ww) { return dz / (C * core.unit_derivative(clamp_disk(ww))); };
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const cplx k1 = rhs(w);
    const cplx k2 = rhs(w + 0.5 * dt * k1);
    const cplx k3 = rhs(w + 0.5 * dt * k2);
    const cplx k4 = rhs(w + dt * k3);
    w = clamp_disk(w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  InverseResult best = newton_inverse(ctx, z, w, tol);
  if (best.err <= tol) return best;
  {
    const InverseResult c = corner_inverse(ctx, z, best.w, tol);
    if (c.err < best.err) best = c;
    if (best.err <= tol) return best;
  }
  // multi-start rescue on a coarse polar net
  std::vector<std::pair<double, cplx>> starts;
  for (double r : {0.2, 0.45, 0.7, 0.88, 0.97}) {
    for (int j = 0; j < 12; ++j) {
      const cplx ws = std::polar(r, 2 * pi * (j + 0.5 * (r > 0.5)) / 12);
      starts.emplace_back(std::abs(ctx.feval(ws) - zt), ws);
    }
  }
  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (int k = 0; k < 3 && k < static_cast<int>(starts.size()); ++k) {
    const InverseResult r = newton_inverse(ctx, z, starts[k].second, tol);
    if (r.err < best.err) best = r;
    if (best.err <= tol) break;
  }
  if (best.err > tol) {
    const InverseResult c = corner_inverse(ctx, z, best.w, tol);
    if (c.err < best.err) best = c;
  }
  return best;
}

}  // namespace

cplx SchwarzChristoffelMap::derivative(cplx w) const {
  const Core core(prevertex, exponent, corner_rule, smooth_rule);
  return scale * core.unit_derivative(w);
}

Vec2 SchwarzChristoffelMap::from_disk(cplx w) const {
  const double r = std::abs(w);
  if (r > 1.0 + 1e-12) throw input_error("from_disk: point outside the closed unit disk");
  if (r > 1.0) w /= r;
  const Core core(prevertex, exponent, corner_rule, smooth_rule);
  // Anchor the integral at 0 or at the nearest prevertex, whichever is closer.
  int nearest = -1;
  double dmin = std::abs(w);
  if (dmin > 0.7) {
    for (int k = 0; k < core.m; ++k) {
      const double d = std::abs(w - prevertex[k]);
      if (d < dmin) {
        dmin = d;
        nearest = k;
      }
    }
  }
  cplx val;
  if (nearest < 0)
    val = to_cplx(center) + scale * core.cint(0.0, w, -1);
  else
    val = to_cplx(polygon.vertices[nearest]) + scale * core.cint(prevertex[nearest], w, nearest);
  return to_vec2(val);
}

cplx SchwarzChristoffelMap::to_disk(const Vec2& z) const {
  if (!polygon.contains(z)) throw input_error("to_disk: point outside the closed domain");
  const double scale_len = std::max(1.0, polygon.diameter);
  if (polygon.boundary_distance(z) <= 1e-10 * scale_len)
    return boundary_to_disk(polygon.project_to_boundary(z));
  const Core core(prevertex, exponent, corner_rule, smooth_rule);
  const double tol = 1e-11 * scale_len;
  const InverseResult r = invert_interior(core, scale, to_cplx(center), polygon.vertices, z, tol);
  if (r.err > 1e-8 * scale_len)
    throw numeric_error("to_disk: inverse iteration failed to reach tolerance");
  return r.w;
}

BoundaryPoint SchwarzChristoffelMap::boundary_from_disk(double theta) const {
  const int m = polygon.size();
  // Locate the arc [beta_k, beta_k + gap_k) containing theta (cyclically).
  int k = -1;
  double local = 0, gap = 0;
  for (int i = 0; i < m; ++i) {
    const double b0 = prevertex_angle[i];
    double g = prevertex_angle[(i + 1) % m] - b0;
    if (g <= 0) g += 2 * pi;
    double d = std::fmod(theta - b0, 2 * pi);
    if (d < 0) d += 2 * pi;
    if (d < g) {
      k = i;
      local = d;
      gap = g;
      break;
    }
  }
  if (k < 0) throw numeric_error("boundary_from_disk: arc lookup failed");
  const int k1 = (k + 1) % m;
  const double atol = 1e-13;
  BoundaryPoint bp;
  if (local <= atol) {
    bp.s = polygon.vertex_arclen[k];
    bp.xy = polygon.vertices[k];
    return bp;
  }
  if (gap - local <= atol) {
    bp.s = polygon.vertex_arclen[k1];
    bp.xy = polygon.vertices[k1];
    return bp;
  }
  const Core core(prevertex, exponent, corner_rule, smooth_rule);
  const cplx w = std::polar(1.0, theta);
  cplx z;
  if (local <= 0.5 * gap)
    z = to_cplx(polygon.vertices[k]) + scale * core.cint(prevertex[k], w, k);
  else
    z = to_cplx(polygon.vertices[k1]) + scale * core.cint(prevertex[k1], w, k1);
  // Project onto edge k; the integral keeps the point on that line to within
  // quadrature error.
  const Vec2 a = polygon.vertices[k];
  const Vec2 edge = polygon.vertices[k1] - a;
  const double t = std::clamp((to_vec2(z) - a).dot(edge) / edge.squaredNorm(), 0.0, 1.0);
  bp.xy = a + t * edge;
  bp.s = polygon.vertex_arclen[k] + t * polygon.edge_length[k];
  if (bp.s >= polygon.perimeter) bp.s -= polygon.perimeter;
  return bp;
}

cplx SchwarzChristoffelMap::boundary_to_disk(const BoundaryPoint& p) const {
  const int m = polygon.size();
  double s = std::fmod(p.s, polygon.perimeter);
  if (s < 0) s += polygon.perimeter;
  int k = m - 1;
  for (int i = 0; i < m; ++i)
    if (s < polygon.vertex_arclen[i] + polygon.edge_length[i]) {
      k = i;
      break;
    }
  const double delta = s - polygon.vertex_arclen[k];
  const double L = polygon.edge_length[k];
  const double stol = 1e-12 * std::max(1.0, polygon.perimeter);
  if (delta <= stol) return prevertex[k];
  if (L - delta <= stol) return prevertex[(k + 1) % m];
  const Core core(prevertex, exponent, corner_rule, smooth_rule);
  const cplx vk = to_cplx(polygon.vertices[k]);
  double lo = prevertex_angle[k];
  double gap = prevertex_angle[(k + 1) % m] - lo;
  if (gap <= 0) gap += 2 * pi;
  double hi = lo + gap;
  // |f(e^{i t}) - v_k| grows monotonically from 0 to L along the arc.
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const cplx z = vk + scale * core.cint(prevertex[k], std::polar(1.0, mid), k);
    if (std::abs(z - vk) < delta)
      lo = mid;
    else
      hi = mid;
  }
  return std::polar(1.0, 0.5 * (lo + hi));
}

SchwarzChristoffelMap build_map(const PolygonDomain& polygon, const Vec2& center,
                                const BoundaryPoint& anchor, int quad_nodes) {
  if (quad_nodes < 4) throw input_error("build_map: need at least 4 quadrature nodes");
  if (!polygon.contains(center) ||
      polygon.boundary_distance(center) < 1e-6 * std::max(1.0, polygon.diameter))
    throw input_error("build_map: normalization center must lie strictly inside the domain");
  const int m = polygon.size();
  const std::vector<double> expo = interior_exponents(polygon);
  const std::vector<JacobiRule> corner = make_corner_rules(expo, quad_nodes);
  const JacobiRule smooth = gauss_legendre(quad_nodes);

  double residual = 0;
  const Eigen::VectorXd y =
      solve_parameter_problem(polygon, expo, corner, smooth, 1e-10, &residual);
  const std::vector<cplx> w0 = prevertices_from_gaps(y);
  const Core core0(w0, expo, corner, smooth);

  // Unnormalized constants from side 0 and vertex 0: f0(w) = A0 + C0 J(w).
  const cplx I0 = core0.side_integral(0);
  const cplx C0 = (to_cplx(polygon.vertices[1]) - to_cplx(polygon.vertices[0])) / I0;
  const cplx A0 = to_cplx(polygon.vertices[0]) + C0 * core0.cint(w0[0], 0.0, 0);

  // Preimages of the normalization data under the unnormalized map.
  const double scale_len = std::max(1.0, polygon.diameter);
  const InverseResult wc = invert_interior(core0, C0, A0, polygon.vertices, center, 1e-12 * scale_len);
  if (wc.err > 1e-8 * scale_len)
    throw nonconvergence_error("build_map: failed to invert the normalization center");
  cplx wa;
  {
    SchwarzChristoffelMap tmp;  // provisional wrapper for the boundary search
    tmp.polygon = polygon;
    tmp.prevertex = w0;
    tmp.exponent = expo;
    tmp.scale = C0;
    tmp.center = to_vec2(A0);
    tmp.quad_nodes = quad_nodes;
    tmp.corner_rule = corner;
    tmp.smooth_rule = smooth;
    tmp.prevertex_angle.resize(m);
    for (int k = 0; k < m; ++k) {
      double a = std::arg(w0[k]);
      if (a < 0) a += 2 * pi;
      tmp.prevertex_angle[k] = a;
    }
    wa = tmp.boundary_to_disk(anchor);
  }

  // Disk automorphism with 0 -> wc and wa -> 1, folded into the prevertices.
  cplx omega = (wa - wc.w) / (1.0 - wa * std::conj(wc.w));
  omega /= std::abs(omega);
  std::vector<cplx> wv(m);
  for (int k = 0; k < m; ++k) {
    const cplx v = (w0[k] - wc.w) / (omega * (1.0 - std::conj(wc.w) * w0[k]));
    wv[k] = v / std::abs(v);
  }

  SchwarzChristoffelMap map;
  map.polygon = polygon;
  map.prevertex = wv;
  map.exponent = expo;
  map.center = center;
  map.anchor_arclen = anchor.s;
  map.quad_nodes = quad_nodes;
  map.param_residual = residual;
  map.corner_rule = corner;
  map.smooth_rule = smooth;
  map.prevertex_angle.resize(m);
  for (int k = 0; k < m; ++k) {
    double a = std::arg(wv[k]);
    if (a < 0) a += 2 * pi;
    if (2 * pi - a < 1e-12) a = 0;
    map.prevertex_angle[k] = a;
  }

  // Refit the scale from side 0 with the normalized prevertices; f(0) = center
  // holds by construction.
  const Core core(wv, expo, corner, smooth);
  const cplx I0n = core.side_integral(0);
  map.scale = (to_cplx(polygon.vertices[1]) - to_cplx(polygon.vertices[0])) / I0n;
  // The forward map must reproduce every vertex. Integrate from the singular
  // end so the corner rule absorbs the prevertex factor.
  for (int k = 0; k < m; ++k) {
    const cplx fk = to_cplx(center) - map.scale * core.cint(wv[k], 0.0, k);
    if (std::abs(fk - to_cplx(polygon.vertices[k])) > 1e-8 * scale_len)
      throw nonconvergence_error("build_map: vertex reproduction check failed at vertex " +
                                 std::to_string(k));
  }
  return map;
}

SchwarzChristoffelMap build_map(const PolygonDomain& polygon, int quad_nodes) {
  return build_map(polygon, polygon.centroid(), polygon.point_at(0.0), quad_nodes);
}

Electrodes electrode_positions(const SchwarzChristoffelMap& map, int n, double offset) {
  if (n < 2) throw input_error("electrode_positions: need at least 2 electrodes");
  Electrodes el;
  el.position.resize(n);
  el.theta.resize(n);
  for (int j = 0; j < n; ++j) {
    el.theta[j] = offset + 2 * pi * j / n;
    el.position[j] = map.boundary_from_disk(el.theta[j]);
  }
  return el;
}

void save_map(const SchwarzChristoffelMap& map, const std::string& path) {
  nlohmann::json j;
  j["format"] = "sc-map-cache-v1";
  j["quad_nodes"] = map.quad_nodes;
  j["param_residual"] = map.param_residual;
  j["center"] = {map.center.x(), map.center.y()};
  j["anchor_arclen"] = map.anchor_arclen;
  j["scale"] = {map.scale.real(), map.scale.imag()};
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (const auto& v : map.polygon.vertices) verts.push_back({v.x(), v.y()});
  j["prevertex_angle"] = map.prevertex_angle;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw input_error("save_map: cannot open " + path);
  out << j.dump(2) << "\n";
}

std::optional<SchwarzChristoffelMap> load_map(const std::string& path,
                                              const PolygonDomain& polygon, const Vec2& center,
                                              const BoundaryPoint& anchor, int quad_nodes) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  try {
    if (j.at("format") != "sc-map-cache-v1") return std::nullopt;
    if (j.at("quad_nodes").get<int>() != quad_nodes) return std::nullopt;
    const auto verts = j.at("vertices");
    if (static_cast<int>(verts.size()) != polygon.size()) return std::nullopt;
    for (int k = 0; k < polygon.size(); ++k) {
      if (verts[k][0].get<double>() != polygon.vertices[k].x() ||
          verts[k][1].get<double>() != polygon.vertices[k].y())
        return std::nullopt;
    }
    if (j.at("center")[0].get<double>() != center.x() ||
        j.at("center")[1].get<double>() != center.y())
      return std::nullopt;
    if (j.at("anchor_arclen").get<double>() != anchor.s) return std::nullopt;

    SchwarzChristoffelMap map;
    map.polygon = polygon;
    map.center = center;
    map.anchor_arclen = anchor.s;
    map.quad_nodes = quad_nodes;
    map.param_residual = j.at("param_residual").get<double>();
    map.scale = cplx(j.at("scale")[0].get<double>(), j.at("scale")[1].get<double>());
    map.prevertex_angle = j.at("prevertex_angle").get<std::vector<double>>();
    if (static_cast<int>(map.prevertex_angle.size()) != polygon.size()) return std::nullopt;
    map.exponent = interior_exponents(polygon);
    map.prevertex.resize(polygon.size());
    for (int k = 0; k < polygon.size(); ++k)
      map.prevertex[k] = std::polar(1.0, map.prevertex_angle[k]);
    map.corner_rule = make_corner_rules(map.exponent, quad_nodes);
    map.smooth_rule = gauss_legendre(quad_nodes);
    return map;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace bisweep
