#include "bisweep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bisweep {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double shoelace_area(const std::vector<Vec2>& v) {
  double a = 0;
  const int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i) a += cross2(v[i], v[(i + 1) % m]);
  return 0.5 * a;
}

// Winding-number membership for a closed simple polygon; points within tol of
// an edge count as inside.
bool polygon_contains(const std::vector<Vec2>& v, const Vec2& p, double tol) {
  const int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i)
    if (segment_distance(v[i], v[(i + 1) % m], p) <= tol) return true;
  int winding = 0;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % m];
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && cross2(b - a, p - a) > 0) ++winding;
    } else {
      if (b.y() <= p.y() && cross2(b - a, p - a) < 0) --winding;
    }
  }
  return winding != 0;
}

double polygon_boundary_distance(const std::vector<Vec2>& v, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i)
    d = std::min(d, segment_distance(v[i], v[(i + 1) % m], p));
  return d;
}

void validate_simple_ccw(const std::vector<Vec2>& v, const char* what) {
  const int m = static_cast<int>(v.size());
  if (m < 3) throw input_error(std::string(what) + ": needs at least 3 vertices");
  double scale = 0;
  for (const auto& p : v) scale = std::max(scale, p.norm());
  const double tol = 1e-12 * std::max(1.0, scale);
  for (int i = 0; i < m; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % m];
    const Vec2& c = v[(i + 2) % m];
    if ((b - a).norm() <= tol)
      throw input_error(std::string(what) + ": duplicate consecutive vertices");
    if (std::abs(cross2(b - a, c - b)) <= tol * (b - a).norm() * (c - b).norm())
      throw input_error(std::string(what) + ": three consecutive vertices are collinear");
  }
  if (shoelace_area(v) <= 0)
    throw input_error(std::string(what) + ": vertices must be in CCW order");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (j == i || (j + 1) % m == i || (i + 1) % m == j) continue;  // adjacent share a vertex
      if (segments_properly_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]))
        throw input_error(std::string(what) + ": polygon is not simple (edges cross)");
    }
}

}  // namespace

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double x = cross2(q - p, r - p);
    const double eps = 1e-14 * ((q - p).norm() * (r - p).norm() + 1e-300);
    return (x > eps) - (x < -eps);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return segment_distance(p, q, r) <= 1e-12 * ((q - p).norm() + 1.0);
  };
  // Collinear overlap beyond a shared endpoint also breaks simplicity.
  if (o1 == 0 && on_segment(a, b, c) && (c - a).norm() > 1e-12 && (c - b).norm() > 1e-12) return true;
  if (o2 == 0 && on_segment(a, b, d) && (d - a).norm() > 1e-12 && (d - b).norm() > 1e-12) return true;
  if (o3 == 0 && on_segment(c, d, a) && (a - c).norm() > 1e-12 && (a - d).norm() > 1e-12) return true;
  if (o4 == 0 && on_segment(c, d, b) && (b - c).norm() > 1e-12 && (b - d).norm() > 1e-12) return true;
  return false;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_properly_intersect(a, b, c, d)) return 0;
  return std::min(std::min(segment_distance(a, b, c), segment_distance(a, b, d)),
                  std::min(segment_distance(c, d, a), segment_distance(c, d, b)));
}

PolygonDomain PolygonDomain::from_vertices(std::vector<Vec2> v) {
  validate_simple_ccw(v, "domain polygon");
  PolygonDomain d;
  d.vertices = std::move(v);
  const int m = d.size();
  d.edge_length.resize(m);
  d.vertex_arclen.resize(m);
  d.interior_angle.resize(m);
  double s = 0;
  for (int i = 0; i < m; ++i) {
    d.vertex_arclen[i] = s;
    d.edge_length[i] = (d.vertices[(i + 1) % m] - d.vertices[i]).norm();
    s += d.edge_length[i];
  }
  d.perimeter = s;
  d.area = shoelace_area(d.vertices);
  for (int i = 0; i < m; ++i) {
    const Vec2 u = d.vertices[(i + m - 1) % m] - d.vertices[i];
    const Vec2 w = d.vertices[(i + 1) % m] - d.vertices[i];
    double ang = std::atan2(cross2(w, u), w.dot(u));  // CCW polygon: interior on the left
    if (ang < 0) ang += 2 * pi;
    d.interior_angle[i] = ang;
    if (ang <= 1e-9 || ang >= 2 * pi - 1e-9)
      throw input_error("domain polygon: degenerate interior angle at vertex " + std::to_string(i));
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      d.diameter = std::max(d.diameter, (d.vertices[i] - d.vertices[j]).norm());
  return d;
}

Vec2 PolygonDomain::centroid() const {
  Vec2 c = Vec2::Zero();
  const int m = size();
  for (int i = 0; i < m; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % m];
    c += cross2(a, b) * (a + b);
  }
  return c / (6.0 * area);
}

bool PolygonDomain::contains(const Vec2& p) const {
  return polygon_contains(vertices, p, 1e-12 * std::max(1.0, diameter));
}

double PolygonDomain::boundary_distance(const Vec2& p) const {
  return polygon_boundary_distance(vertices, p);
}

BoundaryPoint PolygonDomain::point_at(double s) const {
  s = std::fmod(s, perimeter);
  if (s < 0) s += perimeter;
  const int m = size();
  int k = m - 1;
  for (int i = 0; i < m; ++i)
    if (s < vertex_arclen[i] + edge_length[i]) { k = i; break; }
  const double t = (s - vertex_arclen[k]) / edge_length[k];
  BoundaryPoint bp;
  bp.s = s;
  bp.xy = vertices[k] + t * (vertices[(k + 1) % m] - vertices[k]);
  return bp;
}

BoundaryPoint PolygonDomain::project_to_boundary(const Vec2& p) const {
  const int m = size();
  double best = std::numeric_limits<double>::infinity();
  BoundaryPoint bp;
  for (int i = 0; i < m; ++i) {
    const Vec2& a = vertices[i];
    const Vec2 ab = vertices[(i + 1) % m] - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Vec2 q = a + t * ab;
    const double d = (p - q).norm();
    if (d < best) {
      best = d;
      bp.xy = q;
      bp.s = vertex_arclen[i] + t * edge_length[i];
    }
  }
  if (bp.s >= perimeter) bp.s -= perimeter;
  return bp;
}

Inclusion Inclusion::disk(const Vec2& center, double radius, double kappa) {
  if (radius <= 0) throw input_error("inclusion disk: radius must be positive");
  if (kappa <= 0 || kappa == 1)
    throw input_error("inclusion: contrast must be positive and != 1");
  Inclusion inc;
  inc.shape = Shape::disk;
  inc.center = center;
  inc.radius = radius;
  inc.kappa = kappa;
  return inc;
}

Inclusion Inclusion::polygon(std::vector<Vec2> vertices, double kappa) {
  if (kappa <= 0 || kappa == 1)
    throw input_error("inclusion: contrast must be positive and != 1");
  validate_simple_ccw(vertices, "inclusion polygon");
  Inclusion inc;
  inc.shape = Shape::polygon;
  inc.vertices = std::move(vertices);
  inc.kappa = kappa;
  return inc;
}

bool Inclusion::contains(const Vec2& p) const {
  if (shape == Shape::disk) return (p - center).norm() <= radius + 1e-12;
  double scale = 0;
  for (const auto& q : vertices) scale = std::max(scale, q.norm());
  return polygon_contains(vertices, p, 1e-12 * std::max(1.0, scale));
}

double Inclusion::boundary_distance(const Vec2& p) const {
  if (shape == Shape::disk) return std::abs((p - center).norm() - radius);
  return polygon_boundary_distance(vertices, p);
}

std::vector<Vec2> Inclusion::polygonize(double max_sag) const {
  if (shape == Shape::polygon) return vertices;
  // Chord over angle dt has sagitta r*(1-cos(dt/2)) <= r*dt^2/8.
  const double dt = 2 * std::sqrt(2 * std::max(max_sag, 1e-9) / radius);
  int n = std::max(12, static_cast<int>(std::ceil(2 * pi / dt)));
  std::vector<Vec2> v(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2 * pi * i / n;
    v[i] = center + radius * Vec2(std::cos(a), std::sin(a));
  }
  return v;
}

namespace {

// Boundary-to-boundary gap between two inclusions; <= 0 means the closures
// touch, overlap, or nest.
double inclusion_gap(const Inclusion& a, const Inclusion& b) {
  if (a.shape == Inclusion::Shape::disk && b.shape == Inclusion::Shape::disk)
    return (a.center - b.center).norm() - a.radius - b.radius;
  if (a.shape == Inclusion::Shape::disk) {
    const auto& v = b.vertices;
    double d = polygon_boundary_distance(v, a.center);
    if (polygon_contains(v, a.center, 0) || b.contains(a.center)) return -1;
    return d - a.radius;
  }
  if (b.shape == Inclusion::Shape::disk) return inclusion_gap(b, a);
  const auto& va = a.vertices;
  const auto& vb = b.vertices;
  if (a.contains(vb[0]) || b.contains(va[0])) return -1;
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j)
      d = std::min(d, segment_segment_distance(va[i], va[(i + 1) % va.size()],
                                               vb[j], vb[(j + 1) % vb.size()]));
  return d;
}

// Gap between an inclusion boundary and the domain boundary; requires the
// inclusion strictly inside.
double domain_gap(const PolygonDomain& dom, const Inclusion& inc) {
  if (inc.shape == Inclusion::Shape::disk) {
    if (!dom.contains(inc.center)) return -1;
    return dom.boundary_distance(inc.center) - inc.radius;
  }
  const auto& v = inc.vertices;
  for (const auto& p : v)
    if (!dom.contains(p)) return -1;
  double d = std::numeric_limits<double>::infinity();
  const auto& dv = dom.vertices;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < dv.size(); ++j)
      d = std::min(d, segment_segment_distance(v[i], v[(i + 1) % v.size()],
                                               dv[j], dv[(j + 1) % dv.size()]));
  // Edges not crossing does not rule out the inclusion lying outside a notch;
  // vertex membership above covers that for simple polygons.
  return d;
}

}  // namespace

double Phantom::clearance() const {
  double c = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < inclusions.size(); ++i) {
    c = std::min(c, domain_gap(domain, inclusions[i]));
    for (size_t j = i + 1; j < inclusions.size(); ++j)
      c = std::min(c, inclusion_gap(inclusions[i], inclusions[j]));
  }
  return c;
}

Phantom Phantom::create(PolygonDomain domain, std::vector<Inclusion> inclusions,
                        double min_clearance_frac) {
  Phantom ph;
  ph.domain = std::move(domain);
  ph.inclusions = std::move(inclusions);
  const double c = ph.clearance();
  if (c <= 0) throw input_error("phantom: inclusions must be disjoint and strictly inside the domain");
  const double need = min_clearance_frac * ph.domain.diameter;
  if (c < need)
    throw input_error("phantom: clearance " + std::to_string(c) + " below required minimum " +
                      std::to_string(need));
  return ph;
}

double Phantom::evaluate_sigma(const Vec2& p) const {
  if (!domain.contains(p)) throw input_error("evaluate_sigma: point outside the domain");
  for (const auto& inc : inclusions)
    if (inc.contains(p)) return inc.kappa;
  return 1.0;
}

}  // namespace bisweep
