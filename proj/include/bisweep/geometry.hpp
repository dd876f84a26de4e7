#pragma once

// Polygonal domains, inclusion phantoms, and the piecewise-constant
// conductivity they induce.

#include <optional>
#include <vector>

#include "bisweep/types.hpp"

namespace bisweep {

struct BoundaryPoint {
  double s = 0;  // arc length from vertex 0, in [0, perimeter)
  Vec2 xy = Vec2::Zero();
};

struct PolygonDomain {
  std::vector<Vec2> vertices;  // CCW, simple, no three consecutive collinear
  std::vector<double> edge_length;      // edge k: vertices[k] -> vertices[k+1 mod m]
  std::vector<double> vertex_arclen;    // cumulative arc length at vertex k
  std::vector<double> interior_angle;   // radians, strictly in (0, 2*pi)
  double perimeter = 0;
  double area = 0;
  double diameter = 0;

  static PolygonDomain from_vertices(std::vector<Vec2> v);

  int size() const { return static_cast<int>(vertices.size()); }
  Vec2 centroid() const;
  bool contains(const Vec2& p) const;          // closed region; boundary counts inside
  double boundary_distance(const Vec2& p) const;
  BoundaryPoint point_at(double s) const;      // s taken mod perimeter
  BoundaryPoint project_to_boundary(const Vec2& p) const;
};

struct Inclusion {
  enum class Shape { disk, polygon };
  Shape shape = Shape::disk;
  Vec2 center = Vec2::Zero();  // disk only
  double radius = 0;           // disk only
  std::vector<Vec2> vertices;  // polygon only, CCW simple
  double kappa = 0.5;          // contrast, in (0,1) or (1,inf)

  static Inclusion disk(const Vec2& center, double radius, double kappa);
  static Inclusion polygon(std::vector<Vec2> vertices, double kappa);

  bool contains(const Vec2& p) const;  // closed: boundary resolves to inclusion
  double boundary_distance(const Vec2& p) const;
  // Chordal approximation of the boundary with sagitta <= max_sag (disks);
  // polygons return their vertices unchanged.
  std::vector<Vec2> polygonize(double max_sag) const;
};

struct Phantom {
  PolygonDomain domain;
  std::vector<Inclusion> inclusions;

  // Validates admissibility: each inclusion strictly inside the domain,
  // pairwise disjoint closures, and clearance() >= min_clearance_frac * diameter.
  static Phantom create(PolygonDomain domain, std::vector<Inclusion> inclusions,
                        double min_clearance_frac = 0.05);

  // Smallest gap between any inclusion boundary and the domain boundary or
  // another inclusion. +infinity when there are no inclusions.
  double clearance() const;
  double evaluate_sigma(const Vec2& p) const;  // throws input_error outside the domain
};

// Segment utilities shared by the mesh generator.
double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p);
double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace bisweep
