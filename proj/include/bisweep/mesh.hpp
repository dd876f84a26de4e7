#pragma once

// Conforming constrained-Delaunay mesh generation on inclusion phantoms:
// Bowyer-Watson insertion with quality refinement, Triangle-format files,
// and uniform red refinement for convergence studies.

#include <array>
#include <string>
#include <vector>

#include "bisweep/geometry.hpp"
#include "bisweep/types.hpp"

namespace bisweep {

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW node triples
  std::vector<int> node_boundary;             // 1 when the node lies on the outer boundary
  std::vector<int> tri_region;                // -1 background, otherwise inclusion index
  double min_angle_threshold = 20.0;          // degrees, the generation target

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double signed_area(int t) const;
  double triangle_min_angle(int t) const;  // degrees
  double max_edge_length() const;
  double min_angle() const;  // degrees, over all triangles
};

// Meshes the phantom's domain with every inclusion boundary embedded as
// constrained edges (disks polygonized with sagitta <= h^2/8), then refines
// until all angles are >= min_angle_deg and all edges are <= h.
Mesh generate_mesh(const Phantom& phantom, double h, double min_angle_deg = 20.0);

// Checks positive areas, shared-edge conformity, and the angle threshold.
void validate_mesh(const Mesh& mesh, double min_angle_deg);

// Triangle-format files: ".node" holds "count 2 0 1" then "index x y marker",
// ".ele" holds "count 3 0" then "index a b c"; written 1-indexed, and either
// 0- or 1-indexed accepted on read (detected from the first record).
void save_mesh(const Mesh& mesh, const std::string& node_path, const std::string& ele_path);
Mesh load_mesh(const std::string& node_path, const std::string& ele_path, const Phantom& phantom,
               double min_angle_deg = 20.0);

// Splits every triangle into four via edge midpoints; preserves angles,
// region labels, and boundary conformity exactly.
Mesh refine_uniform(const Mesh& mesh);

}  // namespace bisweep
