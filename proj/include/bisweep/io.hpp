#pragma once

// File formats: plain-text polygons, JSON phantom documents, bisweep/NtD
// CSV matrices, sweep-profile CSV, reconstruction CSV, and PGM images.
// Every writer goes through an atomic temp-file-then-rename step.

#include <string>
#include <vector>

#include "bisweep/factorization.hpp"
#include "bisweep/geometry.hpp"
#include "bisweep/pipeline.hpp"

namespace bisweep {

// Writes content to path atomically (temp file in the same directory, then
// rename), creating parent directories as needed.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Polygon file: one "x y" line per CCW vertex; '#' starts a comment.
PolygonDomain load_polygon(const std::string& path);
void save_polygon(const PolygonDomain& polygon, const std::string& path);

// Phantom document:
//   { "vertices": [[x,y], ...],
//     "inclusions": [ {"type":"disk","center":[x,y],"radius":r,"kappa":k}
//                   | {"type":"polygon","vertices":[[x,y],...],"kappa":k} ] }
Phantom parse_phantom(const std::string& json_text);
Phantom load_phantom(const std::string& path);
void save_phantom(const Phantom& phantom, const std::string& path);

// Bisweep CSV: first line "n", then n rows of n comma-separated reals. The
// loader restores the equispaced-angle electrode convention, checks symmetry
// and the zero diagonal to 1e-9 of the largest entry, and then enforces both
// exactly.
void save_bisweep(const BisweepMatrix& s, const std::string& path);
BisweepMatrix load_bisweep(const std::string& path);

// NtD CSV: first line "M", then M rows of M comma-separated reals.
void save_ntd(const NtdMatrix& lambda, const std::string& path);
NtdMatrix load_ntd(const std::string& path);

// Sweep profiles: header "series,theta,value", one row per sample.
struct SweepSeries {
  std::string label;
  std::vector<double> theta;
  std::vector<double> value;
};
void save_sweep(const std::vector<SweepSeries>& series, const std::string& path);
std::vector<SweepSeries> load_sweep(const std::string& path);

// Reconstruction CSV: header "x_D,y_D,x_B,y_B,Ind", one row per evaluated
// grid point.
void save_reconstruction_csv(const ReconstructionGrid& grid, const std::string& path);

// Plain PGM (P2) over the raster: one gray level per cutoff bucket (darker =
// smaller Ind), out-of-domain and excluded pixels white. Requires raster
// metadata (grid.nx > 0).
void save_reconstruction_pgm(const Reconstruction& rec, const std::string& path);

}  // namespace bisweep
