#pragma once

#include <cmath>
#include <utility>

#include "lattgen/errors.hpp"
#include "lattgen/grid.hpp"
#include "lattgen/topology.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

// Wraps the rectilinear cell grid around the z axis: the x index becomes the
// radial direction (starting at inner_radius), the y index the angular one
// (ny cells cover the full turn), z stays axial.
struct CylindricalMap {
  double inner_radius = 1.0;
};

inline CylindricalMap cylindrical_map(double inner_radius) {
  if (!(inner_radius > 0.0)) throw ParamError("cylindrical inner radius must be positive");
  return CylindricalMap{inner_radius};
}

inline void validate_conformal_grid(const CellGrid& g) {
  if (g.ny < 3)
    throw ParamError("cylindrical lattices need at least 3 angular cells to close the ring");
}

constexpr double kTwoPi = 6.28318530717958647692;

inline Vec3 conformal_map_point(const CylindricalMap& m, const CellGrid& g, int i, int j, int k,
                                Vec3 local) {
  double rho = m.inner_radius + ((i - 1) + local.x / g.u) * g.u;
  double phi = kTwoPi * ((j - 1) + local.y / g.u) / g.ny;
  double z = ((k - 1) + local.z / g.u) * g.u;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

// Maps a unit-cell graph into world coordinates; edges stay straight chords.
inline SkeletalGraph map_graph(const SkeletalGraph& graph, int i, int j, int k,
                               const CylindricalMap& m, const CellGrid& g) {
  validate_conformal_grid(g);
  SkeletalGraph out = graph;
  for (auto& v : out.vertices) v = conformal_map_point(m, g, i, j, k, v);
  return out;
}

/// Normalized radial/angular bindings for parameter expressions: rho is 0 at
// the innermost ring and 1 at the outermost, phi is (j-1)/ny in [0, 1).
inline std::pair<double, double> conformal_bindings(int i, int j, const CellGrid& g) {
  double rho = (double)(i - 1) / std::max(g.nx - 1, 1);
  double phi = (double)(j - 1) / g.ny;
  return {rho, phi};
}

// Containing cell of a world point (1-based indices, clamped radially and
// axially; angle wraps).
inline void conformal_cell_of(const CylindricalMap& m, const CellGrid& g, Vec3 w, int* i, int* j,
                              int* k) {
  double rho = std::sqrt(w.x * w.x + w.y * w.y);
  double phi = std::atan2(w.y, w.x);
  if (phi < 0.0) phi += kTwoPi;
  int ci = (int)std::floor((rho - m.inner_radius) / g.u);
  int cj = (int)std::floor(phi * g.ny / kTwoPi);
  int ck = (int)std::floor(w.z / g.u);
  *i = std::clamp(ci, 0, g.nx - 1) + 1;
  *j = std::clamp(cj, 0, g.ny - 1) + 1;
  *k = std::clamp(ck, 0, g.nz - 1) + 1;
}

}  // namespace lattgen
