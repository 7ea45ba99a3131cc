#pragma once

#include <algorithm>

#include "lattgen/errors.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

enum class FieldMode { PerCell, Continuous };

inline const char* field_mode_name(FieldMode m) {
  return m == FieldMode::PerCell ? "per_cell" : "continuous";
}

// Rectilinear arrangement of unit cells; cell indices are 1-based.
struct CellGrid {
  int nx = 1, ny = 1, nz = 1;
  double u = 1.0;
  FieldMode mode = FieldMode::PerCell;
};

inline void validate_cell_grid(const CellGrid& g) {
  if (g.nx < 1 || g.ny < 1 || g.nz < 1)
    throw ParamError("cell counts must be at least 1 in every direction");
  if (!(g.u > 0.0)) throw ParamError("unit cell edge length must be positive");
}

inline int cell_count(const CellGrid& g) { return g.nx * g.ny * g.nz; }

inline int cell_linear_index(const CellGrid& g, int i, int j, int k) {
  return ((k - 1) * g.ny + (j - 1)) * g.nx + (i - 1);
}

// Normalized cell coordinates: 0 at the first cell, 1 at the last, 0 for a
// single cell along an axis.
inline Vec3 normalized_coords(const CellGrid& g, int i, int j, int k) {
  return {(double)(i - 1) / std::max(g.nx - 1, 1),
          (double)(j - 1) / std::max(g.ny - 1, 1),
          (double)(k - 1) / std::max(g.nz - 1, 1)};
}

}  // namespace lattgen
