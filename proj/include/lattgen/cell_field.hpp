#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lattgen/errors.hpp"
#include "lattgen/profile.hpp"
#include "lattgen/topology.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

// A solid is any real field over R^3: >= 0 inside, < 0 outside, 0 on the surface.
using ImplicitSolid = std::function<double(Vec3)>;

// Union (max) of profile extrusions along graph edges and node spheres.
struct BeamCellSolid {
  struct EdgePrim {
    Vec3 a;
    Vec3 axis;  // unit
    double len = 0.0;
    Vec3 n1, n2;  // transverse frame
  };
  struct NodePrim {
    Vec3 c;
    double radius = 0.0;
  };

  std::vector<EdgePrim> edges;
  std::vector<NodePrim> nodes;
  Profile profile;
  double node_radius = 0.0;

  // Edge inclusion: profile on the transverse coordinates intersected with the
  // axial slab, so caps are flat and the value is negative beyond the ends.
  double eval_with(const Profile& prof, double nodeRadius, Vec3 p) const {
    double best = -1e300;
    for (const auto& e : edges) {
      Vec3 d = p - e.a;
      double s = dot(d, e.axis);
      double axial = std::fmin(s, e.len - s);
      double v = std::fmin(profile_inside(prof, dot(d, e.n1), dot(d, e.n2)), axial);
      best = std::fmax(best, v);
    }
    for (const auto& n : nodes) best = std::fmax(best, nodeRadius - distance(p, n.c));
    return best;
  }

  double eval(Vec3 p) const { return eval_with(profile, node_radius, p); }

  // Farthest the solid can reach beyond the graph's vertices/edges.
  double reach() const { return std::fmax(profile_bound(profile), node_radius); }
};

// Profile with cross-section dimensions taken from a beam diameter.
inline Profile profile_from_diameter(ProfileKind kind, double diameter, double fillet_ratio) {
  switch (kind) {
    case ProfileKind::Circle:
      return circle_profile(diameter / 2.0);
    case ProfileKind::Square:
      return square_profile(diameter);
    case ProfileKind::RoundedSquare:
      return rounded_square_profile(diameter, fillet_ratio * diameter / 2.0);
  }
  throw ParamError("unknown profile kind");
}

inline BeamCellSolid beam_cell_field(const SkeletalGraph& g, double beam_diameter,
                                     double node_scale, double fillet_ratio,
                                     ProfileKind profile) {
  if (!(beam_diameter > 0.0)) throw ParamError("beam diameter must be positive");
  if (!(node_scale > 0.0)) throw ParamError("node scale must be positive");
  BeamCellSolid out;
  out.profile = profile_from_diameter(profile, beam_diameter, fillet_ratio);
  out.node_radius = node_scale * beam_diameter / 2.0;
  out.edges.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    BeamCellSolid::EdgePrim prim;
    prim.a = g.vertices[e.a];
    Vec3 d = g.vertices[e.b] - prim.a;
    prim.len = norm(d);
    prim.axis = d / prim.len;
    double ax = std::fabs(prim.axis.x), ay = std::fabs(prim.axis.y), az = std::fabs(prim.axis.z);
    Vec3 ref = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    prim.n1 = normalized(cross(prim.axis, ref));
    prim.n2 = cross(prim.axis, prim.n1);
    out.edges.push_back(prim);
  }
  out.nodes.reserve(g.node_vertices.size());
  for (int idx : g.node_vertices) out.nodes.push_back({g.vertices[idx], out.node_radius});
  return out;
}

// Shell of half-width t/2 around the zero level set, using the gradient-
// normalized field value as a first-order distance.
struct TpmsShell {
  TpmsSurface surface;
  double thickness = 0.0;
  double h = 0.0;  // finite-difference step

  double eval_with(double t, Vec3 p) const {
    double f = tpms_value(surface, p);
    double gx = tpms_value(surface, {p.x + h, p.y, p.z}) - tpms_value(surface, {p.x - h, p.y, p.z});
    double gy = tpms_value(surface, {p.x, p.y + h, p.z}) - tpms_value(surface, {p.x, p.y - h, p.z});
    double gz = tpms_value(surface, {p.x, p.y, p.z + h}) - tpms_value(surface, {p.x, p.y, p.z - h});
    double g = std::sqrt(gx * gx + gy * gy + gz * gz) / (2.0 * h);
    if (g < 1e-12) return t / 2.0 - std::fabs(f);
    return t / 2.0 - std::fabs(f) / g;
  }

  double eval(Vec3 p) const { return eval_with(thickness, p); }
};

inline TpmsShell tpms_cell_field(const TpmsSurface& s, double thickness) {
  if (!(thickness > 0.0)) throw ParamError("shell thickness must be positive");
  if (!(thickness < s.u / 2.0))
    throw ParamError("shell thickness must stay below half the unit cell edge");
  return TpmsShell{s, thickness, s.u * 1e-4};
}

}  // namespace lattgen
