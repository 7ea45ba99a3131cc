#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lattgen/errors.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

// Skeletal unit-cell graph in [0,u]^3. node_vertices lists the vertices that
// carry spherical nodes when the graph is thickened (all of them by default).
struct SkeletalGraph {
  double u = 1.0;
  std::vector<Vec3> vertices;
  struct Edge {
    int a = 0, b = 0;
  };
  std::vector<Edge> edges;
  std::vector<int> node_vertices;
};

enum class BeamTopologyId {
  Cubic,
  Bcc,
  Fcc,
  SFcc,
  Bccz,
  Fccz,
  SFccz,
  Fbcc,
  SFbcc,
  SFbccz,
  Diamond,
  Rhombicuboctahedron,
  TruncatedCube,
};

inline const char* beam_topology_name(BeamTopologyId id) {
  switch (id) {
    case BeamTopologyId::Cubic: return "cubic";
    case BeamTopologyId::Bcc: return "bcc";
    case BeamTopologyId::Fcc: return "fcc";
    case BeamTopologyId::SFcc: return "s_fcc";
    case BeamTopologyId::Bccz: return "bccz";
    case BeamTopologyId::Fccz: return "fccz";
    case BeamTopologyId::SFccz: return "s_fccz";
    case BeamTopologyId::Fbcc: return "fbcc";
    case BeamTopologyId::SFbcc: return "s_fbcc";
    case BeamTopologyId::SFbccz: return "s_fbccz";
    case BeamTopologyId::Diamond: return "diamond";
    case BeamTopologyId::Rhombicuboctahedron: return "rhombicuboctahedron";
    case BeamTopologyId::TruncatedCube: return "truncated_cube";
  }
  return "?";
}

inline std::vector<BeamTopologyId> all_beam_topologies() {
  return {BeamTopologyId::Cubic,   BeamTopologyId::Bcc,     BeamTopologyId::Fcc,
          BeamTopologyId::SFcc,    BeamTopologyId::Bccz,    BeamTopologyId::Fccz,
          BeamTopologyId::SFccz,   BeamTopologyId::Fbcc,    BeamTopologyId::SFbcc,
          BeamTopologyId::SFbccz,  BeamTopologyId::Diamond,
          BeamTopologyId::Rhombicuboctahedron, BeamTopologyId::TruncatedCube};
}

inline std::optional<BeamTopologyId> beam_topology_from_name(std::string_view name) {
  for (BeamTopologyId id : all_beam_topologies())
    if (name == beam_topology_name(id)) return id;
  return std::nullopt;
}

inline bool beam_topology_truncatable(BeamTopologyId id) {
  return id == BeamTopologyId::Rhombicuboctahedron || id == BeamTopologyId::TruncatedCube;
}

namespace detail {

// Accumulates raw segments, then welds vertices, drops degenerate segments,
// deduplicates coincident edges, and splits segments that cross away from
// their endpoints (crossing beams must share a graph vertex so the graph's
// cycle rank matches the thickened solid's genus).
class GraphBuilder {
 public:
  explicit GraphBuilder(double u) : u_(u), tol_(u * 1e-9) {}

  void segment(Vec3 a, Vec3 b) { segs_.push_back({a, b}); }

  SkeletalGraph build() {
    split_crossings();
    SkeletalGraph g;
    g.u = u_;
    std::set<std::pair<int, int>> edge_set;
    for (const auto& s : segs_) {
      if (distance(s.a, s.b) <= tol_) continue;
      int ia = weld(g, s.a);
      int ib = weld(g, s.b);
      if (ia == ib) continue;
      auto key = std::minmax(ia, ib);
      if (edge_set.insert({key.first, key.second}).second)
        g.edges.push_back({key.first, key.second});
    }
    g.node_vertices.resize(g.vertices.size());
    for (std::size_t i = 0; i < g.vertices.size(); ++i) g.node_vertices[i] = (int)i;
    return g;
  }

 private:
  struct Seg {
    Vec3 a, b;
  };

  double u_, tol_;
  std::vector<Seg> segs_;

  int weld(SkeletalGraph& g, Vec3 p) const {
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
      if (distance(g.vertices[i], p) <= tol_) return (int)i;
    g.vertices.push_back(p);
    return (int)g.vertices.size() - 1;
  }

  void split_crossings() {
    std::vector<std::vector<double>> cuts(segs_.size());
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      for (std::size_t j = i + 1; j < segs_.size(); ++j) {
        Vec3 dA = segs_[i].b - segs_[i].a;
        Vec3 dB = segs_[j].b - segs_[j].a;
        Vec3 r = segs_[i].a - segs_[j].a;
        double A = dot(dA, dA), B = dot(dA, dB), C = dot(dB, dB);
        double D = dot(dA, r), E = dot(dB, r);
        double den = A * C - B * B;
        if (den <= 1e-12 * A * C) continue;  // parallel
        double s = (B * E - C * D) / den;
        double t = (A * E - B * D) / den;
        if (s < -1e-9 || s > 1.0 + 1e-9 || t < -1e-9 || t > 1.0 + 1e-9) continue;
        Vec3 pa = segs_[i].a + s * dA;
        Vec3 pb = segs_[j].a + t * dB;
        if (distance(pa, pb) > tol_) continue;
        double pe = 1e-7;
        if (s > pe && s < 1.0 - pe) cuts[i].push_back(s);
        if (t > pe && t < 1.0 - pe) cuts[j].push_back(t);
      }
    }
    std::vector<Seg> out;
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      auto& c = cuts[i];
      if (c.empty()) {
        out.push_back(segs_[i]);
        continue;
      }
      c.push_back(0.0);
      c.push_back(1.0);
      std::sort(c.begin(), c.end());
      Vec3 d = segs_[i].b - segs_[i].a;
      for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        if (c[k + 1] - c[k] < 1e-9) continue;
        out.push_back({segs_[i].a + c[k] * d, segs_[i].a + c[k + 1] * d});
      }
    }
    segs_ = std::move(out);
  }
};

inline void add_cube_frame(GraphBuilder& g, double u) {
  for (double a : {0.0, u})
    for (double b : {0.0, u}) {
      g.segment({0, a, b}, {u, a, b});
      g.segment({a, 0, b}, {a, u, b});
      g.segment({a, b, 0}, {a, b, u});
    }
}

inline void add_body_diagonals(GraphBuilder& g, double u) {
  Vec3 c{u / 2, u / 2, u / 2};
  for (double x : {0.0, u})
    for (double y : {0.0, u})
      for (double z : {0.0, u}) g.segment({x, y, z}, c);
}

inline void add_side_face_diagonals(GraphBuilder& g, double u) {
  for (double c : {0.0, u}) {
    g.segment({c, 0, 0}, {c, u, u});
    g.segment({c, 0, u}, {c, u, 0});
    g.segment({0, c, 0}, {u, c, u});
    g.segment({0, c, u}, {u, c, 0});
  }
}

inline void add_top_bottom_diagonals(GraphBuilder& g, double u) {
  for (double c : {0.0, u}) {
    g.segment({0, 0, c}, {u, u, c});
    g.segment({u, 0, c}, {0, u, c});
  }
}

inline void add_vertical_edges(GraphBuilder& g, double u) {
  for (double x : {0.0, u})
    for (double y : {0.0, u}) g.segment({x, y, 0}, {x, y, u});
}

inline void add_diamond(GraphBuilder& g, double u) {
  auto p = [u](double x, double y, double z) { return Vec3{x * u, y * u, z * u}; };
  // four z-slabs of tetrahedral bonds
  g.segment(p(1, 0, 0), p(.75, .25, .25));
  g.segment(p(.5, .5, 0), p(.75, .25, .25));
  g.segment(p(.5, .5, 0), p(.25, .75, .25));
  g.segment(p(0, 1, 0), p(.25, .75, .25));

  g.segment(p(.75, .25, .25), p(.5, 0, .5));
  g.segment(p(.75, .25, .25), p(1, .5, .5));
  g.segment(p(.25, .75, .25), p(.5, 1, .5));
  g.segment(p(.25, .75, .25), p(0, .5, .5));

  g.segment(p(.5, 0, .5), p(.25, .25, .75));
  g.segment(p(0, .5, .5), p(.25, .25, .75));
  g.segment(p(1, .5, .5), p(.75, .75, .75));
  g.segment(p(.5, 1, .5), p(.75, .75, .75));

  g.segment(p(.25, .25, .75), p(0, 0, 1));
  g.segment(p(.25, .25, .75), p(.5, .5, 1));
  g.segment(p(.75, .75, .75), p(.5, .5, 1));
  g.segment(p(.75, .75, .75), p(1, 1, 1));
}

inline void add_rhombicuboctahedron(GraphBuilder& g, double u, double t) {
  // corner triangles: near each cube corner, one vertex per adjacent face
  for (double cx : {0.0, u})
    for (double cy : {0.0, u})
      for (double cz : {0.0, u}) {
        double sx = cx == 0.0 ? 1.0 : -1.0;
        double sy = cy == 0.0 ? 1.0 : -1.0;
        double sz = cz == 0.0 ? 1.0 : -1.0;
        Vec3 vx{cx, cy + sy * t, cz + sz * t};
        Vec3 vy{cx + sx * t, cy, cz + sz * t};
        Vec3 vz{cx + sx * t, cy + sy * t, cz};
        g.segment(vx, vy);
        g.segment(vy, vz);
        g.segment(vz, vx);
      }
  // central squares on every face
  for (double c : {0.0, u}) {
    g.segment({c, t, t}, {c, u - t, t});
    g.segment({c, u - t, t}, {c, u - t, u - t});
    g.segment({c, u - t, u - t}, {c, t, u - t});
    g.segment({c, t, u - t}, {c, t, t});

    g.segment({t, c, t}, {u - t, c, t});
    g.segment({u - t, c, t}, {u - t, c, u - t});
    g.segment({u - t, c, u - t}, {t, c, u - t});
    g.segment({t, c, u - t}, {t, c, t});

    g.segment({t, t, c}, {u - t, t, c});
    g.segment({u - t, t, c}, {u - t, u - t, c});
    g.segment({u - t, u - t, c}, {t, u - t, c});
    g.segment({t, u - t, c}, {t, t, c});
  }
}

inline void add_truncated_cube(GraphBuilder& g, double u, double t) {
  // corner triangles: one vertex on each cube edge incident to the corner
  for (double cx : {0.0, u})
    for (double cy : {0.0, u})
      for (double cz : {0.0, u}) {
        double sx = cx == 0.0 ? 1.0 : -1.0;
        double sy = cy == 0.0 ? 1.0 : -1.0;
        double sz = cz == 0.0 ? 1.0 : -1.0;
        Vec3 px{cx + sx * t, cy, cz};
        Vec3 py{cx, cy + sy * t, cz};
        Vec3 pz{cx, cy, cz + sz * t};
        g.segment(px, py);
        g.segment(py, pz);
        g.segment(pz, px);
      }
  // remaining middle pieces of the original cube edges
  for (double a : {0.0, u})
    for (double b : {0.0, u}) {
      g.segment({t, a, b}, {u - t, a, b});
      g.segment({a, t, b}, {a, u - t, b});
      g.segment({a, b, t}, {a, b, u - t});
    }
}

}  // namespace detail

inline SkeletalGraph beam_topology(BeamTopologyId id, double u = 1.0,
                                   std::optional<double> trunc = std::nullopt) {
  if (!(u > 0.0)) throw ParamError("unit cell edge length must be positive");
  if (beam_topology_truncatable(id)) {
    if (!trunc)
      throw ParamError(std::string("topology '") + beam_topology_name(id) +
                       "' requires a trunc parameter");
    if (!(*trunc >= 0.0 && *trunc <= 0.5))
      throw ParamError("trunc must lie in [0, 0.5]");
  } else if (trunc) {
    throw ParamError(std::string("topology '") + beam_topology_name(id) +
                     "' does not take a trunc parameter");
  }

  detail::GraphBuilder g(u);
  switch (id) {
    case BeamTopologyId::Cubic:
      detail::add_cube_frame(g, u);
      break;
    case BeamTopologyId::Bcc:
      detail::add_body_diagonals(g, u);
      break;
    case BeamTopologyId::Fcc:
      detail::add_side_face_diagonals(g, u);
      detail::add_top_bottom_diagonals(g, u);
      break;
    case BeamTopologyId::SFcc:
      detail::add_side_face_diagonals(g, u);
      break;
    case BeamTopologyId::Bccz:
      detail::add_body_diagonals(g, u);
      detail::add_vertical_edges(g, u);
      break;
    case BeamTopologyId::Fccz:
      detail::add_side_face_diagonals(g, u);
      detail::add_top_bottom_diagonals(g, u);
      detail::add_vertical_edges(g, u);
      break;
    case BeamTopologyId::SFccz:
      detail::add_side_face_diagonals(g, u);
      detail::add_vertical_edges(g, u);
      break;
    case BeamTopologyId::Fbcc:
      detail::add_body_diagonals(g, u);
      detail::add_side_face_diagonals(g, u);
      detail::add_top_bottom_diagonals(g, u);
      break;
    case BeamTopologyId::SFbcc:
      detail::add_body_diagonals(g, u);
      detail::add_side_face_diagonals(g, u);
      break;
    case BeamTopologyId::SFbccz:
      detail::add_body_diagonals(g, u);
      detail::add_side_face_diagonals(g, u);
      detail::add_vertical_edges(g, u);
      break;
    case BeamTopologyId::Diamond:
      detail::add_diamond(g, u);
      break;
    case BeamTopologyId::Rhombicuboctahedron:
      detail::add_rhombicuboctahedron(g, u, *trunc * u);
      break;
    case BeamTopologyId::TruncatedCube:
      detail::add_truncated_cube(g, u, *trunc * u);
      break;
  }
  return g.build();
}

// Cycle rank E - V + C; equals the genus of the thickened solid's surface.
inline int graph_cycle_rank(const SkeletalGraph& g) {
  int n = (int)g.vertices.size();
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  int components = n;
  for (const auto& e : g.edges) {
    int ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return (int)g.edges.size() - n + components;
}

// --- triply periodic minimal surfaces ---

enum class TpmsId { Gyroid, SchwarzP, SchwarzD };

inline const char* tpms_name(TpmsId id) {
  switch (id) {
    case TpmsId::Gyroid: return "gyroid";
    case TpmsId::SchwarzP: return "schwarz_p";
    case TpmsId::SchwarzD: return "schwarz_d";
  }
  return "?";
}

inline std::vector<TpmsId> all_tpms() {
  return {TpmsId::Gyroid, TpmsId::SchwarzP, TpmsId::SchwarzD};
}

inline std::optional<TpmsId> tpms_from_name(std::string_view name) {
  for (TpmsId id : all_tpms())
    if (name == tpms_name(id)) return id;
  return std::nullopt;
}

struct TpmsSurface {
  TpmsId id = TpmsId::Gyroid;
  double u = 1.0;
};

inline TpmsSurface tpms_topology(TpmsId id, double u) {
  if (!(u > 0.0)) throw ParamError("unit cell edge length must be positive");
  return TpmsSurface{id, u};
}

// Level-set function with period u along every axis.
inline double tpms_value(const TpmsSurface& s, Vec3 p) {
  double k = 2.0 * 3.14159265358979323846 / s.u;
  double x = k * p.x, y = k * p.y, z = k * p.z;
  switch (s.id) {
    case TpmsId::Gyroid:
      return std::sin(x) * std::cos(y) + std::sin(y) * std::cos(z) + std::sin(z) * std::cos(x);
    case TpmsId::SchwarzP:
      return std::cos(x) + std::cos(y) + std::cos(z);
    case TpmsId::SchwarzD:
      return std::cos(x) * std::cos(y) * std::cos(z) - std::sin(x) * std::sin(y) * std::sin(z);
  }
  return 0.0;
}

// --- solid torus primitive (z-axis symmetric, centred at the origin) ---

struct Torus {
  double major = 2.0;  // R
  double minor = 0.5;  // r
};

inline Torus torus_primitive(double major, double minor) {
  if (!(major > minor && minor > 0.0))
    throw ParamError("torus requires major radius > minor radius > 0");
  return Torus{major, minor};
}

inline double torus_inside(const Torus& t, Vec3 p) {
  double q = std::sqrt(p.x * p.x + p.y * p.y) - t.major;
  return t.minor * t.minor - q * q - p.z * p.z;
}

}  // namespace lattgen
