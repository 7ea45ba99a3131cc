#include "lattgen/mesher.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace lattgen;

namespace {

constexpr double kPi = 3.14159265358979323846;

ParameterField params(std::initializer_list<std::pair<const char*, const char*>> kv) {
  ParameterField pf;
  for (const auto& [key, text] : kv) set_parameter(pf, key, parse_expression(text));
  return pf;
}

SampleGrid cube_grid(Vec3 lo, double edge, int n) {
  SampleGrid g;
  g.origin = lo;
  g.h = edge / n;
  g.nx = g.ny = g.nz = n;
  return g;
}

std::vector<Vec3> sorted_vertices(const TriangleMesh& m) {
  std::vector<Vec3> v = m.vertices;
  std::sort(v.begin(), v.end(), [](Vec3 a, Vec3 b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  });
  return v;
}

}  // namespace

TEST(Polygonize, SphereVolumeEulerAndOrientation) {
  // poles (0,0,+-1) land exactly on grid samples, exercising the F=0 rule
  auto f = [](Vec3 p) { return 1.0 - norm(p); };
  TriangleMesh mesh = polygonize(f, cube_grid({-2, -2, -2}, 4.0, 64));
  MeshReport r = mesh_diagnostics(mesh);
  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.euler_characteristic, 2);
  EXPECT_EQ(r.genus, 0);
  EXPECT_EQ(r.components, 1);
  EXPECT_GT(r.volume, 0.0);
  EXPECT_NEAR(r.volume, 4.0 * kPi / 3.0, 0.01 * 4.0 * kPi / 3.0);
}

TEST(Polygonize, NoDuplicateVerticesWithinWeldEps) {
  auto f = [](Vec3 p) { return 1.0 - norm(p); };
  SampleGrid g = cube_grid({-2, -2, -2}, 4.0, 64);
  TriangleMesh mesh = polygonize(f, g);
  auto remap = detail_mesh::positional_weld(mesh.vertices, g.h * 1e-6);
  for (std::size_t i = 0; i < remap.size(); ++i) EXPECT_EQ(remap[i], (int)i);
}

TEST(Polygonize, TorusGenusOne) {
  Torus t = torus_primitive(2.0, 0.5);
  auto f = [&](Vec3 p) { return torus_inside(t, p); };
  SampleGrid g = make_sample_grid({{-2.5, -2.5, -0.5}, {2.5, 2.5, 0.5}}, 0.0, 5.0 / 64);
  MeshReport r = mesh_diagnostics(polygonize(f, g));
  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.euler_characteristic, 0);
  EXPECT_EQ(r.genus, 1);
  double expected = 2.0 * kPi * kPi * 2.0 * 0.5 * 0.5;  // 2 pi^2 R r^2
  EXPECT_NEAR(r.volume, expected, 0.02 * expected);
}

TEST(Polygonize, EmptyFieldYieldsEmptyMesh) {
  auto f = [](Vec3) { return -1.0; };
  TriangleMesh mesh = polygonize(f, cube_grid({0, 0, 0}, 1.0, 8));
  EXPECT_TRUE(mesh.empty());
  MeshReport r = mesh_diagnostics(mesh);
  EXPECT_FALSE(r.watertight);
  EXPECT_EQ(r.triangle_count, 0);
}

TEST(Polygonize, NonFiniteFieldRejected) {
  auto f = [](Vec3 p) { return p.x > 0.5 ? std::nan("") : 1.0; };
  EXPECT_THROW(polygonize(f, cube_grid({0, 0, 0}, 1.0, 8)), MeshError);
}

TEST(Polygonize, ChunkedMatchesSingleChunk) {
  auto f = [](Vec3 p) { return 1.0 - norm(p); };
  SampleGrid g = cube_grid({-2, -2, -2}, 4.0, 48);
  TriangleMesh whole = polygonize(f, g);
  TriangleMesh chunked = polygonize_chunked(f, g, 16, 3);
  MeshReport a = mesh_diagnostics(whole), b = mesh_diagnostics(chunked);
  EXPECT_EQ(a.vertex_count, b.vertex_count);
  EXPECT_EQ(a.triangle_count, b.triangle_count);
  EXPECT_EQ(a.euler_characteristic, b.euler_characteristic);
  EXPECT_NEAR(a.volume, b.volume, 1e-12 * std::fabs(a.volume));
  auto va = sorted_vertices(whole), vb = sorted_vertices(chunked);
  ASSERT_EQ(va.size(), vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    EXPECT_EQ(va[i].x, vb[i].x);
    EXPECT_EQ(va[i].y, vb[i].y);
    EXPECT_EQ(va[i].z, vb[i].z);
  }
}

TEST(Diagnostics, TetrahedronAndOpenTriangle) {
  TriangleMesh tet;
  tet.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  tet.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  MeshReport r = mesh_diagnostics(tet);
  EXPECT_EQ(r.vertex_count, 4);
  EXPECT_EQ(r.edge_count, 6);
  EXPECT_EQ(r.triangle_count, 4);
  EXPECT_EQ(r.euler_characteristic, 2);
  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.genus, 0);
  EXPECT_NEAR(r.volume, 1.0 / 6.0, 1e-15);

  TriangleMesh open;
  open.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  open.triangles = {{0, 1, 2}};
  MeshReport o = mesh_diagnostics(open);
  EXPECT_FALSE(o.watertight);
  EXPECT_EQ(o.boundary_edges, 3);
  EXPECT_EQ(o.nonmanifold_edges, 0);
  EXPECT_EQ(o.genus, -1);
}

TEST(Diagnostics, NonManifoldEdgeCounted) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, -1, 0}};
  m.triangles = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  MeshReport r = mesh_diagnostics(m);
  EXPECT_EQ(r.nonmanifold_edges, 1);
  EXPECT_FALSE(r.watertight);
}

TEST(Mesher, CylinderVolumeConvergence) {
  SkeletalGraph g;
  g.u = 10.0;
  g.vertices = {{0, 0, 0}, {10, 0, 0}};
  g.edges = {{0, 1}};
  BeamCellSolid solid = beam_cell_field(g, 2.0, 1.1, 0.0, ProfileKind::Circle);
  auto field = [&](Vec3 p) { return solid.eval(p); };
  double target = 10.0 * kPi;
  auto volume_at = [&](int r) {
    SampleGrid sg = make_sample_grid({{0, -1, -1}, {10, 1, 1}}, 0.3, 10.0 / r);
    MeshReport rep = mesh_diagnostics(polygonize(field, sg));
    EXPECT_TRUE(rep.watertight) << "r=" << r;
    return std::fabs(rep.volume - target) / target;
  };
  double e32 = volume_at(32);
  double e64 = volume_at(64);
  EXPECT_LT(e32, 0.05);
  EXPECT_LT(e64, 0.75 * e32);
}

TEST(Mesher, TpmsShellGradientFallback) {
  TpmsShell shell = tpms_cell_field(tpms_topology(TpmsId::SchwarzP, 2.0 * kPi), 0.2);
  EXPECT_DOUBLE_EQ(shell.eval({0, 0, 0}), 0.1 - 3.0);
  EXPECT_NEAR(shell.eval({0, 0, 0}), -2.9, 1e-12);
  // on the mid-surface the value is t/2
  EXPECT_NEAR(shell.eval({kPi / 2.0, kPi / 2.0, kPi / 2.0}), 0.1, 1e-9);
  EXPECT_THROW(tpms_cell_field(tpms_topology(TpmsId::SchwarzP, 2.0), 1.0), ParamError);
  EXPECT_THROW(tpms_cell_field(tpms_topology(TpmsId::SchwarzP, 2.0), 0.0), ParamError);
}

TEST(Mesher, LatticeGenusMatchesMergedGraphOracle) {
  CellGrid grid{2, 2, 2, 10.0};
  LatticeField field = compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}), grid);
  TriangleMesh mesh = assemble_lattice(field, 32, 2);
  MeshReport r = mesh_diagnostics(mesh);

  detail::GraphBuilder merged(10.0);
  SkeletalGraph cell = beam_topology(BeamTopologyId::Cubic, 10.0);
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx)
        for (auto [a, b] : cell.edges) {
          Vec3 off{10.0 * dx, 10.0 * dy, 10.0 * dz};
          merged.segment(cell.vertices[a] + off, cell.vertices[b] + off);
        }
  int beta1 = graph_cycle_rank(merged.build());
  EXPECT_EQ(beta1, 28);

  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.components, 1);
  EXPECT_EQ(r.genus, beta1);
  // node spheres bulge past the cell boxes and stay closed
  EXPECT_GT(r.bbox.max.x, field.domain().max.x);
  EXPECT_LT(r.bbox.min.x, field.domain().min.x);
}

TEST(Mesher, ThreadCountDoesNotChangeOutput) {
  CellGrid grid{2, 1, 1, 10.0};
  LatticeField field = compose(topology_ref("bcc"), params({{"beam_diameter", "1.5"}}), grid);
  TriangleMesh a = assemble_lattice(field, 24, 1);
  TriangleMesh b = assemble_lattice(field, 24, 8);
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  ASSERT_EQ(a.triangles.size(), b.triangles.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
    EXPECT_EQ(a.vertices[i].y, b.vertices[i].y);
    EXPECT_EQ(a.vertices[i].z, b.vertices[i].z);
  }
  for (std::size_t i = 0; i < a.triangles.size(); ++i) EXPECT_EQ(a.triangles[i], b.triangles[i]);
}

TEST(Mesher, SchwarzPCellWatertightEvenEuler) {
  CellGrid grid{1, 1, 1, 20.0};
  LatticeField field = compose(topology_ref("schwarz_p"), params({{"thickness", "2"}}), grid);
  MeshReport r = mesh_diagnostics(assemble_lattice(field, 48, 2));
  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.euler_characteristic % 2, 0);
  EXPECT_GE(r.genus, 0);
  EXPECT_GT(r.volume, 0.0);
  // clipped to the cell box (plus the crossing clamp epsilon)
  EXPECT_LT(r.bbox.max.x, 20.0 + 1e-3);
  EXPECT_GT(r.bbox.min.x, -1e-3);
}

TEST(Mesher, GyroidShellThicknessAlongMeshNormals) {
  const double u = 10.0, t = 2.0;
  CellGrid grid{1, 1, 1, u};
  LatticeField field = compose(topology_ref("gyroid"), params({{"thickness", "2"}}), grid);
  TriangleMesh mesh = assemble_lattice(field, 64, 2);
  MeshReport rep = mesh_diagnostics(mesh);
  EXPECT_TRUE(rep.watertight);

  // area-weighted vertex normals
  std::vector<Vec3> normals(mesh.vertices.size(), {0, 0, 0});
  for (const auto& tri : mesh.triangles) {
    Vec3 n = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                   mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    for (int c = 0; c < 3; ++c) normals[tri[c]] = normals[tri[c]] + n;
  }

  auto thickness_at = [&](int vi) {
    Vec3 p = mesh.vertices[vi];
    // walk inward (against the outward normal) from just outside the
    // surface; measure the inside interval
    Vec3 n = -normalized(normals[vi]);
    double step = u / 64.0 / 4.0;
    double enter = -1.0, exit = -1.0;
    double s0 = -2.0 * step;
    double prev = field(p + s0 * n) >= 0 ? 1.0 : -1.0;
    if (prev > 0) return -1.0;  // started inside; normal direction unusable
    for (double s = s0 + step; s < 2.0 * t; s += step) {
      double cur = field(p + s * n) >= 0 ? 1.0 : -1.0;
      if (cur > 0 && prev < 0 && enter < 0) enter = s;
      if (cur < 0 && prev > 0 && enter >= 0) {
        exit = s;
        break;
      }
      prev = cur;
    }
    if (enter < 0 || exit < 0) return -1.0;
    auto refine = [&](double lo, double hi) {
      for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (field(p + mid * n) >= 0)
          hi = mid;
        else
          lo = mid;
      }
      return 0.5 * (lo + hi);
    };
    auto refine_exit = [&](double lo, double hi) {
      for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (field(p + mid * n) >= 0)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    double a = refine(enter - step, enter);
    double b = refine_exit(exit - step, exit);
    return b - a;
  };

  int measured = 0;
  double margin = 1.5;
  for (std::size_t vi = 0; vi < mesh.vertices.size() && measured < 20; vi += 97) {
    Vec3 p = mesh.vertices[vi];
    if (p.x < margin || p.x > u - margin || p.y < margin || p.y > u - margin || p.z < margin ||
        p.z > u - margin)
      continue;
    double th = thickness_at((int)vi);
    if (th < 0) continue;
    EXPECT_NEAR(th, t, 0.15 * t) << "vertex " << vi;
    ++measured;
  }
  EXPECT_GE(measured, 10);
}

TEST(Mesher, ResolutionAndGridValidation) {
  CellGrid grid{1, 1, 1, 10.0};
  LatticeField field = compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}), grid);
  EXPECT_THROW(assemble_lattice(field, 7), MeshError);
  EXPECT_THROW(assemble_lattice(field, 16, 0), MeshError);
  EXPECT_THROW(make_sample_grid({{0, 0, 0}, {1, 1, 1}}, 0.0, -1.0), MeshError);
}
