#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <vector>

#include "lattgen/errors.hpp"
#include "lattgen/field.hpp"
#include "lattgen/mc_tables.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

// Uniform sampling grid: nx*ny*nz voxels, (n+1) samples per axis, sample
// position = origin + index * h componentwise.
struct SampleGrid {
  Vec3 origin{0, 0, 0};
  double h = 1.0;
  int nx = 0, ny = 0, nz = 0;
  double weld_eps = 0.0;  // positional weld pass radius; 0 picks h * 1e-6

  Vec3 sample_pos(int ix, int iy, int iz) const {
    return {origin.x + ix * h, origin.y + iy * h, origin.z + iz * h};
  }
  std::int64_t sample_index(int ix, int iy, int iz) const {
    return ((std::int64_t)iz * (ny + 1) + iy) * (nx + 1) + ix;
  }
};

// Grid that covers `box` expanded by `pad`, using a whole number of voxels of
// edge h on each side so sample positions stay h-aligned to box.min.
inline SampleGrid make_sample_grid(const Aabb& box, double pad, double h) {
  if (!(h > 0.0)) throw MeshError("sampling step must be positive");
  SampleGrid g;
  g.h = h;
  // strictly more padding than `pad` so the outermost sample layer is outside
  int px = (int)std::ceil(pad / h) + 1;
  Vec3 ext = box.extent();
  auto voxels = [&](double e) {
    double q = e / h;
    return std::max(1, (int)std::ceil(q - 1e-9 * std::fmax(1.0, q)));
  };
  int vx = voxels(ext.x);
  int vy = voxels(ext.y);
  int vz = voxels(ext.z);
  g.origin = {box.min.x - px * h, box.min.y - px * h, box.min.z - px * h};
  g.nx = vx + 2 * px;
  g.ny = vy + 2 * px;
  g.nz = vz + 2 * px;
  return g;
}

struct MeshStats {
  double field_eval_seconds = 0.0;
  double polygonize_seconds = 0.0;
  double weld_seconds = 0.0;
  std::int64_t samples = 0;
};

namespace detail_mesh {

// Per-cube-edge canonical description: the lower sample corner offset and the
// axis the edge runs along (matches the table layout in mc_tables.hpp).
struct EdgeRef {
  int dx, dy, dz, axis;
};
inline constexpr EdgeRef kCubeEdges[12] = {
    {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1},
    {0, 0, 1, 0}, {1, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 1, 1},
    {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2},
};

inline constexpr int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Triangles of one chunk, keyed by global grid-edge ids so shared vertices
// merge exactly across chunks.
struct ChunkTriangles {
  std::vector<std::int64_t> keys;  // 3 per triangle
  std::vector<Vec3> positions;     // 3 per triangle
  double field_seconds = 0.0;
  double polygonize_seconds = 0.0;
  std::int64_t samples = 0;
};

// Polygonize the voxel range [x0,x1) x [y0,y1) x [z0,z1) of the global grid.
template <class Field>
ChunkTriangles polygonize_chunk(const Field& f, const SampleGrid& g, int x0, int x1, int y0,
                                int y1, int z0, int z1) {
  using clock = std::chrono::steady_clock;
  ChunkTriangles out;
  const int sx = x1 - x0 + 1, sy = y1 - y0 + 1, sz = z1 - z0 + 1;
  std::vector<double> val((std::size_t)sx * sy * sz);
  auto at = [&](int ix, int iy, int iz) -> double& {
    return val[((std::size_t)(iz - z0) * sy + (iy - y0)) * sx + (ix - x0)];
  };

  auto t0 = clock::now();
  for (int iz = z0; iz <= z1; ++iz)
    for (int iy = y0; iy <= y1; ++iy)
      for (int ix = x0; ix <= x1; ++ix) {
        double v = f(g.sample_pos(ix, iy, iz));
        if (!std::isfinite(v)) {
          std::ostringstream os;
          Vec3 p = g.sample_pos(ix, iy, iz);
          os << "field evaluated to a non-finite value at (" << p.x << ", " << p.y << ", " << p.z
             << ")";
          throw MeshError(os.str());
        }
        at(ix, iy, iz) = v;
      }
  out.samples = (std::int64_t)sx * sy * sz;
  auto t1 = clock::now();
  out.field_seconds = std::chrono::duration<double>(t1 - t0).count();

  // Interpolated crossing on the grid edge starting at sample (ix,iy,iz)
  // along axis, always computed low-sample to high-sample. The clamp keeps
  // crossings off the samples; it must stay well above weld_eps/h so two
  // surface sheets grazing the same sample plane (exact-zero plateaus from
  // the domain clip) are never fused by the positional weld.
  auto cut = [&](int ix, int iy, int iz, int axis) -> Vec3 {
    double fl = at(ix, iy, iz);
    double fu = at(ix + (axis == 0), iy + (axis == 1), iz + (axis == 2));
    double t = (0.0 - fl) / (fu - fl);
    t = std::fmin(std::fmax(t, 1e-3), 1.0 - 1e-3);
    Vec3 p = g.sample_pos(ix, iy, iz);
    if (axis == 0) p.x += t * g.h;
    if (axis == 1) p.y += t * g.h;
    if (axis == 2) p.z += t * g.h;
    return p;
  };

  for (int iz = z0; iz < z1; ++iz)
    for (int iy = y0; iy < y1; ++iy)
      for (int ix = x0; ix < x1; ++ix) {
        int caseIndex = 0;
        for (int c = 0; c < 8; ++c)
          if (at(ix + kCornerOffset[c][0], iy + kCornerOffset[c][1], iz + kCornerOffset[c][2]) <
              0.0)
            caseIndex |= 1 << c;
        if (kMcEdgeTable[caseIndex] == 0) continue;

        std::int64_t ekey[12];
        Vec3 epos[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kMcEdgeTable[caseIndex] >> e & 1)) continue;
          const EdgeRef& r = kCubeEdges[e];
          int ex = ix + r.dx, ey = iy + r.dy, ez = iz + r.dz;
          ekey[e] = g.sample_index(ex, ey, ez) * 3 + r.axis;
          epos[e] = cut(ex, ey, ez, r.axis);
        }
        const std::int8_t* row = kMcTriTable[caseIndex];
        for (int t = 0; row[t] >= 0; t += 3) {
          // table order gives outward normals for a positive-inside field
          int a = row[t], b = row[t + 1], c = row[t + 2];
          out.keys.push_back(ekey[a]);
          out.keys.push_back(ekey[b]);
          out.keys.push_back(ekey[c]);
          out.positions.push_back(epos[a]);
          out.positions.push_back(epos[b]);
          out.positions.push_back(epos[c]);
        }
      }
  out.polygonize_seconds =
      std::chrono::duration<double>(clock::now() - t1).count();
  return out;
}

// Quantized spatial hash over vertex positions; merges vertices closer than
// eps (handles crossings that collapse onto a shared grid sample).
inline std::vector<int> positional_weld(const std::vector<Vec3>& verts, double eps) {
  std::vector<int> remap(verts.size());
  if (eps <= 0.0) {
    for (std::size_t i = 0; i < verts.size(); ++i) remap[i] = (int)i;
    return remap;
  }
  auto cell_of = [&](Vec3 p) {
    return std::array<std::int64_t, 3>{(std::int64_t)std::floor(p.x / eps),
                                       (std::int64_t)std::floor(p.y / eps),
                                       (std::int64_t)std::floor(p.z / eps)};
  };
  auto hash = [](std::array<std::int64_t, 3> c) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : c) {
      h ^= (std::uint64_t)v;
      h *= 1099511628211ull;
    }
    return h;
  };
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  buckets.reserve(verts.size() * 2);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    Vec3 p = verts[i];
    auto base = cell_of(p);
    int target = (int)i;
    for (std::int64_t dz = -1; dz <= 1 && target == (int)i; ++dz)
      for (std::int64_t dy = -1; dy <= 1 && target == (int)i; ++dy)
        for (std::int64_t dx = -1; dx <= 1 && target == (int)i; ++dx) {
          auto it = buckets.find(hash({base[0] + dx, base[1] + dy, base[2] + dz}));
          if (it == buckets.end()) continue;
          for (int cand : it->second)
            if (distance(verts[cand], p) <= eps) {
              target = cand;
              break;
            }
        }
    remap[i] = target;
    if (target == (int)i) buckets[hash(base)].push_back((int)i);
  }
  return remap;
}

// Merge chunk triangle lists (already in deterministic chunk order) into a
// single indexed mesh: grid-edge keys assign shared vertices, then a
// positional weld collapses near-coincident ones and degenerate triangles
// are dropped.
inline TriangleMesh merge_chunks(const std::vector<ChunkTriangles>& chunks, double weld_eps,
                                 MeshStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  TriangleMesh mesh;
  std::unordered_map<std::int64_t, int> by_key;
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.keys.size();
  by_key.reserve(total * 2);

  std::vector<Vec3> verts;
  std::vector<int> tri_idx;
  tri_idx.reserve(total);
  for (const auto& c : chunks)
    for (std::size_t n = 0; n < c.keys.size(); ++n) {
      auto [it, inserted] = by_key.try_emplace(c.keys[n], (int)verts.size());
      if (inserted) {
        verts.push_back(c.positions[n]);
      } else if (!(verts[it->second].x == c.positions[n].x &&
                   verts[it->second].y == c.positions[n].y &&
                   verts[it->second].z == c.positions[n].z)) {
        throw MeshError("internal: chunk boundary sample mismatch");
      }
      tri_idx.push_back(it->second);
    }

  std::vector<int> remap = positional_weld(verts, weld_eps);

  // compact vertices in first-use order, drop index-degenerate triangles
  std::vector<int> newid(verts.size(), -1);
  for (std::size_t t = 0; t + 2 < tri_idx.size(); t += 3) {
    int a = remap[tri_idx[t]], b = remap[tri_idx[t + 1]], c = remap[tri_idx[t + 2]];
    if (a == b || b == c || a == c) continue;
    for (int v : {a, b, c})
      if (newid[v] < 0) {
        newid[v] = (int)mesh.vertices.size();
        mesh.vertices.push_back(verts[v]);
      }
    mesh.triangles.push_back({newid[a], newid[b], newid[c]});
  }
  if (stats)
    stats->weld_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return mesh;
}

}  // namespace detail_mesh

// Marching cubes over the whole grid in one chunk. Returns the welded mesh;
// empty when the field has no zero crossing inside the grid.
template <class Field>
TriangleMesh polygonize(const Field& f, const SampleGrid& g, MeshStats* stats = nullptr) {
  if (g.nx < 1 || g.ny < 1 || g.nz < 1) throw MeshError("sampling grid has no voxels");
  std::vector<detail_mesh::ChunkTriangles> one(1);
  one[0] = detail_mesh::polygonize_chunk(f, g, 0, g.nx, 0, g.ny, 0, g.nz);
  if (stats) {
    stats->field_eval_seconds += one[0].field_seconds;
    stats->polygonize_seconds += one[0].polygonize_seconds;
    stats->samples += one[0].samples;
  }
  double eps = g.weld_eps > 0.0 ? g.weld_eps : g.h * 1e-6;
  return detail_mesh::merge_chunks(one, eps, stats);
}

// Chunked parallel marching cubes: the voxel grid is split into blocks of
// `chunk_voxels` per axis, workers pull blocks from a queue, and results are
// merged in block order so output is identical for any thread count.
template <class Field>
TriangleMesh polygonize_chunked(const Field& f, const SampleGrid& g, int chunk_voxels, int threads,
                                MeshStats* stats = nullptr) {
  if (g.nx < 1 || g.ny < 1 || g.nz < 1) throw MeshError("sampling grid has no voxels");
  if (chunk_voxels < 1) throw MeshError("chunk size must be positive");
  if (threads < 1) throw MeshError("thread count must be at least 1");

  auto blocks_along = [&](int n) { return (n + chunk_voxels - 1) / chunk_voxels; };
  const int bx = blocks_along(g.nx), by = blocks_along(g.ny), bz = blocks_along(g.nz);
  const int nblocks = bx * by * bz;
  std::vector<detail_mesh::ChunkTriangles> chunks(nblocks);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      int b = next.fetch_add(1);
      if (b >= nblocks) return;
      int ix = b % bx, iy = (b / bx) % by, iz = b / (bx * by);
      int x0 = ix * chunk_voxels, y0 = iy * chunk_voxels, z0 = iz * chunk_voxels;
      try {
        chunks[b] = detail_mesh::polygonize_chunk(
            f, g, x0, std::min(x0 + chunk_voxels, g.nx), y0, std::min(y0 + chunk_voxels, g.ny),
            z0, std::min(z0 + chunk_voxels, g.nz));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  int nworkers = std::min(threads, nblocks);
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (stats)
    for (const auto& c : chunks) {
      stats->field_eval_seconds += c.field_seconds;
      stats->polygonize_seconds += c.polygonize_seconds;
      stats->samples += c.samples;
    }
  double eps = g.weld_eps > 0.0 ? g.weld_eps : g.h * 1e-6;
  return detail_mesh::merge_chunks(chunks, eps, stats);
}

// Mesh a composed lattice field at `resolution` voxels per unit-cell edge.
inline TriangleMesh assemble_lattice(const LatticeField& field, int resolution, int threads = 1,
                                     MeshStats* stats = nullptr) {
  if (resolution < 8) throw MeshError("resolution must be at least 8 voxels per unit cell");
  if (threads < 1) throw MeshError("thread count must be at least 1");
  double h = field.grid.u / resolution;
  SampleGrid g = make_sample_grid(field.domain(), field.margin(), h);
  g.weld_eps = field.grid.u * 1e-6;
  return polygonize_chunked(field, g, resolution, threads, stats);
}

// Connectivity diagnostics over an indexed triangle mesh.
struct MeshReport {
  std::int64_t vertex_count = 0;
  std::int64_t triangle_count = 0;
  std::int64_t edge_count = 0;
  std::int64_t boundary_edges = 0;     // edges with exactly 1 incident triangle
  std::int64_t nonmanifold_edges = 0;  // edges with 3 or more
  int components = 0;
  bool watertight = false;  // non-empty, all edges shared by exactly 2 triangles
  long euler_characteristic = 0;
  int genus = -1;  // total over components; -1 when the mesh is not closed
  double volume = 0.0;
  Aabb bbox{{0, 0, 0}, {0, 0, 0}};
  std::vector<int> component_genus;  // per closed component
};

inline MeshReport mesh_diagnostics(const TriangleMesh& mesh) {
  MeshReport r;
  r.vertex_count = (std::int64_t)mesh.vertices.size();
  r.triangle_count = (std::int64_t)mesh.triangles.size();
  if (mesh.triangles.empty()) return r;

  std::vector<int> parent(mesh.vertices.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };

  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      ++edge_use[std::minmax(a, b)];
      parent[find(a)] = find(b);
    }
  }
  r.edge_count = (std::int64_t)edge_use.size();
  for (const auto& [edge, uses] : edge_use) {
    if (uses == 1) ++r.boundary_edges;
    if (uses > 2) ++r.nonmanifold_edges;
  }
  r.watertight = r.boundary_edges == 0 && r.nonmanifold_edges == 0;
  r.euler_characteristic = (long)(r.vertex_count - r.edge_count + r.triangle_count);

  std::map<int, std::array<long, 3>> comp;  // root -> V, E, F
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) ++comp[find((int)v)][0];
  for (const auto& [edge, uses] : edge_use) ++comp[find(edge.first)][1];
  for (const auto& t : mesh.triangles) ++comp[find(t[0])][2];
  r.components = (int)comp.size();
  if (r.watertight) {
    int total = 0;
    for (const auto& [root, vef] : comp) {
      long chi = vef[0] - vef[1] + vef[2];
      int genus = (int)((2 - chi) / 2);
      r.component_genus.push_back(genus);
      total += genus;
    }
    r.genus = total;
  }

  Aabb box{mesh.vertices[0], mesh.vertices[0]};
  for (const Vec3& v : mesh.vertices) box.expand(v);
  r.bbox = box;

  double vol6 = 0.0;
  for (const auto& t : mesh.triangles)
    vol6 += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  r.volume = vol6 / 6.0;
  return r;
}

}  // namespace lattgen
