#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lattgen/errors.hpp"
#include "lattgen/field.hpp"
#include "lattgen/mesher.hpp"

namespace lattgen {

enum class StlFormat { Ascii, Binary };

inline const char* stl_format_name(StlFormat f) {
  return f == StlFormat::Ascii ? "ascii" : "binary";
}

// A fully resolved lattice document: topology, grid, section profile,
// parameter expressions, and output settings, with defaults applied.
struct LatticeSpec {
  std::string name;  // label for the STL solid and the report
  TopologyRef topo;
  CellGrid grid;  // edge length, cell counts, parameter mode
  ProfileKind profile = ProfileKind::Circle;
  ParameterField params;
  int resolution = 0;  // samples per cell edge
  std::optional<CylindricalMap> transform;
  StlFormat format = StlFormat::Binary;
};

inline int default_resolution(TopologyKind k) {
  return k == TopologyKind::Beam ? 48 : 64;
}

inline bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
  if (a.name != b.name || a.topo.name() != b.topo.name()) return false;
  if (a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny || a.grid.nz != b.grid.nz ||
      a.grid.u != b.grid.u || a.grid.mode != b.grid.mode)
    return false;
  if (a.profile != b.profile || a.resolution != b.resolution || a.format != b.format) return false;
  if (a.transform.has_value() != b.transform.has_value()) return false;
  if (a.transform && a.transform->inner_radius != b.transform->inner_radius) return false;
  if (a.params.exprs.size() != b.params.exprs.size()) return false;
  for (const auto& [key, expr] : a.params.exprs) {
    auto it = b.params.exprs.find(key);
    if (it == b.params.exprs.end() || it->second.source() != expr.source()) return false;
  }
  return true;
}

inline bool operator!=(const LatticeSpec& a, const LatticeSpec& b) { return !(a == b); }

namespace detail_spec {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw SpecError(path + ": " + msg);
}

inline double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, std::string("expected a number, got ") + v.type_name());
  return v.get<double>();
}

inline int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, std::string("expected an integer, got ") + v.type_name());
  return v.get<int>();
}

inline std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, std::string("expected a string, got ") + v.type_name());
  return v.get<std::string>();
}

// Parameter values are expression strings; bare numbers are accepted and read
// as constant expressions.
inline Expression as_expression(const Json& v, const std::string& path) {
  std::string text;
  if (v.is_string())
    text = v.get<std::string>();
  else if (v.is_number())
    text = v.dump();
  else
    fail(path, std::string("expected an expression string or a number, got ") + v.type_name());
  try {
    return parse_expression(text);
  } catch (const Error& e) {
    throw Error(e.error_class(), path + ": " + e.what());
  }
}

inline std::string number_repr(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail_spec

// Parses and validates a lattice document (JSON text). Defaults applied:
// mode per_cell, node_scale 1.1 (beam kinds), resolution 48 for beams and 64
// for shells, format binary, name = topology id. Every error names the
// offending field by path.
inline LatticeSpec load_spec(const std::string& text) {
  using detail_spec::as_expression;
  using detail_spec::as_int;
  using detail_spec::as_number;
  using detail_spec::as_string;
  using detail_spec::fail;
  using detail_spec::Json;

  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError(std::string("$: expected an object, got ") + doc.type_name());

  static const std::set<std::string> structural = {"name", "topology", "kind",       "u",
                                                   "n",    "mode",     "profile",    "resolution",
                                                   "format", "transform"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!structural.count(key) && !known_parameter_keys().count(key))
      fail("$." + key,
           "unknown key; expected one of name, topology, kind, u, n, mode, profile, resolution, "
           "format, transform, or a parameter key (beam_diameter, fillet_ratio, node_scale, "
           "thickness, trunc)");
  }

  LatticeSpec spec;

  if (!doc.contains("topology")) fail("$", "missing required key 'topology'");
  spec.topo = topology_ref(as_string(doc["topology"], "$.topology"));

  if (doc.contains("kind")) {
    std::string k = as_string(doc["kind"], "$.kind");
    if (k != "beam" && k != "tpms") fail("$.kind", "expected 'beam' or 'tpms', got '" + k + "'");
    if (k != topology_kind_name(spec.topo.kind))
      fail("$.kind", "'" + k + "' does not match topology '" + spec.topo.name() + "', which is " +
                         topology_kind_name(spec.topo.kind));
  }

  if (!doc.contains("u")) fail("$", "missing required key 'u'");
  spec.grid.u = as_number(doc["u"], "$.u");
  if (!(spec.grid.u > 0.0))
    fail("$.u", "unit cell edge length must be positive (got " +
                    detail_spec::number_repr(spec.grid.u) + ")");

  if (!doc.contains("n")) fail("$", "missing required key 'n'");
  {
    const Json& n = doc["n"];
    if (!n.is_array() || n.size() != 3)
      fail("$.n", "expected an array of 3 cell counts [nx, ny, nz]");
    int* slots[3] = {&spec.grid.nx, &spec.grid.ny, &spec.grid.nz};
    for (int a = 0; a < 3; ++a) {
      std::string path = "$.n[" + std::to_string(a) + "]";
      *slots[a] = as_int(n[a], path);
      if (*slots[a] < 1) fail(path, "cell count must be at least 1");
    }
  }

  if (doc.contains("mode")) {
    std::string m = as_string(doc["mode"], "$.mode");
    if (m == "per_cell")
      spec.grid.mode = FieldMode::PerCell;
    else if (m == "continuous")
      spec.grid.mode = FieldMode::Continuous;
    else
      fail("$.mode", "expected 'per_cell' or 'continuous', got '" + m + "'");
  }

  if (doc.contains("profile")) {
    if (spec.topo.kind != TopologyKind::Beam)
      fail("$.profile", "section profiles apply to beam topologies, not '" + spec.topo.name() + "'");
    std::string p = as_string(doc["profile"], "$.profile");
    if (p == "circle")
      spec.profile = ProfileKind::Circle;
    else if (p == "square")
      spec.profile = ProfileKind::Square;
    else if (p == "rounded_square")
      spec.profile = ProfileKind::RoundedSquare;
    else
      fail("$.profile", "expected 'circle', 'square' or 'rounded_square', got '" + p + "'");
  }

  if (doc.contains("resolution")) {
    spec.resolution = as_int(doc["resolution"], "$.resolution");
    if (spec.resolution < 8) fail("$.resolution", "must be at least 8 samples per cell edge");
  } else {
    spec.resolution = default_resolution(spec.topo.kind);
  }

  if (doc.contains("format")) {
    std::string f = as_string(doc["format"], "$.format");
    if (f == "ascii")
      spec.format = StlFormat::Ascii;
    else if (f == "binary")
      spec.format = StlFormat::Binary;
    else
      fail("$.format", "expected 'ascii' or 'binary', got '" + f + "'");
  }

  if (doc.contains("transform")) {
    const Json& t = doc["transform"];
    if (!t.is_object()) fail("$.transform", std::string("expected an object, got ") + t.type_name());
    for (const auto& [key, value] : t.items()) {
      (void)value;
      if (key != "type" && key != "inner_radius") fail("$.transform." + key, "unknown key");
    }
    if (!t.contains("type")) fail("$.transform", "missing required key 'type'");
    std::string ty = as_string(t["type"], "$.transform.type");
    if (ty != "cylindrical") fail("$.transform.type", "expected 'cylindrical', got '" + ty + "'");
    if (!t.contains("inner_radius")) fail("$.transform", "missing required key 'inner_radius'");
    double r = as_number(t["inner_radius"], "$.transform.inner_radius");
    if (!(r > 0.0))
      fail("$.transform.inner_radius",
           "must be positive (got " + detail_spec::number_repr(r) + ")");
    spec.transform = CylindricalMap{r};
  }

  for (const std::string& key : known_parameter_keys())
    if (doc.contains(key)) set_parameter(spec.params, key, as_expression(doc[key], "$." + key));

  if (spec.topo.kind == TopologyKind::Beam && !spec.params.has("node_scale"))
    set_parameter(spec.params, "node_scale", parse_expression("1.1"));

  spec.name = doc.contains("name") ? as_string(doc["name"], "$.name") : spec.topo.name();

  if (spec.transform) validate_conformal_grid(spec.grid);
  validate_parameter_field(spec.topo, spec.params, spec.profile, spec.transform.has_value());
  return spec;
}

// Serializes a resolved spec back to document text. load_spec(emit_spec(s))
// reproduces s exactly: expression sources are stored verbatim and numbers
// print with round-trip precision.
inline std::string emit_spec(const LatticeSpec& spec) {
  detail_spec::Json doc;
  doc["name"] = spec.name;
  doc["topology"] = spec.topo.name();
  doc["kind"] = topology_kind_name(spec.topo.kind);
  doc["u"] = spec.grid.u;
  doc["n"] = {spec.grid.nx, spec.grid.ny, spec.grid.nz};
  doc["mode"] = field_mode_name(spec.grid.mode);
  if (spec.topo.kind == TopologyKind::Beam) doc["profile"] = profile_kind_name(spec.profile);
  for (const auto& [key, expr] : spec.params.exprs) doc[key] = expr.source();
  doc["resolution"] = spec.resolution;
  if (spec.transform)
    doc["transform"] = {{"type", "cylindrical"}, {"inner_radius", spec.transform->inner_radius}};
  doc["format"] = stl_format_name(spec.format);
  return doc.dump(2) + "\n";
}

inline LatticeSpec load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for spec file '" + path + "'");
  try {
    return load_spec(buf.str());
  } catch (const Error& e) {
    throw Error(e.error_class(), path + ": " + e.what());
  }
}

namespace detail_stl {

inline Vec3 facet_normal(const TriangleMesh& m, const std::array<int, 3>& t) {
  Vec3 a = m.vertices[t[0]];
  Vec3 n = cross(m.vertices[t[1]] - a, m.vertices[t[2]] - a);
  double len = norm(n);
  if (!(len > 0.0) || !std::isfinite(len)) return {0, 0, 0};
  return n / len;
}

inline void put_u16(std::ostream& out, std::uint16_t v) {
  char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  out.write(b, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline void put_f32(std::ostream& out, double v) {
  float f = (float)v;
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

inline void require_nonempty(const TriangleMesh& mesh) {
  if (mesh.empty()) throw MeshError("refusing to export an empty mesh (no triangles)");
}

}  // namespace detail_stl

// Text STL: solid/facet/vertex records, 9 significant digits. Facet normals
// are recomputed from the triangle winding; slicers ignore stored normals.
inline void write_stl_ascii(const TriangleMesh& mesh, std::ostream& out,
                            const std::string& name = "lattice") {
  detail_stl::require_nonempty(mesh);
  out << "solid " << name << "\n";
  char line[200];
  for (const auto& t : mesh.triangles) {
    Vec3 n = detail_stl::facet_normal(mesh, t);
    std::snprintf(line, sizeof line, "  facet normal %.9g %.9g %.9g\n", n.x, n.y, n.z);
    out << line << "    outer loop\n";
    for (int v : t) {
      Vec3 p = mesh.vertices[v];
      std::snprintf(line, sizeof line, "      vertex %.9g %.9g %.9g\n", p.x, p.y, p.z);
      out << line;
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << name << "\n";
  if (!out) throw IoError("STL write failed");
}

// Binary STL: 80-byte zero-padded header, unsigned 32-bit little-endian
// triangle count, then 50 bytes per triangle (12 little-endian 32-bit floats
// for normal + vertices, 2-byte zero attribute).
inline void write_stl_binary(const TriangleMesh& mesh, std::ostream& out,
                             const std::string& name = "lattice") {
  detail_stl::require_nonempty(mesh);
  char header[80] = {};
  std::string tag = "lattgen " + name;
  std::memcpy(header, tag.data(), std::min<std::size_t>(tag.size(), 79));
  out.write(header, 80);
  detail_stl::put_u32(out, (std::uint32_t)mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    Vec3 n = detail_stl::facet_normal(mesh, t);
    detail_stl::put_f32(out, n.x);
    detail_stl::put_f32(out, n.y);
    detail_stl::put_f32(out, n.z);
    for (int v : t) {
      Vec3 p = mesh.vertices[v];
      detail_stl::put_f32(out, p.x);
      detail_stl::put_f32(out, p.y);
      detail_stl::put_f32(out, p.z);
    }
    detail_stl::put_u16(out, 0);
  }
  if (!out) throw IoError("STL write failed");
}

// Writes the mesh to a file. The empty-mesh check precedes file creation so a
// failed run leaves nothing behind.
inline void save_stl(const TriangleMesh& mesh, const std::string& path, StlFormat format,
                     const std::string& name = "lattice") {
  detail_stl::require_nonempty(mesh);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (format == StlFormat::Ascii)
    write_stl_ascii(mesh, out, name);
  else
    write_stl_binary(mesh, out, name);
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Wall-clock seconds per pipeline phase.
struct PhaseTimings {
  double field_eval = 0.0;
  double polygonize = 0.0;
  double weld = 0.0;
  double export_ = 0.0;
};

// Diagnostics report: mesh counts, topology invariants, volume, bounds and
// per-phase timings, as JSON.
inline detail_spec::Json report_json(const std::string& name, const MeshReport& r,
                                     const PhaseTimings& t,
                                     const std::vector<std::string>& warnings = {}) {
  detail_spec::Json doc;
  doc["name"] = name;
  doc["vertices"] = r.vertex_count;
  doc["triangles"] = r.triangle_count;
  doc["edges"] = r.edge_count;
  doc["boundary_edges"] = r.boundary_edges;
  doc["nonmanifold_edges"] = r.nonmanifold_edges;
  doc["components"] = r.components;
  doc["euler_characteristic"] = r.euler_characteristic;
  doc["genus"] = r.genus;
  doc["component_genus"] = r.component_genus;
  doc["watertight"] = r.watertight;
  doc["volume"] = r.volume;
  doc["bbox"] = {{"min", {r.bbox.min.x, r.bbox.min.y, r.bbox.min.z}},
                 {"max", {r.bbox.max.x, r.bbox.max.y, r.bbox.max.z}}};
  doc["timings_seconds"] = {{"field_eval", t.field_eval},
                            {"polygonize", t.polygonize},
                            {"weld", t.weld},
                            {"export", t.export_}};
  doc["warnings"] = warnings;
  return doc;
}

inline void write_report(const detail_spec::Json& report, std::ostream& out) {
  out << report.dump(2) << "\n";
  if (!out) throw IoError("report write failed");
}

inline void save_report(const detail_spec::Json& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_report(report, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace lattgen
