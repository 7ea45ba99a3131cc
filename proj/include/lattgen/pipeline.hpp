#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "lattgen/field.hpp"
#include "lattgen/io.hpp"
#include "lattgen/mesher.hpp"

namespace lattgen {

inline LatticeField field_from_spec(const LatticeSpec& spec) {
  return compose(spec.topo, spec.params, spec.grid, spec.profile, spec.transform);
}

struct RunOutcome {
  TriangleMesh mesh;
  MeshReport diagnostics;
  MeshStats stats;
  double export_seconds = 0.0;
  std::vector<std::string> warnings;
};

// Full pipeline: compose the field, polygonize, run diagnostics, export.
// Pass an empty stl_path to keep the mesh in memory without writing it.
inline RunOutcome run_spec(const LatticeSpec& spec, const std::string& stl_path = "",
                           int threads = 1) {
  LatticeField field = field_from_spec(spec);
  RunOutcome o;
  o.warnings = field.warnings;
  o.mesh = assemble_lattice(field, spec.resolution, threads, &o.stats);
  o.diagnostics = mesh_diagnostics(o.mesh);
  if (!stl_path.empty()) {
    auto t0 = std::chrono::steady_clock::now();
    save_stl(o.mesh, stl_path, spec.format, spec.name);
    o.export_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return o;
}

inline detail_spec::Json outcome_report(const LatticeSpec& spec, const RunOutcome& o) {
  PhaseTimings t;
  t.field_eval = o.stats.field_eval_seconds;
  t.polygonize = o.stats.polygonize_seconds;
  t.weld = o.stats.weld_seconds;
  t.export_ = o.export_seconds;
  return report_json(spec.name, o.diagnostics, t, o.warnings);
}

}  // namespace lattgen
