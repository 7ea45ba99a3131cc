#include <cctype>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lattgen/pipeline.hpp"

namespace {

using namespace lattgen;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string report_path_for(std::string out) {
  const std::string suffix = ".stl";
  if (out.size() >= suffix.size()) {
    std::string tail = out.substr(out.size() - suffix.size());
    for (char& c : tail) c = (char)std::tolower((unsigned char)c);
    if (tail == suffix) out.resize(out.size() - suffix.size());
  }
  return out + ".report.json";
}

struct Overrides {
  int resolution = 0;  // 0 = keep the document's value
  std::string format;
  std::string mode;
};

void apply_overrides(LatticeSpec& spec, const Overrides& o) {
  if (o.resolution > 0) spec.resolution = o.resolution;
  if (!o.format.empty()) spec.format = o.format == "ascii" ? StlFormat::Ascii : StlFormat::Binary;
  if (!o.mode.empty())
    spec.grid.mode = o.mode == "continuous" ? FieldMode::Continuous : FieldMode::PerCell;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_generate(const std::string& spec_path, const std::string& out_path,
                 std::string report_path, const Overrides& o, int threads) {
  LatticeSpec spec = load_spec_file(spec_path);
  apply_overrides(spec, o);
  if (report_path.empty()) report_path = report_path_for(out_path);

  auto t0 = Clock::now();
  RunOutcome run = run_spec(spec, out_path, threads);
  double total = seconds_since(t0);
  save_report(outcome_report(spec, run), report_path);

  print_warnings(run.warnings);
  const MeshReport& d = run.diagnostics;
  if (!d.watertight)
    std::cerr << "warning: mesh is not watertight (" << d.boundary_edges << " boundary edges, "
              << d.nonmanifold_edges << " non-manifold edges)\n";
  std::printf("%s: %lld vertices, %lld triangles, %d component(s), genus %d, volume %.6g\n",
              spec.name.c_str(), (long long)d.vertex_count, (long long)d.triangle_count,
              d.components, d.genus, d.volume);
  std::printf("wrote %s and %s in %.2f s\n", out_path.c_str(), report_path.c_str(), total);
  return 0;
}

// Static checks only: schema, expression parsing, per-cell parameter ranges.
// No field sampling or meshing.
int cmd_validate(const std::string& spec_path) {
  LatticeSpec spec = load_spec_file(spec_path);
  LatticeField field = field_from_spec(spec);
  print_warnings(field.warnings);
  std::printf("ok: %s (%s %s), %d cell(s), mode %s, resolution %d, format %s\n",
              spec.name.c_str(), topology_kind_name(spec.topo.kind), spec.topo.name().c_str(),
              cell_count(spec.grid), field_mode_name(spec.grid.mode), spec.resolution,
              stl_format_name(spec.format));
  return 0;
}

int cmd_info(const std::string& spec_path) {
  LatticeSpec spec = load_spec_file(spec_path);
  LatticeField field = field_from_spec(spec);

  detail_spec::Json doc;
  doc["spec"] = detail_spec::Json::parse(emit_spec(spec));
  doc["cells"] = cell_count(spec.grid);
  Aabb box = field.domain();
  doc["domain"] = {{"min", {box.min.x, box.min.y, box.min.z}},
                   {"max", {box.max.x, box.max.y, box.max.z}}};
  doc["sampling_margin"] = field.margin();
  if (spec.topo.kind == TopologyKind::Beam) {
    const ParameterSet& ps = field.cell_parameters(1, 1, 1);
    SkeletalGraph g = beam_topology(spec.topo.beam, spec.grid.u,
                                    spec.topo.truncatable() ? std::optional<double>(ps.trunc)
                                                            : std::nullopt);
    doc["unit_graph"] = {{"vertices", (int)g.vertices.size()},
                         {"edges", (int)g.edges.size()},
                         {"cycle_rank", graph_cycle_rank(g)}};
  }
  doc["warnings"] = field.warnings;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

LatticeSpec builtin_bench_spec(const std::string& topo_name) {
  TopologyRef t = topology_ref(topo_name);
  LatticeSpec s;
  s.name = topo_name;
  s.topo = t;
  s.grid.u = 10.0;
  if (t.kind == TopologyKind::Beam) {
    set_parameter(s.params, "beam_diameter", parse_expression("1"));
    set_parameter(s.params, "node_scale", parse_expression("1.1"));
    if (t.truncatable()) set_parameter(s.params, "trunc", parse_expression("0.25"));
  } else {
    set_parameter(s.params, "thickness", parse_expression("1"));
  }
  s.resolution = default_resolution(t.kind);
  return s;
}

int cmd_bench(const std::string& spec_path, const std::string& topo_name, const Overrides& o,
              int threads, int max_cells) {
  LatticeSpec base =
      spec_path.empty() ? builtin_bench_spec(topo_name) : load_spec_file(spec_path);
  apply_overrides(base, o);

  std::printf("# topology\tcells\tresolution\tthreads\ttotal_s\tper_cell_s\tfield_eval_s\t"
              "polygonize_s\tweld_s\ttriangles\n");
  for (int n = 1; n * n * n <= max_cells; ++n) {
    LatticeSpec spec = base;
    spec.grid.nx = spec.grid.ny = spec.grid.nz = n;
    int cells = n * n * n;
    auto t0 = Clock::now();
    RunOutcome run = run_spec(spec, "", threads);
    double total = seconds_since(t0);
    std::printf("%s\t%d\t%d\t%d\t%.4f\t%.4f\t%.4f\t%.4f\t%.4f\t%lld\n", spec.topo.name().c_str(),
                cells, spec.resolution, threads, total, total / cells,
                run.stats.field_eval_seconds, run.stats.polygonize_seconds,
                run.stats.weld_seconds, (long long)run.mesh.triangles.size());
    std::fflush(stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous lattice generator: implicit lattice fields polygonized to "
               "watertight STL"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lattgen 1.0.0");

  std::string spec_path, out_path, report_path, topo_name = "cubic";
  Overrides overrides;
  int threads = 1;
  int max_cells = 64;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--spec", spec_path, "Lattice document (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_out) {
      cmd->add_option("--out", out_path, "Output STL path")->required();
      cmd->add_option("--report", report_path,
                      "Diagnostics report path (default: alongside the STL)");
      cmd->add_option("--format", overrides.format, "STL flavor (overrides the document)")
          ->check(CLI::IsMember({"ascii", "binary"}));
      cmd->add_option("--resolution", overrides.resolution,
                      "Samples per cell edge (overrides the document)")
          ->check(CLI::PositiveNumber);
      cmd->add_option("--mode", overrides.mode, "Parameter mode (overrides the document)")
          ->check(CLI::IsMember({"per_cell", "continuous"}));
      cmd->add_option("--threads", threads, "Worker threads (default 1, deterministic)")
          ->check(CLI::PositiveNumber);
    }
  };

  auto* gen = app.add_subcommand("generate",
                                 "Generate an STL and a diagnostics report from a lattice document");
  add_common(gen, true);

  auto* val = app.add_subcommand("validate",
                                 "Check a lattice document without meshing (schema, expressions, "
                                 "parameter ranges)");
  val->add_option("--spec", spec_path, "Lattice document (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* info = app.add_subcommand("info",
                                  "Print the resolved document plus derived facts (domain, unit "
                                  "graph, warnings) as JSON");
  info->add_option("--spec", spec_path, "Lattice document (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench",
                                   "Time generation across growing grids (1, 8, 27, ... cells); "
                                   "emits tab-separated rows");
  auto* bench_spec_opt =
      bench->add_option("--spec", spec_path, "Benchmark this document's topology and parameters")
          ->check(CLI::ExistingFile);
  bench->add_option("--topology", topo_name, "Benchmark a built-in preset for this topology")
      ->excludes(bench_spec_opt);
  bench->add_option("--resolution", overrides.resolution, "Samples per cell edge")
      ->check(CLI::PositiveNumber);
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--max-cells", max_cells,
                    "Largest grid to time, in cells (default 64; raise explicitly for "
                    "large runs)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(spec_path, out_path, report_path, overrides, threads);
    if (val->parsed()) return cmd_validate(spec_path);
    if (info->parsed()) return cmd_info(spec_path);
    if (bench->parsed()) return cmd_bench(spec_path, topo_name, overrides, threads, max_cells);
  } catch (const lattgen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (int)e.error_class();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
