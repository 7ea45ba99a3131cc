#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lattgen/cell_field.hpp"
#include "lattgen/conformal.hpp"
#include "lattgen/errors.hpp"
#include "lattgen/expr.hpp"
#include "lattgen/grid.hpp"
#include "lattgen/profile.hpp"
#include "lattgen/topology.hpp"
#include "lattgen/vec3.hpp"

namespace lattgen {

enum class TopologyKind { Beam, Tpms };

// Reference into the topology catalog: a beam graph id or a TPMS surface id.
struct TopologyRef {
  TopologyKind kind = TopologyKind::Beam;
  BeamTopologyId beam = BeamTopologyId::Cubic;
  TpmsId tpms = TpmsId::Gyroid;

  std::string name() const {
    return kind == TopologyKind::Beam ? beam_topology_name(beam) : tpms_name(tpms);
  }
  bool truncatable() const {
    return kind == TopologyKind::Beam && beam_topology_truncatable(beam);
  }
};

inline std::string known_topology_list() {
  std::string out;
  for (auto id : all_beam_topologies()) {
    out += beam_topology_name(id);
    out += ", ";
  }
  auto surfaces = all_tpms();
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    out += tpms_name(surfaces[i]);
    if (i + 1 < surfaces.size()) out += ", ";
  }
  return out;
}

inline TopologyRef topology_ref(std::string_view name) {
  TopologyRef ref;
  if (auto b = beam_topology_from_name(name)) {
    ref.kind = TopologyKind::Beam;
    ref.beam = *b;
    return ref;
  }
  if (auto t = tpms_from_name(name)) {
    ref.kind = TopologyKind::Tpms;
    ref.tpms = *t;
    return ref;
  }
  throw SpecError("unknown topology '" + std::string(name) +
                  "'; known topologies: " + known_topology_list());
}

inline const char* topology_kind_name(TopologyKind k) {
  return k == TopologyKind::Beam ? "beam" : "tpms";
}

// Named geometric parameters, each an expression over the cell bindings.
struct ParameterField {
  std::map<std::string, Expression> exprs;

  bool has(const std::string& key) const { return exprs.count(key) != 0; }
};

inline const std::set<std::string>& known_parameter_keys() {
  static const std::set<std::string> keys{"thickness", "beam_diameter", "node_scale",
                                          "fillet_ratio", "trunc"};
  return keys;
}

inline void set_parameter(ParameterField& pf, const std::string& key, Expression e) {
  if (!known_parameter_keys().count(key))
    throw SpecError("unknown parameter key '" + key + "'");
  pf.exprs.insert_or_assign(key, std::move(e));
}

// Resolved numeric parameters for one evaluation point.
struct ParameterSet {
  double thickness = 0.0;
  double beam_diameter = 0.0;
  double node_scale = 1.1;
  double fillet_ratio = 0.0;
  double trunc = 0.0;
};

// Static compatibility of parameter keys with the topology kind, the profile,
// and the active transform. Mismatches are spec-level errors.
inline void validate_parameter_field(const TopologyRef& topo, const ParameterField& pf,
                                     ProfileKind profile, bool conformal) {
  auto require = [&](const char* key) {
    if (!pf.has(key))
      throw SpecError("topology '" + topo.name() + "' requires parameter '" + key + "'");
  };
  auto forbid = [&](const char* key, const std::string& why) {
    if (pf.has(key)) throw SpecError("parameter '" + std::string(key) + "': " + why);
  };

  // Misplaced keys are diagnosed before missing ones: "thickness applies to
  // TPMS shells" beats "requires beam_diameter" when someone mixed kinds up.
  if (topo.kind == TopologyKind::Beam) {
    forbid("thickness", "applies to TPMS shells, not beam topology '" + topo.name() + "'");
    require("beam_diameter");
    if (topo.truncatable()) {
      require("trunc");
    } else {
      forbid("trunc", "topology '" + topo.name() + "' takes no truncation parameter");
    }
    if (profile == ProfileKind::RoundedSquare) {
      require("fillet_ratio");
    } else {
      forbid("fillet_ratio", std::string("profile '") + profile_kind_name(profile) +
                                 "' has no corner radius");
    }
  } else {
    forbid("beam_diameter", "applies to beam topologies, not TPMS '" + topo.name() + "'");
    require("thickness");
    forbid("node_scale", "applies to beam topologies, not TPMS '" + topo.name() + "'");
    forbid("fillet_ratio", "applies to beam profiles, not TPMS '" + topo.name() + "'");
    forbid("trunc", "applies to truncatable beam topologies, not TPMS '" + topo.name() + "'");
    if (conformal)
      throw SpecError("cylindrical transform supports beam topologies only, got '" +
                      topo.name() + "'");
  }

  std::set<std::string> allowed{"x", "y", "z", "i", "j", "k", "u", "nx", "ny", "nz"};
  if (conformal) {
    allowed.insert("rho");
    allowed.insert("phi");
  }
  for (const auto& [key, expr] : pf.exprs)
    for (const auto& var : expr.free_variables())
      if (!allowed.count(var))
        throw ExprEvalError("parameter '" + key + "': unbound variable '" + var + "'" +
                            ((var == "rho" || var == "phi") && !conformal
                                 ? " (only bound under a cylindrical transform)"
                                 : ""));
}

// Expression bindings for one cell: normalized x,y,z; 1-based i,j,k; u and
// the cell counts; rho,phi under a cylindrical transform.
inline Bindings cell_bindings(const CellGrid& g, int i, int j, int k,
                              const std::optional<CylindricalMap>& map) {
  Vec3 n = normalized_coords(g, i, j, k);
  Bindings b{{"x", n.x},           {"y", n.y},           {"z", n.z},
             {"i", (double)i},     {"j", (double)j},     {"k", (double)k},
             {"u", g.u},           {"nx", (double)g.nx}, {"ny", (double)g.ny},
             {"nz", (double)g.nz}};
  if (map) {
    auto [rho, phi] = conformal_bindings(i, j, g);
    b.emplace("rho", rho);
    b.emplace("phi", phi);
  }
  return b;
}

// Containing cell of a world point, 1-based, clamped to the grid so queries
// in the sampling margin dispatch to the nearest boundary cell.
inline void straight_cell_of(const CellGrid& g, Vec3 X, int* i, int* j, int* k) {
  *i = std::clamp((int)std::floor(X.x / g.u), 0, g.nx - 1) + 1;
  *j = std::clamp((int)std::floor(X.y / g.u), 0, g.ny - 1) + 1;
  *k = std::clamp((int)std::floor(X.z / g.u), 0, g.nz - 1) + 1;
}

// Continuous-mode bindings: x,y,z become the query position as a fraction of
// the whole domain (clamped so margin queries reuse boundary values); under a
// cylindrical transform the fractions are radial/angular/axial.
inline Bindings positional_bindings(const CellGrid& g, Vec3 X, int i, int j, int k,
                                    const std::optional<CylindricalMap>& map) {
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  Bindings b;
  if (map) {
    double rho = clamp01((std::hypot(X.x, X.y) - map->inner_radius) / (g.nx * g.u));
    double phi = std::atan2(X.y, X.x);
    if (phi < 0.0) phi += kTwoPi;
    phi /= kTwoPi;
    b = {{"x", rho}, {"y", phi}, {"z", clamp01(X.z / (g.nz * g.u))}};
    b.emplace("rho", rho);
    b.emplace("phi", phi);
  } else {
    b = {{"x", clamp01(X.x / (g.nx * g.u))},
         {"y", clamp01(X.y / (g.ny * g.u))},
         {"z", clamp01(X.z / (g.nz * g.u))}};
  }
  b.emplace("i", (double)i);
  b.emplace("j", (double)j);
  b.emplace("k", (double)k);
  b.emplace("u", g.u);
  b.emplace("nx", (double)g.nx);
  b.emplace("ny", (double)g.ny);
  b.emplace("nz", (double)g.nz);
  return b;
}

// Evaluate and range-check every provided parameter. Violations abort with
// the cell index and the offending key; node_scale below 1 only warns.
inline ParameterSet evaluate_parameters(const ParameterField& pf, const Bindings& env, double u,
                                        int i, int j, int k,
                                        std::vector<std::string>* warnings = nullptr) {
  auto context = [&](const char* key) {
    std::ostringstream os;
    os << "cell (" << i << "," << j << "," << k << "), key '" << key << "'";
    return os.str();
  };
  auto value_of = [&](const char* key, double fallback) {
    auto it = pf.exprs.find(key);
    if (it == pf.exprs.end()) return fallback;
    try {
      return it->second.evaluate(env);
    } catch (const Error& e) {
      throw Error(e.error_class(), context(key) + ": " + std::string(e.what()));
    }
  };
  auto fail = [&](const char* key, const char* what, double got) {
    std::ostringstream os;
    os << context(key) << ": " << what << " (got " << got << ")";
    throw ParamError(os.str());
  };

  ParameterSet ps;
  if (pf.has("thickness")) {
    ps.thickness = value_of("thickness", 0.0);
    if (!(ps.thickness > 0.0)) fail("thickness", "must be positive", ps.thickness);
    if (!(ps.thickness < u / 2.0))
      fail("thickness", "must stay below half the unit cell edge", ps.thickness);
  }
  if (pf.has("beam_diameter")) {
    ps.beam_diameter = value_of("beam_diameter", 0.0);
    if (!(ps.beam_diameter > 0.0)) fail("beam_diameter", "must be positive", ps.beam_diameter);
  }
  ps.node_scale = value_of("node_scale", 1.1);
  if (!(ps.node_scale > 0.0)) fail("node_scale", "must be positive", ps.node_scale);
  if (ps.node_scale < 1.0 && warnings) {
    std::ostringstream os;
    os << context("node_scale") << ": value " << ps.node_scale
       << " is below 1; node spheres no longer cover beam end caps";
    warnings->push_back(os.str());
  }
  ps.fillet_ratio = value_of("fillet_ratio", 0.0);
  if (!(ps.fillet_ratio >= 0.0 && ps.fillet_ratio <= 1.0))
    fail("fillet_ratio", "must lie in [0, 1]", ps.fillet_ratio);
  ps.trunc = value_of("trunc", 0.0);
  if (!(ps.trunc >= 0.0 && ps.trunc <= 0.5)) fail("trunc", "must lie in [0, 0.5]", ps.trunc);
  return ps;
}

// The composed lattice field F = (P o T)(X): one scalar field over the whole
// domain that dispatches each query to the containing cell's unit-cell solid.
class LatticeField {
 public:
  TopologyRef topo;
  CellGrid grid;
  ProfileKind profile = ProfileKind::Circle;
  std::optional<CylindricalMap> map;
  ParameterField params;
  std::vector<std::string> warnings;

  double operator()(Vec3 X) const {
    int i, j, k;
    locate(X, &i, &j, &k);
    int c = cell_linear_index(grid, i, j, k);
    if (grid.mode == FieldMode::PerCell) {
      if (topo.kind == TopologyKind::Beam)
        return beam_value(beam_cells_[c], map ? X : to_local(X, i, j, k));
      return clip(X, tpms_cells_[c].eval(to_local(X, i, j, k)));
    }
    ParameterSet ps =
        evaluate_parameters(params, positional_bindings(grid, X, i, j, k, map), grid.u, i, j, k);
    if (topo.kind == TopologyKind::Beam) {
      Profile prof = profile_from_diameter(profile, ps.beam_diameter, ps.fillet_ratio);
      return beam_cells_[c].eval_with(prof, ps.node_scale * ps.beam_diameter / 2.0,
                                      map ? X : to_local(X, i, j, k));
    }
    return clip(X, tpms_cells_[c].eval_with(ps.thickness, to_local(X, i, j, k)));
  }

  // Resolved per-cell parameters (per-cell bindings), 1-based indices.
  const ParameterSet& cell_parameters(int i, int j, int k) const {
    return cell_params_[cell_linear_index(grid, i, j, k)];
  }

  // Axis-aligned box enclosing all cell domains (ring bounding box under a
  // cylindrical transform).
  Aabb domain() const { return domain_; }

  // How far the solid can extend past the domain box (boundary node spheres,
  // beam thickness); the mesher pads its sampling grid by this much.
  double margin() const { return margin_; }

 private:
  friend LatticeField compose(const TopologyRef&, const ParameterField&, const CellGrid&,
                              ProfileKind, const std::optional<CylindricalMap>&);

  std::vector<BeamCellSolid> beam_cells_;
  std::vector<TpmsShell> tpms_cells_;
  std::vector<ParameterSet> cell_params_;
  Aabb domain_;
  double margin_ = 0.0;

  void locate(Vec3 X, int* i, int* j, int* k) const {
    if (map)
      conformal_cell_of(*map, grid, X, i, j, k);
    else
      straight_cell_of(grid, X, i, j, k);
  }

  Vec3 to_local(Vec3 X, int i, int j, int k) const {
    return {X.x - (i - 1) * grid.u, X.y - (j - 1) * grid.u, X.z - (k - 1) * grid.u};
  }

  static double beam_value(const BeamCellSolid& s, Vec3 p) { return s.eval(p); }

  // TPMS shells are periodic; intersect with the domain box so the lattice is
  // a bounded solid. Beam cells stay unclipped (their graphs are bounded).
  double clip(Vec3 X, double shell) const {
    double b = std::fmin(std::fmin(X.x, domain_.max.x - X.x),
                         std::fmin(std::fmin(X.y, domain_.max.y - X.y),
                                   std::fmin(X.z, domain_.max.z - X.z)));
    return std::fmin(shell, b);
  }
};

inline LatticeField compose(const TopologyRef& topo, const ParameterField& pf, const CellGrid& grid,
                            ProfileKind profile = ProfileKind::Circle,
                            const std::optional<CylindricalMap>& map = std::nullopt) {
  validate_cell_grid(grid);
  if (map) validate_conformal_grid(grid);
  validate_parameter_field(topo, pf, profile, map.has_value());

  LatticeField f;
  f.topo = topo;
  f.grid = grid;
  f.profile = profile;
  f.map = map;
  f.params = pf;

  const int cells = cell_count(grid);
  f.cell_params_.reserve(cells);
  if (topo.kind == TopologyKind::Beam)
    f.beam_cells_.reserve(cells);
  else
    f.tpms_cells_.reserve(cells);

  for (int k = 1; k <= grid.nz; ++k)
    for (int j = 1; j <= grid.ny; ++j)
      for (int i = 1; i <= grid.nx; ++i) {
        ParameterSet ps = evaluate_parameters(pf, cell_bindings(grid, i, j, k, map), grid.u, i, j,
                                              k, &f.warnings);
        f.cell_params_.push_back(ps);
        if (topo.kind == TopologyKind::Beam) {
          SkeletalGraph g = beam_topology(
              topo.beam, grid.u,
              topo.truncatable() ? std::optional<double>(ps.trunc) : std::nullopt);
          if (map) g = map_graph(g, i, j, k, *map, grid);
          f.beam_cells_.push_back(
              beam_cell_field(g, ps.beam_diameter, ps.node_scale, ps.fillet_ratio, profile));
          f.margin_ = std::fmax(f.margin_, f.beam_cells_.back().reach());
        } else {
          f.tpms_cells_.push_back(tpms_cell_field(tpms_topology(topo.tpms, grid.u), ps.thickness));
        }
      }

  if (map) {
    double outer = map->inner_radius + grid.nx * grid.u;
    f.domain_ = {{-outer, -outer, 0.0}, {outer, outer, grid.nz * grid.u}};
  } else {
    f.domain_ = {{0.0, 0.0, 0.0}, {grid.nx * grid.u, grid.ny * grid.u, grid.nz * grid.u}};
  }
  return f;
}

}  // namespace lattgen
