#include "lattgen/field.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "lattgen/cell_field.hpp"

using namespace lattgen;

namespace {

ParameterField params(std::initializer_list<std::pair<const char*, const char*>> kv) {
  ParameterField pf;
  for (const auto& [key, text] : kv) set_parameter(pf, key, parse_expression(text));
  return pf;
}

}  // namespace

TEST(Grid, NormalizedCoords) {
  CellGrid g{10, 10, 10, 1.0};
  Vec3 lo = normalized_coords(g, 1, 1, 1);
  EXPECT_EQ(lo.x, 0.0);
  EXPECT_EQ(lo.y, 0.0);
  EXPECT_EQ(lo.z, 0.0);
  Vec3 hi = normalized_coords(g, 10, 10, 10);
  EXPECT_EQ(hi.x, 1.0);
  EXPECT_EQ(hi.y, 1.0);
  EXPECT_EQ(hi.z, 1.0);
  CellGrid single{1, 1, 1, 1.0};
  Vec3 s = normalized_coords(single, 1, 1, 1);
  EXPECT_EQ(s.x, 0.0);
  EXPECT_EQ(s.y, 0.0);
  EXPECT_EQ(s.z, 0.0);
}

TEST(Parameters, LinearThicknessRamp) {
  CellGrid g{1, 1, 10, 20.0};
  auto pf = params({{"thickness", "6.9*z+0.1"}});
  ParameterSet lo = evaluate_parameters(pf, cell_bindings(g, 1, 1, 1, std::nullopt), g.u, 1, 1, 1);
  EXPECT_DOUBLE_EQ(lo.thickness, 0.1);
  ParameterSet hi =
      evaluate_parameters(pf, cell_bindings(g, 1, 1, 10, std::nullopt), g.u, 1, 1, 10);
  EXPECT_DOUBLE_EQ(hi.thickness, 7.0);
}

TEST(Parameters, ParabolaPeak) {
  CellGrid g{20, 1, 1, 10.0};
  auto pf = params({{"beam_diameter", "-4*6*(x-0.5)^2+6+1"}});
  // midpoint of a 20-cell axis is between cells; check an explicit x=0.5 grid
  CellGrid odd{21, 1, 1, 10.0};
  ParameterSet mid =
      evaluate_parameters(pf, cell_bindings(odd, 11, 1, 1, std::nullopt), odd.u, 11, 1, 1);
  EXPECT_DOUBLE_EQ(mid.beam_diameter, 7.0);
}

TEST(Parameters, ParabolaSymmetricAndAnchored) {
  CellGrid g{20, 1, 1, 10.0};
  auto pf = params({{"beam_diameter", "-4*6*(x-0.5)^2+6+1"}});
  std::vector<double> d(21, 0.0);
  for (int i = 1; i <= 20; ++i)
    d[i] = evaluate_parameters(pf, cell_bindings(g, i, 1, 1, std::nullopt), g.u, i, 1, 1)
               .beam_diameter;
  EXPECT_NEAR(d[1], 1.0, 1e-12);
  EXPECT_NEAR(d[20], 1.0, 1e-12);
  for (int i = 1; i <= 20; ++i) EXPECT_NEAR(d[i], d[21 - i], 1e-12);
}

TEST(Parameters, SineRangeOverSampledCells) {
  // 13 cells place x = 1/12 and 3/12 exactly on the sine extrema
  CellGrid g{13, 1, 1, 20.0};
  auto pf = params({{"thickness", "3*sin(6*pi*x)+4"}});
  double lo = 1e300, hi = -1e300;
  for (int i = 1; i <= 13; ++i) {
    double t = evaluate_parameters(pf, cell_bindings(g, i, 1, 1, std::nullopt), g.u, i, 1, 1)
                   .thickness;
    lo = std::fmin(lo, t);
    hi = std::fmax(hi, t);
  }
  EXPECT_NEAR(lo, 1.0, 1e-12);
  EXPECT_NEAR(hi, 7.0, 1e-12);
}

TEST(Parameters, IntegerAndSizeBindings) {
  CellGrid g{4, 5, 6, 2.5};
  auto pf = params({{"beam_diameter", "i+10*j+100*k"}, {"node_scale", "u/2+nx+ny+nz"}});
  ParameterSet ps = evaluate_parameters(pf, cell_bindings(g, 2, 3, 4, std::nullopt), g.u, 2, 3, 4);
  EXPECT_DOUBLE_EQ(ps.beam_diameter, 432.0);
  EXPECT_DOUBLE_EQ(ps.node_scale, 1.25 + 4 + 5 + 6);
}

TEST(Parameters, DefaultsAndWarnings) {
  CellGrid g{1, 1, 1, 10.0};
  auto pf = params({{"beam_diameter", "1"}});
  std::vector<std::string> warn;
  ParameterSet ps =
      evaluate_parameters(pf, cell_bindings(g, 1, 1, 1, std::nullopt), g.u, 1, 1, 1, &warn);
  EXPECT_DOUBLE_EQ(ps.node_scale, 1.1);
  EXPECT_TRUE(warn.empty());

  auto small = params({{"beam_diameter", "1"}, {"node_scale", "0.5"}});
  evaluate_parameters(small, cell_bindings(g, 1, 1, 1, std::nullopt), g.u, 1, 1, 1, &warn);
  ASSERT_EQ(warn.size(), 1u);
  EXPECT_NE(warn[0].find("node_scale"), std::string::npos);
}

TEST(Parameters, RangeViolationsNameCellAndKey) {
  CellGrid g{2, 1, 1, 10.0};
  auto expect_param_error = [&](ParameterField pf, const char* needle) {
    try {
      evaluate_parameters(pf, cell_bindings(g, 2, 1, 1, std::nullopt), g.u, 2, 1, 1);
      FAIL() << "expected ParamError";
    } catch (const ParamError& e) {
      EXPECT_NE(std::string(e.what()).find("cell (2,1,1)"), std::string::npos) << e.what();
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_param_error(params({{"thickness", "0"}}), "'thickness'");
  expect_param_error(params({{"thickness", "5"}}), "half the unit cell");
  expect_param_error(params({{"beam_diameter", "-1"}}), "'beam_diameter'");
  expect_param_error(params({{"beam_diameter", "1"}, {"node_scale", "0"}}), "'node_scale'");
  expect_param_error(params({{"beam_diameter", "1"}, {"fillet_ratio", "1.5"}}), "'fillet_ratio'");
  expect_param_error(params({{"beam_diameter", "1"}, {"trunc", "0.6"}}), "'trunc'");
}

TEST(Parameters, EvaluationErrorsCarryCellContext) {
  CellGrid g{1, 1, 1, 10.0};
  auto pf = params({{"beam_diameter", "1/ (x)"}});  // x = 0 at the only cell
  try {
    evaluate_parameters(pf, cell_bindings(g, 1, 1, 1, std::nullopt), g.u, 1, 1, 1);
    FAIL() << "expected division error";
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::Expression);
    EXPECT_NE(std::string(e.what()).find("cell (1,1,1)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("division by zero"), std::string::npos);
  }
}

TEST(Compose, KindKeyMismatchRejected) {
  CellGrid g{1, 1, 1, 10.0};
  EXPECT_THROW(compose(topology_ref("cubic"), params({{"thickness", "1"}}), g), SpecError);
  EXPECT_THROW(compose(topology_ref("cubic"),
                       params({{"beam_diameter", "1"}, {"thickness", "1"}}), g),
               SpecError);
  EXPECT_THROW(compose(topology_ref("gyroid"), params({{"beam_diameter", "1"}}), g), SpecError);
  EXPECT_THROW(compose(topology_ref("gyroid"),
                       params({{"thickness", "1"}, {"node_scale", "1.1"}}), g),
               SpecError);
  EXPECT_THROW(compose(topology_ref("cubic"),
                       params({{"beam_diameter", "1"}, {"trunc", "0.2"}}), g),
               SpecError);
  EXPECT_THROW(compose(topology_ref("truncated_cube"), params({{"beam_diameter", "1"}}), g),
               SpecError);
  EXPECT_THROW(compose(topology_ref("cubic"),
                       params({{"beam_diameter", "1"}, {"fillet_ratio", "0.5"}}), g,
                       ProfileKind::Circle),
               SpecError);
  EXPECT_THROW(compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}), g,
                       ProfileKind::RoundedSquare),
               SpecError);
}

TEST(Compose, UnknownNamesRejected) {
  EXPECT_THROW(topology_ref("octet"), SpecError);
  try {
    topology_ref("octet");
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("cubic"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gyroid"), std::string::npos);
  }
  ParameterField pf;
  EXPECT_THROW(set_parameter(pf, "diameter", parse_expression("1")), SpecError);
}

TEST(Compose, UnboundVariableNamed) {
  CellGrid g{1, 1, 1, 10.0};
  try {
    compose(topology_ref("cubic"), params({{"beam_diameter", "1+q"}}), g);
    FAIL() << "expected expression error";
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::Expression);
    EXPECT_NE(std::string(e.what()).find("'q'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("beam_diameter"), std::string::npos);
  }
  try {
    compose(topology_ref("cubic"), params({{"beam_diameter", "1+rho"}}), g);
    FAIL() << "expected expression error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cylindrical"), std::string::npos);
  }
}

TEST(Compose, IdentitySingleCellMatchesUnitCellField) {
  CellGrid g{1, 1, 1, 1.0};
  LatticeField f = compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}), g);
  BeamCellSolid unit = beam_cell_field(beam_topology(BeamTopologyId::Cubic, 1.0), 1.0, 1.1, 0.0,
                                       ProfileKind::Circle);
  for (Vec3 p : {Vec3{0, 0, 0}, Vec3{0.5, 0, 0}, Vec3{0.5, 0.5, 0.5}, Vec3{0.2, 0.1, 0.9},
                 Vec3{-0.3, 0.4, 0.2}}) {
    EXPECT_EQ(f(p), unit.eval(p));
  }
  EXPECT_DOUBLE_EQ(f({0, 0, 0}), 0.55);
  EXPECT_LT(f({10, 10, 10}), 0.0);
  EXPECT_DOUBLE_EQ(f.margin(), 0.55);
}

TEST(Compose, PerCellParametersConstantWithinCell) {
  CellGrid g{2, 1, 1, 10.0};
  LatticeField f = compose(topology_ref("cubic"), params({{"beam_diameter", "1+2*x"}}), g);
  EXPECT_DOUBLE_EQ(f.cell_parameters(1, 1, 1).beam_diameter, 1.0);
  EXPECT_DOUBLE_EQ(f.cell_parameters(2, 1, 1).beam_diameter, 3.0);
  // symmetric points along the first cell's bottom edge see identical values
  EXPECT_EQ(f({2.0, 0.0, 0.0}), f({8.0, 0.0, 0.0}));
  // just across the cell boundary the diameter jumps
  EXPECT_NE(f({9.999, 0.0, 0.0}), f({10.001, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(f({2.0, 0.0, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(f({12.0, 0.0, 0.0}), 1.5);
}

TEST(Compose, ContinuousModeVariesInsideCell) {
  CellGrid g{2, 1, 1, 10.0, FieldMode::Continuous};
  LatticeField f = compose(topology_ref("cubic"), params({{"beam_diameter", "1+2*x"}}), g);
  // on the bottom edge axis: profile radius = D(x)/2 with x = X/20
  EXPECT_DOUBLE_EQ(f({5.0, 0.0, 0.0}), (1.0 + 2.0 * 0.25) / 2.0);
  EXPECT_DOUBLE_EQ(f({15.0, 0.0, 0.0}), (1.0 + 2.0 * 0.75) / 2.0);
}

TEST(Compose, TruncationVariesPerCell) {
  CellGrid g{2, 1, 1, 10.0};
  LatticeField f = compose(topology_ref("truncated_cube"),
                           params({{"beam_diameter", "1"}, {"trunc", "0.5*x"}}), g);
  EXPECT_DOUBLE_EQ(f.cell_parameters(1, 1, 1).trunc, 0.0);
  EXPECT_DOUBLE_EQ(f.cell_parameters(2, 1, 1).trunc, 0.5);
  // cell 1 keeps full corners (node sphere at the origin corner)
  EXPECT_DOUBLE_EQ(f({0, 0, 0}), 0.55);
  // cell 2 corners are cut: nearest skeleton point is u/2 away
  EXPECT_LT(f({20.0, 0.0, 0.0}), 0.0);
}

TEST(Compose, TpmsShellAndDomainClip) {
  CellGrid g{1, 1, 1, 20.0};
  LatticeField f = compose(topology_ref("schwarz_p"), params({{"thickness", "2"}}), g);
  // mid-surface point: F = t/2 exactly
  EXPECT_NEAR(f({5.0, 5.0, 5.0}), 1.0, 1e-9);
  // cell centre: field extremum, fallback branch, well outside the shell
  EXPECT_LT(f({10.0, 10.0, 10.0}), 0.0);
  // on the domain face the box clip caps the value at zero
  EXPECT_LE(f({0.0, 5.0, 5.0}), 0.0);
  // outside the domain everything is negative
  EXPECT_LT(f({-1.0, 5.0, 5.0}), 0.0);
  EXPECT_LT(f({21.0, 5.0, 5.0}), 0.0);
  EXPECT_DOUBLE_EQ(f.margin(), 0.0);
}

TEST(Compose, TpmsVolumeMonotoneInThickness) {
  CellGrid g{1, 1, 1, 20.0};
  auto estimate = [&](const char* t) {
    LatticeField f = compose(topology_ref("schwarz_p"), params({{"thickness", t}}), g);
    int n = 40, inside = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          Vec3 p{(a + 0.5) * g.u / n, (b + 0.5) * g.u / n, (c + 0.5) * g.u / n};
          if (f(p) >= 0.0) ++inside;
        }
    return inside;
  };
  int v1 = estimate("1"), v2 = estimate("2"), v3 = estimate("3");
  EXPECT_LT(v1, v2);
  EXPECT_LT(v2, v3);
}

TEST(Compose, ThicknessSequenceTenCells) {
  CellGrid g{1, 1, 10, 20.0};
  LatticeField f = compose(topology_ref("schwarz_p"), params({{"thickness", "6.9*z+0.1"}}), g);
  for (int k = 1; k <= 10; ++k) {
    double expect = 6.9 * ((k - 1) / 9.0) + 0.1;
    EXPECT_NEAR(f.cell_parameters(1, 1, k).thickness, expect, 1e-12);
  }
}

TEST(Compose, GridValidation) {
  EXPECT_THROW(compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}),
                       CellGrid{0, 1, 1, 10.0}),
               ParamError);
  EXPECT_THROW(compose(topology_ref("cubic"), params({{"beam_diameter", "1"}}),
                       CellGrid{1, 1, 1, -1.0}),
               ParamError);
}
